#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mints/rng.hpp"

namespace mints {

/// Observations (x_i, phi_i) with x_i in [0,1]^dim.
struct ContinuumDataset {
  std::size_t dim = 1;
  std::vector<std::vector<double>> points;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  void add(std::vector<double> x, double phi);
  void validate() const;
};

struct LipschitzSpec {
  double M = 1.0;
  double sigma = 1.0;  // noisy model only
  void validate() const;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// |phi_i - phi_j| <= M |x_i - x_j| + 1e-12 for every pair.
bool data_consistent(const ContinuumDataset& data, double M);

/// Noiseless feasibility of "x is a maximizer" with v_i pinned to phi_i:
/// max_i phi_i <= min_i (phi_i + M |x - x_i|). Throws EmptyPosteriorError on
/// inconsistent data.
bool s_feasible_noiseless(std::span<const double> x, const ContinuumDataset& data, double M);

/// Draws a candidate optimum from the prior.
using PriorSampler = std::function<std::vector<double>(RngStream&)>;

/// Uniform prior on [0,1]^dim.
PriorSampler uniform_prior(std::size_t dim);

struct SampleResult {
  std::vector<double> x;
  std::size_t attempts = 0;
};

inline constexpr std::size_t kDefaultMaxAttempts = 1000000;

/// Rejection sampler for the noiseless generalized posterior.
/// Throws SamplerExhaustedError when max_attempts draws are all rejected.
SampleResult sample_noiseless(const PriorSampler& prior, const ContinuumDataset& data, double M,
                              RngStream& rng, std::size_t max_attempts = kDefaultMaxAttempts);

/// min over S(x) of (1/2 sigma^2) sum (v_i - phi_i)^2, where
/// S(x) = { v_i <= v <= v_i + M|x - x_i|, |v_i - v_j| <= M|x_i - x_j| }.
double v_value(std::span<const double> x, const ContinuumDataset& data, const LipschitzSpec& spec);

/// Same program without the rows that involve v.
double v_min(const ContinuumDataset& data, const LipschitzSpec& spec);

/// Rejection sampler for the Gaussian-noise generalized posterior: accept a
/// prior draw x with probability exp(V_min - V(x)).
SampleResult sample_gaussian(const PriorSampler& prior, const ContinuumDataset& data,
                             const LipschitzSpec& spec, RngStream& rng,
                             std::size_t max_attempts = kDefaultMaxAttempts);

}  // namespace mints
