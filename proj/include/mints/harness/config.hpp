#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mints/errors.hpp"
#include "mints/mab.hpp"
#include "mints/pricing.hpp"

namespace mints::harness {

/// Bad configuration text or values; the message names the line and key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Family { Mab, MabLipschitz, Pricing, LipschitzContinuum, Cog, Ellipsoid };

const char* to_string(Family f);
std::optional<Family> family_from_string(std::string_view s);

struct MabParams {
  std::string policy = "mints";  // mints | gaussian_ts
  double sigma = 1.2;
  double tolerance = 1e-9;
  EnvKind env_kind = EnvKind::Gaussian;
  std::vector<double> means;
  double noise_sd = 1.0;
  double half_width = 1.0;
  std::vector<double> prior_weights;  // empty: uniform
  double baseline_sigma = 1.0;
  // mab_lipschitz only
  double lipschitz = 1.0;
  std::vector<double> positions;
};

struct PricingParams {
  std::vector<double> prices;
  double lipschitz = 2.0;
  std::string valuation = "uniform";  // uniform | piecewise_linear
  double low = 0.0;
  double high = 1.0;
  std::vector<double> knots_x;
  std::vector<double> knots_cdf;
  Hypothesis hypothesis = Hypothesis::Revenue;
  std::vector<double> prior_weights;
  double tolerance = 1e-9;
};

struct ContinuumParams {
  std::size_t dim = 1;
  double lipschitz = 1.0;
  double sigma = 1.0;
  bool noiseless = false;
  std::vector<double> peak;  // default: 0.5 in every coordinate
  double slope = 0.5;
  double height = 1.0;
  double noise_sd = 0.1;
  std::size_t max_attempts = 1000000;
};

struct CogParams {
  std::vector<double> center{0.3, 0.7};
  std::vector<double> curvature{1.0, 1.0};
  std::vector<double> lower{0.0, 0.0};
  std::vector<double> upper{1.0, 1.0};
};

struct EllipsoidParams {
  std::size_t dim = 2;
  std::vector<double> center;     // default: 0.5 in every coordinate
  std::vector<double> curvature;  // default: ones
  std::vector<double> start_center;
  double start_radius = 4.0;
};

struct ExperimentConfig {
  Family family = Family::Mab;
  std::uint64_t seed = 0;
  std::size_t replications = 1;
  std::string output_dir = "out";
  std::size_t horizon = 1000;

  MabParams mab;
  PricingParams pricing;
  ContinuumParams continuum;
  CogParams cog;
  EllipsoidParams ellipsoid;

  std::vector<std::string> warnings;

  /// Name recorded with results: the MAB policy, otherwise the family.
  std::string policy() const;
};

/// Parses `key = value` lines. Keys may be dotted or grouped under
/// `[section]` headers; values are numbers, booleans, strings (quoted or
/// bare) or numeric arrays `[a, b, ...]`; `#` starts a comment.
/// When `family` is given it is used if the text has no `family` key and must
/// match otherwise.
ExperimentConfig parse_config(std::string_view text, std::optional<Family> family = std::nullopt);

/// Canonical text of every effective setting, one `key = value` per line.
std::string canonical_config(const ExperimentConfig& cfg);

/// FNV-1a of the canonical settings that define the problem instance
/// (seed, replications, output_dir and policy excluded).
std::uint64_t config_hash(const ExperimentConfig& cfg);

std::string hex64(std::uint64_t v);

}  // namespace mints::harness
