#include "mints/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mints/errors.hpp"
#include "mints/solvers.hpp"

namespace mints {

void ContinuumDataset::add(std::vector<double> x, double phi) {
  if (x.size() != dim) throw Error("ContinuumDataset: point has wrong dimension");
  points.push_back(std::move(x));
  values.push_back(phi);
}

void ContinuumDataset::validate() const {
  if (dim == 0) throw Error("ContinuumDataset: dimension must be >= 1");
  if (points.size() != values.size()) throw Error("ContinuumDataset: points and values differ in length");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) throw Error("ContinuumDataset: point has wrong dimension");
    for (double c : points[i]) {
      if (!(c >= 0.0 && c <= 1.0)) throw Error("ContinuumDataset: coordinates must lie in [0, 1]");
    }
    if (!std::isfinite(values[i])) throw Error("ContinuumDataset: non-finite value");
  }
}

void LipschitzSpec::validate() const {
  if (!(M > 0.0)) throw Error("LipschitzSpec: M must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("LipschitzSpec: sigma must be > 0");
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

bool data_consistent(const ContinuumDataset& data, double M) {
  data.validate();
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      const double gap = std::abs(data.values[i] - data.values[j]);
      if (gap > M * euclidean_distance(data.points[i], data.points[j]) + 1e-12) return false;
    }
  }
  return true;
}

namespace {

bool noiseless_check(std::span<const double> x, const ContinuumDataset& data, double M) {
  if (data.size() == 0) return true;
  const double top = *std::max_element(data.values.begin(), data.values.end());
  double ceiling = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    ceiling = std::min(ceiling, data.values[i] + M * euclidean_distance(x, data.points[i]));
  }
  return top <= ceiling + 1e-12 * (1.0 + std::abs(top));
}

void require_consistent(const ContinuumDataset& data, double M) {
  if (!data_consistent(data, M)) {
    throw EmptyPosteriorError(
        "noiseless data admit no M-Lipschitz interpolant: zero likelihood everywhere");
  }
}

}  // namespace

bool s_feasible_noiseless(std::span<const double> x, const ContinuumDataset& data, double M) {
  if (x.size() != data.dim) throw Error("s_feasible_noiseless: query has wrong dimension");
  require_consistent(data, M);
  return noiseless_check(x, data, M);
}

PriorSampler uniform_prior(std::size_t dim) {
  return [dim](RngStream& rng) {
    std::vector<double> x(dim);
    for (double& c : x) c = rng.uniform();
    return x;
  };
}

SampleResult sample_noiseless(const PriorSampler& prior, const ContinuumDataset& data, double M,
                              RngStream& rng, std::size_t max_attempts) {
  require_consistent(data, M);
  for (std::size_t a = 1; a <= max_attempts; ++a) {
    std::vector<double> x = prior(rng);
    if (noiseless_check(x, data, M)) return {std::move(x), a};
  }
  throw SamplerExhaustedError("sample_noiseless: no acceptance in " + std::to_string(max_attempts) +
                                  " attempts (acceptance rate below " +
                                  std::to_string(1.0 / static_cast<double>(max_attempts)) + ")",
                              0.0);
}

namespace {

// Pairwise rows |v_i - v_j| <= M |x_i - x_j| on coordinates offset + i.
void add_pair_rows(ConstraintSet& cons, const ContinuumDataset& data, double M, std::size_t offset) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      const double b = M * euclidean_distance(data.points[i], data.points[j]);
      cons.add_difference(offset + i, offset + j, b);
      cons.add_difference(offset + j, offset + i, b);
    }
  }
}

double solved_value(const QuadObjective& obj, const ConstraintSet& cons, const char* who) {
  const SolveResult res = solve_qp(obj, cons);
  if (res.status != SolveStatus::Optimal) {
    throw SolverError(std::string(who) + ": QP ended with status " + to_string(res.status));
  }
  return res.value;
}

}  // namespace

double v_value(std::span<const double> x, const ContinuumDataset& data, const LipschitzSpec& spec) {
  data.validate();
  spec.validate();
  if (x.size() != data.dim) throw Error("v_value: query has wrong dimension");
  const std::size_t t = data.size();
  if (t == 0) return 0.0;
  // Coordinate 0 is v (weight 0), coordinates 1..t are v_1..v_t.
  QuadObjective obj;
  obj.weights.assign(t + 1, 1.0 / (2.0 * spec.sigma * spec.sigma));
  obj.weights[0] = 0.0;
  obj.targets.assign(t + 1, 0.0);
  std::copy(data.values.begin(), data.values.end(), obj.targets.begin() + 1);
  ConstraintSet cons(t + 1);
  for (std::size_t i = 0; i < t; ++i) {
    cons.add_difference(i + 1, 0, 0.0);
    cons.add_difference(0, i + 1, spec.M * euclidean_distance(x, data.points[i]));
  }
  add_pair_rows(cons, data, spec.M, 1);
  return solved_value(obj, cons, "v_value");
}

double v_min(const ContinuumDataset& data, const LipschitzSpec& spec) {
  data.validate();
  spec.validate();
  const std::size_t t = data.size();
  if (t == 0) return 0.0;
  QuadObjective obj{std::vector<double>(t, 1.0 / (2.0 * spec.sigma * spec.sigma)), data.values};
  ConstraintSet cons(t);
  add_pair_rows(cons, data, spec.M, 0);
  return solved_value(obj, cons, "v_min");
}

SampleResult sample_gaussian(const PriorSampler& prior, const ContinuumDataset& data,
                             const LipschitzSpec& spec, RngStream& rng, std::size_t max_attempts) {
  const double vmin = v_min(data, spec);
  double mean_accept = 0.0;
  for (std::size_t a = 1; a <= max_attempts; ++a) {
    std::vector<double> x = prior(rng);
    const double accept = std::exp(std::min(0.0, vmin - v_value(x, data, spec)));
    mean_accept += (accept - mean_accept) / static_cast<double>(a);
    if (rng.uniform() < accept) return {std::move(x), a};
  }
  throw SamplerExhaustedError("sample_gaussian: no acceptance in " + std::to_string(max_attempts) +
                                  " attempts (mean acceptance probability " +
                                  std::to_string(mean_accept) + ")",
                              mean_accept);
}

}  // namespace mints
