#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mints/errors.hpp"

namespace mints {

/// Weighted least-squares objective  sum_k weights[k] * (v_k - targets[k])^2.
///
/// For the Gaussian bandit likelihood the weights are pull counts and the
/// targets are empirical means; dividing the optimum by 2 sigma^2 gives the
/// negative log profile likelihood up to a constant.
struct QuadObjective {
  std::vector<double> weights;
  std::vector<double> targets;

  std::size_t dimension() const { return weights.size(); }
  double evaluate(std::span<const double> v) const;
  void validate() const;
};

/// Linear inequality system  a_r . v <= b_r.
class ConstraintSet {
 public:
  explicit ConstraintSet(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t rows() const { return bounds_.size(); }
  bool empty() const { return bounds_.empty(); }

  void add_row(std::span<const double> a, double b);
  /// v_i - v_j <= bound
  void add_difference(std::size_t i, std::size_t j, double bound);
  /// v_i <= bound
  void add_upper(std::size_t i, double bound);
  /// v_i >= bound
  void add_lower(std::size_t i, double bound);
  /// Appends every row of `other` (same dimension).
  void append(const ConstraintSet& other);
  /// Copy with row `r` removed.
  ConstraintSet without_row(std::size_t r) const;

  std::span<const double> row(std::size_t r) const {
    return {coeffs_.data() + r * dimension_, dimension_};
  }
  double bound(std::size_t r) const { return bounds_[r]; }

  /// Largest violation max_r (a_r . v - b_r), or 0 when every row holds.
  double max_violation(std::span<const double> v) const;

 private:
  std::size_t dimension_;
  std::vector<double> coeffs_;  // row-major, rows() x dimension()
  std::vector<double> bounds_;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(SolveStatus s);

struct SolveResult {
  double value = 0.0;
  std::vector<double> argmin;  // argmax for max_bernoulli_loglik
  SolveStatus status = SolveStatus::Optimal;
  std::size_t iterations = 0;
  double kkt_residual = 0.0;  // scaled stationarity residual at exit
};

struct SolverOptions {
  /// Stationarity / convergence tolerance of the iterative outer loops.
  double tolerance = 1e-9;
  std::size_t max_iterations = 100000;
  /// Rows may be violated by this much at an Optimal exit.
  double feasibility_tolerance = 1e-8;
};

/// Exact minimum over lambda of
///   w_j (lambda - m_j)^2 + sum_{k != j, w_k > 0} w_k (m_k - lambda)_+^2,
/// i.e. the weighted least-squares distance from the targets to the set
/// {v : v_j >= v_k for all k}. Solved by a breakpoint scan.
/// Returns (value, lambda_star). Throws SolverError if every weight is zero.
std::pair<double, double> min_profile_ssq(const QuadObjective& obj, std::size_t j);

/// min_profile_ssq for every arm, sharing one sort of the breakpoints.
std::vector<double> min_profile_ssq_all(const QuadObjective& obj);

/// Minimizes obj over cons. Zero-weight coordinates are retained in the
/// constraints; among optimal points their values are moved to the midpoint
/// of their feasible interval when that interval is bounded.
SolveResult solve_qp(const QuadObjective& obj, const ConstraintSet& cons,
                     const SolverOptions& opts = {});

/// True iff some point satisfies every row within 1e-8.
bool feasible(const ConstraintSet& cons);

/// Maximizes  sum_k counts[k] * [means[k] log th_k + (1 - means[k]) log(1 - th_k)]
/// over cons intersected with [delta, 1 - delta]^K, delta = 1e-12, with the
/// convention 0 log 0 = 0. `value` is the maximized log-likelihood and
/// `argmin` holds the maximizer.
SolveResult max_bernoulli_loglik(std::span<const double> counts, std::span<const double> means,
                                 const ConstraintSet& cons, const SolverOptions& opts = {},
                                 std::span<const double> warm_start = {});

/// Bernoulli log-likelihood of `theta` (0 log 0 = 0; -inf outside (0,1) where data forbids).
double bernoulli_loglik(std::span<const double> counts, std::span<const double> means,
                        std::span<const double> theta);

constexpr double kBernoulliBoundary = 1e-12;

}  // namespace mints
