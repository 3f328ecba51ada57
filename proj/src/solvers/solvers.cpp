#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dual_active_set.hpp"
#include "mints/solvers.hpp"

namespace mints {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// n x m, column r holds row r's coefficients (contiguous, as the kernel reads them).
Eigen::MatrixXd rows_transposed(const ConstraintSet& cons) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(cons.dimension()),
                    static_cast<Eigen::Index>(cons.rows()));
  for (std::size_t r = 0; r < cons.rows(); ++r) {
    const auto row = cons.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) a(k, static_cast<Eigen::Index>(r)) = row[k];
  }
  return a;
}

Eigen::VectorXd bounds_vector(const ConstraintSet& cons) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(cons.rows()));
  for (std::size_t r = 0; r < cons.rows(); ++r) b[static_cast<Eigen::Index>(r)] = cons.bound(r);
  return b;
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Feasible interval of coordinate k with every other coordinate held fixed.
std::pair<double, double> coordinate_interval(const ConstraintSet& cons, std::span<const double> v,
                                              std::size_t k) {
  double lo = -kInf, hi = kInf;
  for (std::size_t r = 0; r < cons.rows(); ++r) {
    const auto a = cons.row(r);
    if (a[k] == 0.0) continue;
    double rest = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i != k) rest += a[i] * v[i];
    }
    const double limit = (cons.bound(r) - rest) / a[k];
    if (a[k] > 0.0) {
      hi = std::min(hi, limit);
    } else {
      lo = std::max(lo, limit);
    }
  }
  return {lo, hi};
}

}  // namespace

double QuadObjective::evaluate(std::span<const double> v) const {
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double e = v[k] - targets[k];
    total += weights[k] * e * e;
  }
  return total;
}

void QuadObjective::validate() const {
  if (weights.size() != targets.size()) {
    throw SolverError("QuadObjective: weights and targets differ in length");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]) || !std::isfinite(targets[k])) {
      throw SolverError("QuadObjective: weights must be finite and >= 0, targets finite");
    }
  }
}

void ConstraintSet::add_row(std::span<const double> a, double b) {
  if (a.size() != dimension_) {
    throw SolverError("ConstraintSet: row has length " + std::to_string(a.size()) +
                      ", expected " + std::to_string(dimension_));
  }
  coeffs_.insert(coeffs_.end(), a.begin(), a.end());
  bounds_.push_back(b);
}

void ConstraintSet::add_difference(std::size_t i, std::size_t j, double bound) {
  std::vector<double> a(dimension_, 0.0);
  a.at(i) += 1.0;
  a.at(j) -= 1.0;
  add_row(a, bound);
}

void ConstraintSet::add_upper(std::size_t i, double bound) {
  std::vector<double> a(dimension_, 0.0);
  a.at(i) = 1.0;
  add_row(a, bound);
}

void ConstraintSet::add_lower(std::size_t i, double bound) {
  std::vector<double> a(dimension_, 0.0);
  a.at(i) = -1.0;
  add_row(a, -bound);
}

void ConstraintSet::append(const ConstraintSet& other) {
  if (other.dimension_ != dimension_) throw SolverError("ConstraintSet::append: dimension mismatch");
  coeffs_.insert(coeffs_.end(), other.coeffs_.begin(), other.coeffs_.end());
  bounds_.insert(bounds_.end(), other.bounds_.begin(), other.bounds_.end());
}

ConstraintSet ConstraintSet::without_row(std::size_t r) const {
  ConstraintSet out(dimension_);
  for (std::size_t i = 0; i < rows(); ++i) {
    if (i != r) out.add_row(row(i), bound(i));
  }
  return out;
}

double ConstraintSet::max_violation(std::span<const double> v) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto a = row(r);
    const double lhs = std::inner_product(a.begin(), a.end(), v.begin(), 0.0);
    worst = std::max(worst, lhs - bounds_[r]);
  }
  return worst;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Breakpoint scan for the optimality polytope {v : v_j >= v_k}.

namespace {

// `order` lists the arms with positive weight by decreasing target.
std::pair<double, double> scan_profile(const QuadObjective& obj, std::span<const std::size_t> order,
                                       std::size_t j) {
  const auto& w = obj.weights;
  const auto& m = obj.targets;
  if (w[j] == 0.0) {
    // Nothing pins v_j: lift it to the largest target and every v_k stays put.
    return {0.0, m[order.front()]};
  }
  // Stationary point of each segment, written relative to m_j so that
  // shifting every target by a constant leaves the arithmetic unchanged.
  double weight = w[j];
  double offset_sum = 0.0;  // sum over active k of w_k (m_k - m_j)
  double lambda = m[j];
  std::size_t used = 0;
  for (std::size_t k : order) {
    if (k == j) continue;
    if (lambda >= m[k]) break;  // stationary point lies on the current segment
    weight += w[k];
    offset_sum += w[k] * (m[k] - m[j]);
    lambda = m[j] + offset_sum / weight;
    ++used;
  }
  double value = w[j] * (lambda - m[j]) * (lambda - m[j]);
  std::size_t seen = 0;
  for (std::size_t k : order) {
    if (seen == used) break;
    if (k == j) continue;
    const double e = m[k] - lambda;
    if (e > 0.0) value += w[k] * e * e;
    ++seen;
  }
  return {value, lambda};
}

std::vector<std::size_t> positive_weight_order(const QuadObjective& obj) {
  obj.validate();
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < obj.dimension(); ++k) {
    if (obj.weights[k] > 0.0) order.push_back(k);
  }
  if (order.empty()) throw SolverError("min_profile_ssq: every weight is zero");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return obj.targets[a] > obj.targets[b];
  });
  return order;
}

}  // namespace

std::pair<double, double> min_profile_ssq(const QuadObjective& obj, std::size_t j) {
  if (j >= obj.dimension()) throw SolverError("min_profile_ssq: arm index out of range");
  const auto order = positive_weight_order(obj);
  return scan_profile(obj, order, j);
}

std::vector<double> min_profile_ssq_all(const QuadObjective& obj) {
  const auto order = positive_weight_order(obj);
  std::vector<double> out(obj.dimension());
  for (std::size_t j = 0; j < obj.dimension(); ++j) out[j] = scan_profile(obj, order, j).first;
  return out;
}

// ---------------------------------------------------------------------------
// Generic diagonal QP.

SolveResult solve_qp(const QuadObjective& obj, const ConstraintSet& cons,
                     const SolverOptions& opts) {
  obj.validate();
  const std::size_t n = obj.dimension();
  if (cons.dimension() != n) throw SolverError("solve_qp: constraint dimension mismatch");

  SolveResult out;
  if (n == 0) {
    out.status = cons.max_violation({}) <= opts.feasibility_tolerance ? SolveStatus::Optimal
                                                                       : SolveStatus::Infeasible;
    return out;
  }

  const auto nn = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd a = rows_transposed(cons);
  const Eigen::VectorXd b = bounds_vector(cons);

  double scale = 0.0;
  std::vector<std::size_t> free_coords;
  for (std::size_t k = 0; k < n; ++k) {
    scale = std::max(scale, obj.weights[k]);
    if (obj.weights[k] == 0.0) free_coords.push_back(k);
  }
  if (scale == 0.0) scale = 1.0;
  // Zero-weight coordinates get a proximal term rho (v - anchor)^2; repeating
  // with anchor <- v is a proximal-point iteration on the partial minimum over
  // the weighted coordinates, so the bias vanishes at convergence.
  const double rho = 1e-6 * scale;

  Eigen::VectorXd hessian(nn), linear(nn), anchor(nn);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    anchor[i] = obj.targets[k];
    if (obj.weights[k] > 0.0) {
      hessian[i] = 2.0 * obj.weights[k];
      linear[i] = -2.0 * obj.weights[k] * obj.targets[k];
    } else {
      hessian[i] = 2.0 * rho;
    }
  }

  detail::DualActiveSetResult res;
  const std::size_t max_prox = free_coords.empty() ? 1 : 200;
  std::size_t prox_round = 0;
  for (; prox_round < max_prox; ++prox_round) {
    for (std::size_t k : free_coords) {
      linear[static_cast<Eigen::Index>(k)] = -2.0 * rho * anchor[static_cast<Eigen::Index>(k)];
    }
    res = detail::solve_diagonal_qp(hessian, linear, a, b, opts.max_iterations);
    out.iterations += res.iterations;
    if (res.status != SolveStatus::Optimal) {
      out.status = res.status;
      out.argmin.assign(res.x.data(), res.x.data() + n);
      out.value = obj.evaluate(out.argmin);
      return out;
    }
    double moved = 0.0;
    for (std::size_t k : free_coords) {
      const auto i = static_cast<Eigen::Index>(k);
      moved = std::max(moved, std::abs(res.x[i] - anchor[i]));
      anchor[i] = res.x[i];
    }
    if (moved <= 1e-13 * (1.0 + res.x.lpNorm<Eigen::Infinity>())) break;
  }

  out.argmin.assign(res.x.data(), res.x.data() + n);

  // KKT residual of the original (unregularized) problem:
  // 2 w (v - m) + A' lambda = 0 with lambda >= 0.
  Eigen::VectorXd grad(nn);
  double grad_scale = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    grad[i] = 2.0 * obj.weights[k] * (res.x[i] - obj.targets[k]);
    grad_scale = std::max({grad_scale, std::abs(2.0 * obj.weights[k] * obj.targets[k]),
                           std::abs(2.0 * obj.weights[k] * res.x[i])});
  }
  const Eigen::VectorXd stationarity = grad + a * res.multipliers;
  out.kkt_residual = stationarity.lpNorm<Eigen::Infinity>() / grad_scale;

  const double violation = cons.max_violation(out.argmin);
  if (violation > opts.feasibility_tolerance) {
    out.status = SolveStatus::Infeasible;
  } else if (out.kkt_residual > 1e-7 || prox_round == max_prox) {
    out.status = SolveStatus::MaxIterations;
  } else {
    out.status = SolveStatus::Optimal;
  }

  if (out.status == SolveStatus::Optimal) {
    // Zero-weight coordinates do not affect the value: report the midpoint of
    // each one's feasible interval when it is bounded.
    for (std::size_t k : free_coords) {
      const auto [lo, hi] = coordinate_interval(cons, out.argmin, k);
      if (std::isfinite(lo) && std::isfinite(hi) && lo <= hi) out.argmin[k] = 0.5 * (lo + hi);
    }
  }
  out.value = obj.evaluate(out.argmin);
  return out;
}

bool feasible(const ConstraintSet& cons) {
  const std::size_t n = cons.dimension();
  if (cons.empty()) return true;
  if (n == 0) return cons.max_violation({}) <= 1e-8;
  // Minimum-norm point of the polytope; the dual method certifies
  // infeasibility when no dual step can repair a violated row.
  const auto nn = static_cast<Eigen::Index>(n);
  const auto res = detail::solve_diagonal_qp(Eigen::VectorXd::Ones(nn), Eigen::VectorXd::Zero(nn),
                                             rows_transposed(cons), bounds_vector(cons), 100000);
  if (res.status != SolveStatus::Optimal) return false;
  return cons.max_violation(as_span(res.x)) <= 1e-8;
}

// ---------------------------------------------------------------------------
// Constrained Bernoulli maximum likelihood.

double bernoulli_loglik(std::span<const double> counts, std::span<const double> means,
                        std::span<const double> theta) {
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0.0) continue;
    const double ones = counts[k] * means[k];
    const double zeros = counts[k] * (1.0 - means[k]);
    if (ones > 0.0) total += ones * std::log(theta[k]);
    if (zeros > 0.0) total += zeros * std::log1p(-theta[k]);
  }
  return total;
}

SolveResult max_bernoulli_loglik(std::span<const double> counts, std::span<const double> means,
                                 const ConstraintSet& cons, const SolverOptions& opts,
                                 std::span<const double> warm_start) {
  const std::size_t n = counts.size();
  if (means.size() != n || cons.dimension() != n) {
    throw SolverError("max_bernoulli_loglik: dimension mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(counts[k] >= 0.0) || !(means[k] >= 0.0 && means[k] <= 1.0)) {
      throw SolverError("max_bernoulli_loglik: counts must be >= 0 and means in [0, 1]");
    }
  }

  ConstraintSet boxed = cons;
  for (std::size_t k = 0; k < n; ++k) {
    boxed.add_lower(k, kBernoulliBoundary);
    boxed.add_upper(k, 1.0 - kBernoulliBoundary);
  }
  const Eigen::MatrixXd a = rows_transposed(boxed);
  const Eigen::VectorXd b = bounds_vector(boxed);
  const auto nn = static_cast<Eigen::Index>(n);

  SolveResult out;
  Eigen::VectorXd theta(nn);
  const bool warm_ok = warm_start.size() == n && boxed.max_violation(warm_start) <= 0.1 * opts.feasibility_tolerance;
  if (warm_ok) {
    for (std::size_t k = 0; k < n; ++k) theta[static_cast<Eigen::Index>(k)] = warm_start[k];
  } else {
    // Weighted projection of the clipped empirical means.
    Eigen::VectorXd h(nn), lin(nn);
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double target = std::clamp(means[k], 0.01, 0.99);
      h[i] = counts[k] > 0.0 ? counts[k] : 1e-3;
      lin[i] = -h[i] * (counts[k] > 0.0 ? target : 0.5);
    }
    const auto start = detail::solve_diagonal_qp(h, lin, a, b, opts.max_iterations);
    out.iterations += start.iterations;
    if (start.status != SolveStatus::Optimal ||
        boxed.max_violation(as_span(start.x)) > opts.feasibility_tolerance) {
      out.status = start.status == SolveStatus::MaxIterations ? SolveStatus::MaxIterations
                                                              : SolveStatus::Infeasible;
      out.argmin.assign(start.x.data(), start.x.data() + n);
      out.value = -kInf;
      return out;
    }
    theta = start.x;
    // The box rows may hold only to rounding; pull back inside.
    for (Eigen::Index i = 0; i < nn; ++i) {
      theta[i] = std::clamp(theta[i], kBernoulliBoundary, 1.0 - kBernoulliBoundary);
    }
  }

  auto loglik = [&](const Eigen::VectorXd& th) { return bernoulli_loglik(counts, means, as_span(th)); };

  double value = loglik(theta);
  Eigen::VectorXd grad(nn), hess(nn), lin(nn), step(nn), trial(nn);
  bool converged = false;
  std::size_t iter = 0;
  const std::size_t max_outer = std::min<std::size_t>(opts.max_iterations, 500);
  // Sequential QP with the exact (separable) Hessian: each subproblem is a
  // diagonal QP over the same polytope, followed by Armijo backtracking.
  for (; iter < max_outer; ++iter) {
    double hmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double th = theta[i];
      const double mu = means[k];
      grad[i] = counts[k] * (mu / th - (1.0 - mu) / (1.0 - th));
      const double curv = counts[k] * (mu / (th * th) + (1.0 - mu) / ((1.0 - th) * (1.0 - th)));
      hess[i] = std::min(curv, counts[k] * 1e8);
      hmax = std::max(hmax, hess[i]);
    }
    if (hmax == 0.0) {
      converged = true;  // no data: every feasible point is optimal
      break;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      if (hess[i] == 0.0) hess[i] = 1e-6 * hmax;  // keep unobserved prices near their value
      // maximize g'd - 0.5 d'Hd  <=>  minimize 0.5 th'H th - (H theta + g)' th
      lin[i] = -(hess[i] * theta[i] + grad[i]);
    }
    const auto sub = detail::solve_diagonal_qp(hess, lin, a, b, opts.max_iterations);
    out.iterations += sub.iterations;
    if (sub.status != SolveStatus::Optimal) {
      out.status = sub.status;
      break;
    }
    step = sub.x - theta;
    const double predicted = grad.dot(step);
    if (predicted <= 1e-3 * opts.tolerance * (1.0 + std::abs(value)) ||
        step.lpNorm<Eigen::Infinity>() <= 1e-15) {
      converged = true;
      break;
    }
    double t = 1.0;
    double next = value;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = theta + t * step;
      for (Eigen::Index i = 0; i < nn; ++i) {
        trial[i] = std::clamp(trial[i], kBernoulliBoundary, 1.0 - kBernoulliBoundary);
      }
      next = loglik(trial);
      if (next >= value + 1e-4 * t * predicted) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no further ascent representable in floating point
      break;
    }
    theta = trial;
    value = next;
  }

  out.argmin.assign(theta.data(), theta.data() + n);
  out.value = value;
  if (out.status == SolveStatus::Optimal) {
    out.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  }
  out.iterations += iter;
  return out;
}

}  // namespace mints
