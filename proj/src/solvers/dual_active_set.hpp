#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "mints/solvers.hpp"

namespace mints::detail {

struct DualActiveSetResult {
  SolveStatus status = SolveStatus::Optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per row, zero for inactive rows
  std::size_t iterations = 0;
};

/// Goldfarb-Idnani dual active-set method for
///   min 0.5 x' diag(hessian) x + linear' x   s.t.   rows_t' * x <= bounds
/// (column r of rows_t is the coefficient vector of row r)
/// with a strictly positive diagonal Hessian. Finite and exact up to rounding;
/// reports Infeasible when no dual step can restore a violated row.
DualActiveSetResult solve_diagonal_qp(const Eigen::VectorXd& hessian,
                                      const Eigen::VectorXd& linear,
                                      const Eigen::MatrixXd& rows_t,
                                      const Eigen::VectorXd& bounds,
                                      std::size_t max_iterations);

}  // namespace mints::detail
