#include "dual_active_set.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mints::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Working state of the dual method. Constraints are stored in the
// "normal' x + offset >= 0" orientation: normal = -a_r, offset = b_r.
struct State {
  Eigen::Index n = 0;
  Eigen::MatrixXd J;  // Q-factor of the active normals, scaled by L^{-T}
  Eigen::MatrixXd R;  // upper triangular, iq x iq block in use
  Eigen::Index iq = 0;
  std::vector<Eigen::Index> active;  // active[0..iq) plus a pending slot at iq
  Eigen::VectorXd u;                 // duals aligned with `active`
  double r_norm = 1.0;

  // Givens rotation turning (a, b) into (h, 0); returns false when already zero.
  static bool givens(double a, double b, double& cc, double& ss, double& h) {
    h = std::hypot(a, b);
    if (h < kEps * 1e-3) return false;
    cc = a / h;
    ss = b / h;
    return true;
  }

  // Appends the constraint whose transformed normal is d (d = J' np).
  bool add(Eigen::VectorXd& d) {
    for (Eigen::Index j = n - 1; j >= iq + 1; --j) {
      double cc, ss, h;
      if (!givens(d[j - 1], d[j], cc, ss, h)) continue;
      d[j] = 0.0;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d[j - 1] = -h;
      } else {
        d[j - 1] = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index k = 0; k < n; ++k) {
        const double t1 = J(k, j - 1);
        const double t2 = J(k, j);
        J(k, j - 1) = t1 * cc + t2 * ss;
        J(k, j) = xny * (t1 + J(k, j - 1)) - t2;
      }
    }
    ++iq;
    for (Eigen::Index i = 0; i < iq; ++i) R(i, iq - 1) = d[i];
    if (std::abs(d[iq - 1]) <= kEps * r_norm) return false;
    r_norm = std::max(r_norm, std::abs(d[iq - 1]));
    return true;
  }

  // Drops constraint `row` from the active set; the pending slot shifts down.
  void remove(Eigen::Index row) {
    Eigen::Index qq = -1;
    for (Eigen::Index i = 0; i < iq; ++i) {
      if (active[i] == row) {
        qq = i;
        break;
      }
    }
    if (qq < 0) return;
    for (Eigen::Index i = qq; i < iq - 1; ++i) {
      active[i] = active[i + 1];
      u[i] = u[i + 1];
      R.col(i) = R.col(i + 1);
    }
    active[iq - 1] = active[iq];
    u[iq - 1] = u[iq];
    active[iq] = -1;
    u[iq] = 0.0;
    for (Eigen::Index j = 0; j < iq; ++j) R(j, iq - 1) = 0.0;
    --iq;
    if (iq == 0) return;
    for (Eigen::Index j = qq; j < iq; ++j) {
      double cc, ss, h;
      if (!givens(R(j, j), R(j + 1, j), cc, ss, h)) continue;
      R(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index k = j + 1; k < iq; ++k) {
        const double t1 = R(j, k);
        const double t2 = R(j + 1, k);
        R(j, k) = t1 * cc + t2 * ss;
        R(j + 1, k) = xny * (t1 + R(j, k)) - t2;
      }
      for (Eigen::Index k = 0; k < n; ++k) {
        const double t1 = J(k, j);
        const double t2 = J(k, j + 1);
        J(k, j) = t1 * cc + t2 * ss;
        J(k, j + 1) = xny * (J(k, j) + t1) - t2;
      }
    }
  }
};

}  // namespace

DualActiveSetResult solve_diagonal_qp(const Eigen::VectorXd& hessian,
                                      const Eigen::VectorXd& linear,
                                      const Eigen::MatrixXd& rows_t,
                                      const Eigen::VectorXd& bounds,
                                      std::size_t max_iterations) {
  const Eigen::Index n = hessian.size();
  const Eigen::Index m = rows_t.cols();

  DualActiveSetResult out;
  out.multipliers = Eigen::VectorXd::Zero(m);

  Eigen::VectorXd row_norm(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    row_norm[i] = rows_t.col(i).norm();
  }

  State st;
  st.n = n;
  st.J = hessian.cwiseSqrt().cwiseInverse().asDiagonal();
  st.R = Eigen::MatrixXd::Zero(n, n);
  st.active.assign(static_cast<std::size_t>(n) + 1, -1);
  st.u = Eigen::VectorXd::Zero(n + 1);

  Eigen::VectorXd x = -linear.cwiseQuotient(hessian);
  Eigen::VectorXd slack(m), d(n), z(n), r(n), np(n);
  std::vector<char> inactive(static_cast<std::size_t>(m), 1);
  std::vector<char> allowed(static_cast<std::size_t>(m), 1);

  // Rollback copies, reused so the outer loop does not allocate.
  State snapshot;
  Eigen::VectorXd x_old, slack_old;
  std::vector<char> inactive_old;

  auto finish = [&](SolveStatus status) {
    out.status = status;
    out.x = x;
    for (Eigen::Index k = 0; k < st.iq; ++k) out.multipliers[st.active[k]] = st.u[k];
    return out;
  };

  for (;;) {
    // Step 1: recompute slacks, snapshot the state for a possible rollback.
    if (++out.iterations > max_iterations) return finish(SolveStatus::MaxIterations);
    for (Eigen::Index k = 0; k < st.iq; ++k) inactive[st.active[k]] = 0;
    const double x_scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < m; ++i) {
      allowed[i] = 1;
      slack[i] = bounds[i] - rows_t.col(i).dot(x);
    }
    snapshot = st;
    x_old = x;
    inactive_old = inactive;
    slack_old = slack;

    bool restart = false;
    while (!restart) {
      // Step 2: most violated (normalized) row that is not active.
      Eigen::Index ip = -1;
      double worst = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!inactive[i] || !allowed[i] || row_norm[i] == 0.0) continue;
        const double tol = 1e-13 * (std::abs(bounds[i]) + row_norm[i] * x_scale);
        if (slack[i] >= -tol) continue;
        const double v = slack[i] / row_norm[i];
        if (v < worst) {
          worst = v;
          ip = i;
        }
      }
      if (ip < 0) return finish(SolveStatus::Optimal);

      np = -rows_t.col(ip);
      st.u[st.iq] = 0.0;
      st.active[st.iq] = ip;

      for (;;) {
        // Step 2a: primal direction z and dual direction r.
        if (++out.iterations > max_iterations) return finish(SolveStatus::MaxIterations);
        d.noalias() = st.J.transpose() * np;
        const Eigen::Index free_dims = n - st.iq;
        z.noalias() = st.J.rightCols(free_dims) * d.tail(free_dims);
        if (st.iq > 0) {
          r.head(st.iq) =
              st.R.topLeftCorner(st.iq, st.iq).triangularView<Eigen::Upper>().solve(d.head(st.iq));
        }

        // Step 2b: partial (dual) and full (primal) step lengths.
        double t1 = kInf;
        Eigen::Index drop = -1;
        for (Eigen::Index k = 0; k < st.iq; ++k) {
          if (r[k] > 0.0 && st.u[k] / r[k] < t1) {
            t1 = st.u[k] / r[k];
            drop = st.active[k];
          }
        }
        const double curvature = d.tail(free_dims).squaredNorm();
        const double t2 =
            curvature > 1e-13 * d.squaredNorm() ? -slack[ip] / z.dot(np) : kInf;
        const double t = std::min(t1, t2);

        // Step 2c.
        if (t == kInf) return finish(SolveStatus::Infeasible);
        if (t2 == kInf) {
          st.u.head(st.iq) -= t * r.head(st.iq);
          st.u[st.iq] += t;
          inactive[drop] = 1;
          st.remove(drop);
          continue;
        }
        x += t * z;
        st.u.head(st.iq) -= t * r.head(st.iq);
        st.u[st.iq] += t;
        if (t2 <= t1) {
          if (!st.add(d)) {
            // Numerically dependent row: roll back and never pick it again this pass.
            st = snapshot;
            x = x_old;
            inactive = inactive_old;
            slack = slack_old;
            allowed[ip] = 0;
            break;
          }
          inactive[ip] = 0;
          restart = true;
          break;
        }
        inactive[drop] = 1;
        st.remove(drop);
        slack[ip] = np.dot(x) + bounds[ip];
      }
    }
  }
}

}  // namespace mints::detail
