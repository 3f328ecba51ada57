// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mints/cutting_plane.hpp"
#include "mints/harness/aggregate.hpp"
#include "mints/harness/config.hpp"
#include "mints/harness/experiment.hpp"
#include "mints/lipschitz.hpp"
#include "mints/mab.hpp"
#include "mints/solvers.hpp"

using namespace mints;
using namespace mints::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

Outcome closed_form_agreement() {
  RngStream r = RngStream(1).split(0);
  double worst = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const ArmStats s({1 + r.next_u64() % 100, 1 + r.next_u64() % 100}, {r.normal(), r.normal()});
    const double sigma = 0.5 + 1.5 * r.uniform();
    const double w0 = 0.02 + 0.96 * r.uniform();
    const Belief prior({0, 1}, {w0, 1.0 - w0});
    MabModel model;
    model.sigma = sigma;

    const Belief closed = two_arm_closed_form(s, sigma, prior);
    const Belief scan = mab_posterior(s, prior, model);
    std::vector<double> ll(2);
    for (std::size_t j = 0; j < 2; ++j) {
      ConstraintSet c(2);
      c.add_difference(1 - j, j, 0.0);
      const SolveResult res = solve_qp(s.objective(), c);
      if (res.status != SolveStatus::Optimal) return {false, "solve_qp did not converge"};
      ll[j] = -res.value / (2.0 * sigma * sigma);
    }
    const Belief generic = posterior_from_log_weights(ll, log_weights(prior));
    worst = std::max({worst, total_variation(closed, scan), total_variation(closed, generic),
                      total_variation(scan, generic)});
  }
  return {worst <= 1e-8, "max TV " + fmt("%.2e", worst) + " over 1000 instances (limit 1e-8)"};
}

Outcome lambda_ratio_bounds() {
  RngStream r = RngStream(2).split(0);
  double worst[3] = {1e300, 1e300, 1e300};
  int counts[3] = {0, 0, 0};
  for (int inst = 0; inst < 10000; ++inst) {
    const std::size_t k = 2 + r.next_u64() % 7;
    std::vector<std::size_t> n(k);
    std::vector<double> m(k);
    for (std::size_t a = 0; a < k; ++a) {
      n[a] = 1 + r.next_u64() % 100;
      m[a] = 2.0 * r.normal();
    }
    std::size_t i = r.next_u64() % k, j = r.next_u64() % (k - 1);
    if (j >= i) ++j;
    if (m[i] < m[j]) std::swap(i, j);
    MabModel model;
    model.sigma = 0.5 + 1.5 * r.uniform();
    const ArmStats s(n, m);
    const double s2 = 2.0 * model.sigma * model.sigma;
    const double li = profile_neg_loglik(s, i, model);
    const double lj = profile_neg_loglik(s, j, model);
    const double d2 = (m[i] - m[j]) * (m[i] - m[j]);
    const double ni = double(n[i]), nj = double(n[j]);
    worst[0] = std::min(worst[0], lj - d2 / (s2 * (1.0 / ni + 1.0 / nj)));
    ++counts[0];
    if (nj >= ni) {
      worst[1] = std::min(worst[1], -(li - lj));
      ++counts[1];
    } else {
      worst[2] = std::min(worst[2], (li - lj) + d2 / (s2 * (1.0 / nj - 1.0 / ni)));
      ++counts[2];
    }
  }
  const bool ok = worst[0] >= -1e-9 && worst[1] >= -1e-9 && worst[2] >= -1e-9 && counts[1] > 0 &&
                  counts[2] > 0;
  std::ostringstream d;
  d << "min slack P1 " << fmt("%.2e", worst[0]) << " (" << counts[0] << "), P2 " << fmt("%.2e", worst[1])
    << " (" << counts[1] << "), P3 " << fmt("%.2e", worst[2]) << " (" << counts[2] << ")";
  return {ok, d.str()};
}

Outcome translation_invariance() {
  const BanditEnv env = BanditEnv::gaussian({0.1, 0.5, 0.3, 0.45, 0.0}, 1.0);
  std::vector<MabModel> models(2);
  models[1].lipschitz = LipschitzStructure{0.3, line_distances({0, 1, 2, 3, 4})};
  int mismatches = 0;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    RngStream r0(33);
    const EpisodeRecord base = run_episode(5, 2000, Belief::uniform(5), models[mi], env, r0);
    for (double c : {-5.0, 0.01, 100.0}) {
      RngStream rc(33);
      const EpisodeRecord moved = run_episode(5, 2000, Belief::uniform(5), models[mi], env.shifted(c), rc);
      for (std::size_t t = 0; t < 2000; ++t) {
        mismatches += std::get<std::size_t>(base.rounds()[t].decision) !=
                      std::get<std::size_t>(moved.rounds()[t].decision);
      }
    }
  }
  return {mismatches == 0, std::to_string(mismatches) +
                               " differing decisions over 3 shifts x 2000 rounds, plain and Lipschitz"};
}

Outcome regret_scaling() {
  const ExperimentConfig cfg = parse_config(
      "family = mab\nseed = 4\nreplications = 200\nhorizon = 10000\n"
      "model.sigma = 1.2\nenv.means = [0.5, 0.0]\nenv.noise_sd = 1\n");
  const RunSummary s = run_experiment(cfg, {workers(), false});
  std::vector<double> t, r;
  for (const auto& c : s.checkpoints) {
    t.push_back(double(c.t));
    r.push_back(c.mean);
  }
  if (t != std::vector<double>{1250, 2500, 5000, 10000}) return {false, "unexpected checkpoints"};
  const LogFit f = fit_log_growth(t, r);
  const double pred = f.a + f.b * std::log(10000.0);
  const bool ok = f.r2 >= 0.9 && r.back() <= 1.3 * pred;
  std::ostringstream d;
  d << "R(T) = " << fmt("%.2f", r[0]) << ", " << fmt("%.2f", r[1]) << ", " << fmt("%.2f", r[2]) << ", "
    << fmt("%.2f", r[3]) << "; fit a=" << fmt("%.2f", f.a) << " b=" << fmt("%.2f", f.b)
    << " R^2=" << fmt("%.4f", f.r2) << "; R(10000)/fit=" << fmt("%.3f", r.back() / pred);
  return {ok, d.str()};
}

Outcome problem_independent() {
  std::string means = "[";
  for (int j = 0; j < 20; ++j) means += (j ? ", " : "") + format_double(0.2 * j / 19.0);
  means += "]";
  const std::string base = "family = mab\nseed = 5\nreplications = 50\nhorizon = 20000\n"
                           "env.noise_sd = 1\nbaseline.sigma = 1\nenv.means = " + means + "\n";
  const RunSummary m = run_experiment(parse_config(base), {workers(), false});
  const RunSummary ts = run_experiment(parse_config(base + "policy = gaussian_ts\n"), {workers(), false});
  const double k = 20.0;
  std::vector<double> ratio;
  std::ostringstream d;
  d << "R/sqrt(KT log K) at T=5000,10000,20000:";
  for (const auto& c : m.checkpoints) {
    if (c.t < 5000) continue;
    ratio.push_back(c.mean / std::sqrt(k * double(c.t) * std::log(k)));
    d << ' ' << fmt("%.4f", ratio.back());
  }
  bool ok = ratio.size() == 3;
  for (std::size_t i = 1; i < ratio.size(); ++i) ok = ok && ratio[i] <= 1.1 * ratio[i - 1];
  d << " (Gaussian TS:";
  for (const auto& c : ts.checkpoints)
    if (c.t >= 5000) d << ' ' << fmt("%.4f", c.mean / std::sqrt(k * double(c.t) * std::log(k)));
  d << ')';
  const double rm = m.checkpoints.back().mean, rt = ts.checkpoints.back().mean;
  ok = ok && rm <= 2.0 * rt;
  d << "; MINTS " << fmt("%.1f", rm) << " vs TS " << fmt("%.1f", rt) << " (ratio " << fmt("%.3f", rm / rt)
    << ", limit 2)";
  return {ok, d.str()};
}

Outcome noiseless_continuum() {
  RngStream r = RngStream(6).split(0);
  long mismatches = 0, accepted = 0, total = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t t = 1 + r.next_u64() % 4;
    ContinuumDataset d;
    d.dim = 1;
    const bool cone = inst % 2;
    const double amp = 0.5 * r.uniform(), omega = 0.5 + 1.5 * r.uniform(), phase = 6.3 * r.uniform();
    const double slope = r.uniform(), peak = r.uniform();
    for (std::size_t i = 0; i < t; ++i) {
      const double x = r.uniform();
      d.add({x}, cone ? -slope * std::abs(x - peak) : amp * std::sin(omega * x + phase));
    }
    if (!data_consistent(d, 1.0)) return {false, "generated dataset is inconsistent"};
    for (int g = 0; g < 512; ++g) {
      const double x = g / 511.0;
      bool sampler = true;
      RngStream unused(0);
      try {
        (void)sample_noiseless([x](RngStream&) { return std::vector<double>{x}; }, d, 1.0, unused, 1);
      } catch (const SamplerExhaustedError&) {
        sampler = false;
      }
      ConstraintSet c(t + 1);
      for (std::size_t i = 0; i < t; ++i) {
        c.add_upper(i + 1, d.values[i]);
        c.add_lower(i + 1, d.values[i]);
        c.add_difference(i + 1, 0, 0.0);
        c.add_difference(0, i + 1, std::abs(x - d.points[i][0]));
      }
      mismatches += sampler != feasible(c);
      accepted += sampler;
      ++total;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over " + std::to_string(total) +
                               " grid decisions (" + std::to_string(accepted) + " accepted)"};
}

// Exhaustive minimization over the grid lo + k h for (v_1..v_t, v); v only
// needs a grid point inside its feasible interval.
struct GridSearch {
  const ContinuumDataset& d;
  double x, sigma, lo, step;
  long n;
  std::vector<double> v;
  double best = std::numeric_limits<double>::infinity();

  void run(std::size_t i, double partial) {
    const std::size_t t = d.size();
    if (partial >= best) return;
    if (i == t) {
      double vlo = -1e300, vhi = 1e300;
      for (std::size_t a = 0; a < t; ++a) {
        vlo = std::max(vlo, v[a]);
        vhi = std::min(vhi, v[a] + std::abs(x - d.points[a][0]));
      }
      const double g = lo + std::ceil((vlo - lo) / step - 1e-9) * step;
      if (g <= vhi + 1e-12) best = partial;
      return;
    }
    for (long k = 0; k <= n; ++k) {
      v[i] = lo + k * step;
      bool ok = true;
      for (std::size_t a = 0; a < i && ok; ++a) {
        ok = std::abs(v[i] - v[a]) <= std::abs(d.points[i][0] - d.points[a][0]) + 1e-12;
      }
      if (!ok) continue;
      const double e = v[i] - d.values[i];
      run(i + 1, partial + e * e / (2 * sigma * sigma));
    }
  }
};

Outcome noisy_continuum_qp() {
  RngStream r = RngStream(7).split(0);
  double worst = 0.0, worst_order = 1e300;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t t = 1 + inst % 3;
    ContinuumDataset d;
    d.dim = 1;
    for (std::size_t i = 0; i < t; ++i) d.add({r.uniform()}, r.uniform());
    const LipschitzSpec spec{1.0, 1.0};
    const double x = r.uniform();
    GridSearch gs{d, x, 1.0, -2.0, 1e-2, 500, std::vector<double>(t)};
    gs.run(0, 0.0);
    worst = std::max(worst, std::abs(v_value(std::vector<double>{x}, d, spec) - gs.best));
    const double vm = v_min(d, spec);
    for (int g = 0; g <= 100; ++g) {
      worst_order = std::min(worst_order, v_value(std::vector<double>{g / 100.0}, d, spec) - vm);
    }
  }
  const bool ok = worst <= 2e-2 && worst_order >= -1e-9;
  return {ok, "max |V - grid| " + fmt("%.2e", worst) + " (limit 2e-2); min V(x) - V_min " +
                  fmt("%.2e", worst_order)};
}

Outcome center_of_gravity() {
  RngStream r = RngStream(8).split(0);
  double lo = 1.0, hi = 0.0, worst_gap = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const double ang = 3.2 * r.uniform();
    Eigen::Matrix2d rot;
    rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    const Eigen::Vector2d eig(0.5 + 1.5 * r.uniform(), 0.5 + 1.5 * r.uniform());
    const Eigen::Matrix2d q = rot * eig.asDiagonal() * rot.transpose();
    const Eigen::Vector2d c(0.1 + 0.8 * r.uniform(), 0.1 + 0.8 * r.uniform());
    const SubgradientOracle f = [q, c](const Eigen::VectorXd& x) {
      const Eigen::Vector2d d = x - c;
      return OracleValue{d.dot(q * d), 2.0 * q * d};
    };
    const Polygon2D start = Polygon2D::box({0, 0}, {1, 1});
    const auto steps = cog_run(f, start, 40);
    double prev = area(start);
    for (const auto& s : steps) {
      const double a = area(s.region);
      if (a > 0.0) {
        lo = std::min(lo, a / prev);
        hi = std::max(hi, a / prev);
      }
      prev = a;
    }
    worst_gap = std::max(worst_gap, steps.back().value);
  }
  const bool ok = lo >= 4.0 / 9.0 - 1e-9 && hi <= 5.0 / 9.0 + 1e-9 && worst_gap <= 1e-6;
  return {ok, "area fraction in [" + fmt("%.6f", lo) + ", " + fmt("%.6f", hi) + "]; max f(x_T) - f* " +
                  fmt("%.2e", worst_gap)};
}

Outcome ellipsoid_method() {
  const Ellipsoid e = Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0);
  const Eigen::Vector2d g(1.0, 0.0);
  const Ellipsoid n = ellipsoid_kl_update(e, g);
  Eigen::Matrix2d expect;
  expect << 4.0 / 9.0, 0.0, 0.0, 4.0 / 3.0;
  const double canon = std::max((n.center - Eigen::Vector2d(-1.0 / 3.0, 0.0)).cwiseAbs().maxCoeff(),
                                (n.shape_inv - expect).cwiseAbs().maxCoeff());
  RngStream r = RngStream(9).split(0);
  const double target = 2.0 / 3.0 * std::sqrt(4.0 / 3.0);
  double worst_ratio = 0.0;
  bool covers = halfellipsoid_cover_check(e, g, n, 100000, r);
  for (int inst = 0; inst < 100; ++inst) {
    Eigen::Matrix2d a;
    a << r.normal(), r.normal(), r.normal(), r.normal();
    const Ellipsoid ei{Eigen::Vector2d(r.normal(), r.normal()), a * a.transpose() + 0.1 * Eigen::Matrix2d::Identity()};
    const Eigen::Vector2d gi(r.normal(), r.normal());
    const Ellipsoid ni = ellipsoid_kl_update(ei, gi);
    worst_ratio = std::max(worst_ratio, std::abs(ni.volume() / ei.volume() - target));
    if (inst < 5) covers = covers && halfellipsoid_cover_check(ei, gi, ni, 100000, r);
  }
  const bool ok = canon <= 1e-12 && worst_ratio <= 1e-9 && covers;
  return {ok, "canonical error " + fmt("%.1e", canon) + "; volume ratio " + fmt("%.9f", target) +
                  ", max deviation " + fmt("%.1e", worst_ratio) + "; cover check " +
                  (covers ? "passed" : "failed") + " at 1e5 samples"};
}

Outcome pricing_concentration() {
  const ExperimentConfig cfg = parse_config(
      "family = pricing\nseed = 10\nreplications = 50\nhorizon = 20000\n"
      "grid.prices = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]\ngrid.lipschitz = 2\n"
      "valuation.kind = uniform\nvaluation.low = 0\nvaluation.high = 1\n");
  const RunSummary s = run_experiment(cfg, {workers(), false});
  int hits = 0;
  for (const auto& rep : s.replications) hits += rep.posterior_mode == 4u;
  double r4 = 0.0, rt = 0.0;
  for (const auto& c : s.checkpoints) {
    if (c.t == 5000) r4 = c.mean;
    if (c.t == 20000) rt = c.mean;
  }
  const bool ok = hits >= 45 && r4 > 0.0 && rt <= 0.6 * 4.0 * r4;
  return {ok, "mode at p=0.5 in " + std::to_string(hits) + "/50; R(T)=" + fmt("%.2f", rt) + ", R(T/4)=" +
                  fmt("%.2f", r4) + ", R(T)/(4 R(T/4))=" + fmt("%.3f", rt / (4.0 * r4)) + " (limit 0.6)"};
}

Outcome determinism() {
  const char* cfgs[] = {
      "family = mab\nenv.means = [0.5, 0.0, 0.3, 0.1]\nhorizon = 2000\nreplications = 8\n",
      "family = mab_lipschitz\nenv.means = [0.0, 0.2, 0.5, 0.4, 0.1]\nmodel.lipschitz = 0.4\nhorizon = 1000\n"
      "replications = 8\n",
      "family = pricing\ngrid.prices = [0.1, 0.3, 0.5, 0.7, 0.9]\nhorizon = 500\nreplications = 8\n",
      "family = lipschitz_continuum\nhorizon = 40\nreplications = 8\n",
      "family = cog\nhorizon = 40\nreplications = 8\n",
      "family = ellipsoid\ndim = 3\nhorizon = 100\nreplications = 8\n",
  };
  const auto root = std::filesystem::temp_directory_path() / "mints_acceptance_determinism";
  std::filesystem::remove_all(root);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  int same = 0, n = 0;
  std::size_t bytes = 0;
  for (const char* text : cfgs) {
    ExperimentConfig cfg = parse_config(std::string(text) + "seed = 11\n");
    const auto a = root / (std::to_string(n) + "_j1");
    const auto b = root / (std::to_string(n) + "_j8");
    write_outputs(run_experiment(cfg, {1, true}), a);
    write_outputs(run_experiment(cfg, {8, true}), b);
    const std::string ja = slurp(a / "rounds.jsonl"), jb = slurp(b / "rounds.jsonl");
    bytes += ja.size();
    same += !ja.empty() && ja == jb && slurp(a / "summary.csv") == slurp(b / "summary.csv");
    ++n;
  }
  std::filesystem::remove_all(root);
  return {same == n, std::to_string(same) + "/" + std::to_string(n) +
                         " families byte-identical at jobs 1 and 8 (" + std::to_string(bytes) + " JSONL bytes)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "two-arm closed form agreement", 5, closed_form_agreement},
      {2, "Lambda-ratio bounds P1-P3", 10, lambda_ratio_bounds},
      {3, "translation invariance of episodes", 5, translation_invariance},
      {4, "problem-dependent log T regret", 180, regret_scaling},
      {5, "problem-independent scaling vs Gaussian TS", 300, problem_independent},
      {6, "noiseless continuum accept/reject", 30, noiseless_continuum},
      {7, "noisy continuum QP vs grid", 120, noisy_continuum_qp},
      {8, "center of gravity", 10, center_of_gravity},
      {9, "ellipsoid update", 30, ellipsoid_method},
      {10, "pricing concentration", 300, pricing_concentration},
      {11, "determinism across jobs", 120, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %s: %s [%.1f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
