#include "mints/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "mints/cutting_plane.hpp"
#include "mints/lipschitz.hpp"
#include "mints/mab.hpp"
#include "mints/pricing.hpp"

namespace mints::harness {
namespace {

using ojson = nlohmann::ordered_json;

Belief prior_from_weights(const std::vector<double>& w, std::size_t k) {
  if (w.empty()) return Belief::uniform(k);
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> norm(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) norm[i] = w[i] / total;
  // Renormalize once more so the sum is within rounding of 1.
  double again = 0.0;
  for (double x : norm) again += x;
  for (double& x : norm) x /= again;
  std::vector<std::size_t> support(k);
  for (std::size_t i = 0; i < k; ++i) support[i] = i;
  return Belief(std::move(support), std::move(norm));
}

ojson decision_json(const Decision& d) {
  if (const auto* i = std::get_if<std::size_t>(&d)) return *i;
  return std::get<std::vector<double>>(d);
}

ojson feedback_json(const Feedback& f) {
  if (const auto* v = std::get_if<double>(&f)) return *v;
  return std::get<std::vector<double>>(f);
}

std::string episode_jsonl(const EpisodeRecord& rec, std::size_t rep) {
  std::string out;
  for (const RoundRecord& r : rec.rounds()) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["rep"] = rep;
    j["t"] = r.t;
    j["x"] = decision_json(r.decision);
    j["phi"] = feedback_json(r.feedback);
    j["regret"] = r.regret;
    j["posterior_entropy"] = r.entropy ? ojson(*r.entropy) : ojson(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> count_decisions(const EpisodeRecord& rec, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (const RoundRecord& r : rec.rounds()) ++counts.at(std::get<std::size_t>(r.decision));
  return counts;
}

ReplicationResult finish(std::size_t rep, const EpisodeRecord& rec, bool keep_rounds) {
  ReplicationResult out;
  out.rep = rep;
  out.cumulative.assign(rec.cumulative().begin(), rec.cumulative().end());
  if (keep_rounds) out.jsonl = episode_jsonl(rec, rep);
  return out;
}

ReplicationResult run_mab(const ExperimentConfig& cfg, std::size_t rep, RngStream& rng,
                          bool keep_rounds) {
  const MabParams& p = cfg.mab;
  const std::size_t k = p.means.size();
  BanditEnv env = p.env_kind == EnvKind::Gaussian   ? BanditEnv::gaussian(p.means, p.noise_sd)
                  : p.env_kind == EnvKind::Bernoulli ? BanditEnv::bernoulli(p.means)
                                                     : BanditEnv::bounded(p.means, p.half_width);
  MabModel model;
  model.sigma = p.sigma;
  model.solver.tolerance = p.tolerance;
  if (cfg.family == Family::MabLipschitz) {
    model.lipschitz = LipschitzStructure{p.lipschitz, line_distances(p.positions)};
  }
  const Belief prior = prior_from_weights(p.prior_weights, k);

  EpisodeRecord rec = p.policy == "gaussian_ts"
                          ? run_baseline_episode(cfg.horizon, p.baseline_sigma, env, rng)
                          : run_episode(k, cfg.horizon, prior, model, env, rng);
  ReplicationResult out = finish(rep, rec, keep_rounds);
  out.decision_counts = count_decisions(rec, k);
  if (p.policy == "mints") {
    ArmStats stats(k);
    for (const RoundRecord& r : rec.rounds()) {
      stats.update(std::get<std::size_t>(r.decision), std::get<double>(r.feedback));
    }
    out.posterior_mode = mab_posterior(stats, prior, model).mode_index();
  }
  return out;
}

ReplicationResult run_pricing(const ExperimentConfig& cfg, std::size_t rep, RngStream& rng,
                              bool keep_rounds) {
  const PricingParams& p = cfg.pricing;
  const PriceGrid grid{p.prices, p.lipschitz};
  const ValuationModel model = p.valuation == "uniform"
                                   ? ValuationModel::uniform(p.low, p.high)
                                   : ValuationModel::piecewise_linear(p.knots_x, p.knots_cdf);
  SolverOptions opts;
  opts.tolerance = p.tolerance;
  const Belief prior = prior_from_weights(p.prior_weights, grid.size());
  PricingEpisode ep = run_pricing_episode(grid, model, prior, cfg.horizon, rng, p.hypothesis, opts);
  ReplicationResult out = finish(rep, ep.record, keep_rounds);
  out.decision_counts = count_decisions(ep.record, grid.size());
  out.posterior_mode = ep.final_posterior.mode_index();
  return out;
}

ReplicationResult run_continuum(const ExperimentConfig& cfg, std::size_t rep, RngStream& rng,
                                bool keep_rounds) {
  const ContinuumParams& p = cfg.continuum;
  const LipschitzSpec spec{p.lipschitz, p.sigma};
  const PriorSampler prior = uniform_prior(p.dim);
  auto f = [&](const std::vector<double>& x) {
    return p.height - p.slope * euclidean_distance(x, p.peak);
  };
  ContinuumDataset data;
  data.dim = p.dim;
  EpisodeRecord rec;
  for (std::size_t t = 1; t <= cfg.horizon; ++t) {
    SampleResult s = p.noiseless ? sample_noiseless(prior, data, p.lipschitz, rng, p.max_attempts)
                                 : sample_gaussian(prior, data, spec, rng, p.max_attempts);
    const double fx = f(s.x);
    const double noise = rng.normal();  // always drawn, so the stream layout is fixed
    const double phi = fx + p.noise_sd * noise;
    data.add(s.x, phi);
    rec.push(RoundRecord{t, s.x, phi, p.height - fx, std::nullopt});
  }
  return finish(rep, rec, keep_rounds);
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

ReplicationResult run_cog(const ExperimentConfig& cfg, std::size_t rep, bool keep_rounds) {
  const CogParams& p = cfg.cog;
  const SubgradientOracle oracle = diagonal_quadratic(to_eigen(p.center), to_eigen(p.curvature));
  Eigen::VectorXd best(2);
  for (int k = 0; k < 2; ++k) best[k] = std::clamp(p.center[k], p.lower[k], p.upper[k]);
  const double fstar = oracle(best).value;
  const Polygon2D start = Polygon2D::box({p.lower[0], p.lower[1]}, {p.upper[0], p.upper[1]});
  const auto steps = cog_run(oracle, start, cfg.horizon);
  EpisodeRecord rec;
  double prev_area = area(start);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const CogStep& s = steps[i];
    const Eigen::VectorXd g = oracle(Eigen::Vector2d(s.x.x, s.x.y)).subgradient;
    rec.push(RoundRecord{i + 1, std::vector<double>{s.x.x, s.x.y}, to_std(g), s.value - fstar,
                         std::log(prev_area)});
    prev_area = area(s.region);
  }
  return finish(rep, rec, keep_rounds);
}

ReplicationResult run_ellipsoid(const ExperimentConfig& cfg, std::size_t rep, bool keep_rounds) {
  const EllipsoidParams& p = cfg.ellipsoid;
  const SubgradientOracle oracle = diagonal_quadratic(to_eigen(p.center), to_eigen(p.curvature));
  const Ellipsoid start = Ellipsoid::ball(to_eigen(p.start_center), p.start_radius);
  const auto steps = ellipsoid_run(oracle, start, cfg.horizon);
  EpisodeRecord rec;
  double prev_volume = start.volume();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const EllipsoidStep& s = steps[i];
    rec.push(RoundRecord{i + 1, to_std(s.x), to_std(oracle(s.x).subgradient), s.value,
                         std::log(prev_volume)});
    prev_volume = s.region.volume();
  }
  return finish(rep, rec, keep_rounds);
}

std::string csv_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double ReplicationResult::regret_at(std::size_t t) const {
  if (cumulative.empty() || t == 0) return 0.0;
  return cumulative[std::min(t, cumulative.size()) - 1];
}

std::vector<std::size_t> checkpoint_times(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t d : {8u, 4u, 2u, 1u}) {
    const std::size_t t = std::max<std::size_t>(1, horizon / d);
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

ReplicationResult run_replication(const ExperimentConfig& cfg, std::size_t rep, bool keep_rounds) {
  RngStream rng = RngStream(cfg.seed).split(rep);
  switch (cfg.family) {
    case Family::Mab:
    case Family::MabLipschitz:
      return run_mab(cfg, rep, rng, keep_rounds);
    case Family::Pricing:
      return run_pricing(cfg, rep, rng, keep_rounds);
    case Family::LipschitzContinuum:
      return run_continuum(cfg, rep, rng, keep_rounds);
    case Family::Cog:
      return run_cog(cfg, rep, keep_rounds);
    case Family::Ellipsoid:
      return run_ellipsoid(cfg, rep, keep_rounds);
  }
  throw RunError("unknown family");
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.config = cfg;
  summary.hash = config_hash(cfg);
  const std::size_t reps = cfg.replications;
  summary.replications.resize(reps);
  std::vector<std::exception_ptr> errors(reps);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        summary.replications[r] = run_replication(cfg, r, opts.keep_rounds);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, reps));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t r = 0; r < reps; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const std::exception& e) {
      throw RunError("replication " + std::to_string(r) + ": " + e.what());
    }
  }

  for (std::size_t t : checkpoint_times(cfg.horizon)) {
    std::vector<double> xs;
    xs.reserve(reps);
    for (const auto& rr : summary.replications) xs.push_back(rr.regret_at(t));
    const auto [m, se] = mean_and_stderr(xs);
    summary.checkpoints.push_back({t, m, se});
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

std::string rounds_jsonl(const RunSummary& s) {
  std::string out;
  for (const auto& r : s.replications) out += r.jsonl;
  return out;
}

std::string summary_csv(const RunSummary& s) {
  std::string out = "schema_version,rep,rounds,final_regret,decision_counts,posterior_mode\n";
  for (const auto& r : s.replications) {
    out += std::to_string(kSchemaVersion) + ',' + std::to_string(r.rep) + ',' +
           std::to_string(r.cumulative.size()) + ',' + format_double(r.final_regret()) + ',' +
           csv_list(r.decision_counts) + ',' +
           (r.posterior_mode ? std::to_string(*r.posterior_mode) : std::string()) + '\n';
  }
  return out;
}

std::string checkpoints_csv(const RunSummary& s) {
  std::string out = "schema_version,t,mean_regret,stderr_regret\n";
  for (const auto& c : s.checkpoints) {
    out += std::to_string(kSchemaVersion) + ',' + std::to_string(c.t) + ',' + format_double(c.mean) +
           ',' + format_double(c.stderr_mean) + '\n';
  }
  return out;
}

std::string run_json(const RunSummary& s) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["family"] = to_string(s.config.family);
  j["policy"] = s.config.policy();
  j["config_hash"] = hex64(s.hash);
  j["seed"] = s.config.seed;
  j["replications"] = s.config.replications;
  j["horizon"] = s.config.horizon;
  ojson cps = ojson::array();
  for (const auto& c : s.checkpoints) {
    cps.push_back({{"t", c.t}, {"mean_regret", c.mean}, {"stderr_regret", c.stderr_mean}});
  }
  j["checkpoints"] = cps;
  std::vector<double> finals;
  for (const auto& r : s.replications) finals.push_back(r.final_regret());
  const auto [m, se] = mean_and_stderr(finals);
  j["final_regret"] = {{"mean", m}, {"stderr", se}};
  j["warnings"] = s.config.warnings;
  j["files"] = {"rounds.jsonl", "summary.csv", "checkpoints.csv", "run.json"};
  j["config"] = canonical_config(s.config);
  return j.dump(2) + "\n";
}

void write_outputs(const RunSummary& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw RunError("cannot open " + (dir / name).string() + " for writing");
    f << text;
    if (!f) throw RunError("failed writing " + (dir / name).string());
  };
  write("rounds.jsonl", rounds_jsonl(s));
  write("summary.csv", summary_csv(s));
  write("checkpoints.csv", checkpoints_csv(s));
  write("run.json", run_json(s));
}

}  // namespace mints::harness
