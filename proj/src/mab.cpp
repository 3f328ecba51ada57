#include "mints/mab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mints {

ArmStats::ArmStats(std::vector<std::size_t> pulls, std::vector<double> mean)
    : pulls_(std::move(pulls)), mean_(std::move(mean)) {
  if (pulls_.size() != mean_.size()) throw Error("ArmStats: pulls and means differ in length");
  for (std::size_t j = 0; j < pulls_.size(); ++j) {
    if (!std::isfinite(mean_[j])) throw Error("ArmStats: non-finite mean");
    if (pulls_[j] == 0) mean_[j] = 0.0;
  }
}

std::size_t ArmStats::total_pulls() const {
  std::size_t n = 0;
  for (auto p : pulls_) n += p;
  return n;
}

void ArmStats::update(std::size_t j, double reward) {
  ++pulls_.at(j);
  mean_[j] += (reward - mean_[j]) / static_cast<double>(pulls_[j]);
}

ArmStats ArmStats::shifted(double c) const {
  ArmStats out = *this;
  for (std::size_t j = 0; j < arms(); ++j) {
    if (pulls_[j] > 0) out.mean_[j] += c;
  }
  return out;
}

QuadObjective ArmStats::objective() const {
  QuadObjective obj;
  obj.weights.reserve(arms());
  for (auto p : pulls_) obj.weights.push_back(static_cast<double>(p));
  obj.targets = mean_;
  return obj;
}

void MabModel::validate(std::size_t arms) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("MabModel: sigma must be > 0");
  if (!lipschitz) return;
  const auto& lip = *lipschitz;
  if (!(lip.M > 0.0)) throw Error("MabModel: Lipschitz constant must be > 0");
  const auto& d = lip.distance;
  if (d.size() != arms) throw Error("MabModel: distance matrix must be K x K");
  for (std::size_t i = 0; i < arms; ++i) {
    if (d[i].size() != arms) throw Error("MabModel: distance matrix must be K x K");
    if (d[i][i] != 0.0) throw Error("MabModel: distance matrix needs a zero diagonal");
  }
  for (std::size_t i = 0; i < arms; ++i) {
    for (std::size_t j = 0; j < arms; ++j) {
      if (!(d[i][j] >= 0.0)) throw Error("MabModel: distances must be >= 0");
      if (std::abs(d[i][j] - d[j][i]) > 1e-9) throw Error("MabModel: distance matrix not symmetric");
      for (std::size_t k = 0; k < arms; ++k) {
        if (d[i][k] > d[i][j] + d[j][k] + 1e-9) {
          throw Error("MabModel: distances violate the triangle inequality");
        }
      }
    }
  }
}

std::vector<std::vector<double>> line_distances(const std::vector<double>& positions) {
  const std::size_t k = positions.size();
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) d[i][j] = std::abs(positions[i] - positions[j]);
  }
  return d;
}

// ---------------------------------------------------------------------------

BanditEnv::BanditEnv(EnvKind kind, std::vector<double> means, double scale)
    : kind_(kind), means_(std::move(means)), scale_(scale) {
  if (means_.empty()) throw Error("BanditEnv: no arms");
  for (double m : means_) {
    if (!std::isfinite(m)) throw Error("BanditEnv: non-finite mean");
  }
  best_ = *std::max_element(means_.begin(), means_.end());
  gaps_.reserve(means_.size());
  for (double m : means_) gaps_.push_back(best_ - m);
}

BanditEnv BanditEnv::gaussian(std::vector<double> means, double noise_sd) {
  if (!(noise_sd >= 0.0)) throw Error("BanditEnv: noise_sd must be >= 0");
  return BanditEnv(EnvKind::Gaussian, std::move(means), noise_sd);
}

BanditEnv BanditEnv::bernoulli(std::vector<double> probs) {
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("BanditEnv: Bernoulli means must lie in [0, 1]");
  }
  return BanditEnv(EnvKind::Bernoulli, std::move(probs), 0.5);
}

BanditEnv BanditEnv::bounded(std::vector<double> means, double half_width) {
  if (!(half_width >= 0.0)) throw Error("BanditEnv: half_width must be >= 0");
  return BanditEnv(EnvKind::Bounded, std::move(means), half_width);
}

BanditEnv BanditEnv::shifted(double c) const {
  if (kind_ == EnvKind::Bernoulli) throw Error("BanditEnv::shifted: Bernoulli rewards cannot shift");
  std::vector<double> m = means_;
  for (double& x : m) x += c;
  return BanditEnv(kind_, std::move(m), scale_);
}

double BanditEnv::pull(std::size_t j, RngStream& rng) const {
  const double mu = means_.at(j);
  switch (kind_) {
    case EnvKind::Gaussian:
      return mu + scale_ * rng.normal();
    case EnvKind::Bernoulli:
      return rng.bernoulli(mu) ? 1.0 : 0.0;
    case EnvKind::Bounded:
      return mu + scale_ * (2.0 * rng.uniform() - 1.0);
  }
  return mu;
}

std::optional<std::string> BanditEnv::sub_gaussian_warning() const {
  if (kind_ == EnvKind::Gaussian && scale_ > 1.0) {
    return "noise_sd " + std::to_string(scale_) + " > 1: rewards are not 1-sub-Gaussian";
  }
  if (kind_ == EnvKind::Bounded && scale_ > 1.0) {
    return "half_width " + std::to_string(scale_) + " > 1: rewards are not 1-sub-Gaussian";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

ConstraintSet lipschitz_rows(const LipschitzStructure& lip, std::size_t arms) {
  ConstraintSet cons(arms);
  for (std::size_t i = 0; i < arms; ++i) {
    for (std::size_t k = i + 1; k < arms; ++k) {
      const double b = lip.M * lip.distance[i][k];
      cons.add_difference(i, k, b);
      cons.add_difference(k, i, b);
    }
  }
  return cons;
}

double lipschitz_lambda(const QuadObjective& obj, const ConstraintSet& lip_rows, std::size_t j,
                        const MabModel& model) {
  ConstraintSet cons(obj.dimension());
  for (std::size_t k = 0; k < obj.dimension(); ++k) {
    if (k != j) cons.add_difference(k, j, 0.0);
  }
  cons.append(lip_rows);
  const auto res = solve_qp(obj, cons, model.solver);
  if (res.status != SolveStatus::Optimal) {
    throw SolverError(std::string("profile_neg_loglik: QP ended with status ") +
                      to_string(res.status));
  }
  return res.value;
}

}  // namespace

double profile_neg_loglik(const ArmStats& stats, std::size_t j, const MabModel& model) {
  if (j >= stats.arms()) throw Error("profile_neg_loglik: arm index out of range");
  if (stats.total_pulls() == 0) return 0.0;
  const double scale = 2.0 * model.sigma * model.sigma;
  const QuadObjective obj = stats.objective();
  if (!model.lipschitz) return min_profile_ssq(obj, j).first / scale;
  return lipschitz_lambda(obj, lipschitz_rows(*model.lipschitz, stats.arms()), j, model) / scale;
}

std::vector<double> profile_neg_loglik_all(const ArmStats& stats, const MabModel& model) {
  const std::size_t k = stats.arms();
  std::vector<double> out(k, 0.0);
  if (stats.total_pulls() == 0) return out;
  const double scale = 2.0 * model.sigma * model.sigma;
  const QuadObjective obj = stats.objective();
  if (!model.lipschitz) {
    out = min_profile_ssq_all(obj);
  } else {
    const ConstraintSet lip = lipschitz_rows(*model.lipschitz, k);
    for (std::size_t j = 0; j < k; ++j) out[j] = lipschitz_lambda(obj, lip, j, model);
  }
  for (double& x : out) x /= scale;
  return out;
}

Belief mab_posterior(const ArmStats& stats, const Belief& prior, const MabModel& model) {
  if (prior.size() != stats.arms()) throw Error("mab_posterior: prior size differs from arm count");
  std::vector<double> loglik = profile_neg_loglik_all(stats, model);
  for (double& x : loglik) x = -x;
  return posterior_from_log_weights(loglik, log_weights(prior));
}

Belief two_arm_closed_form(const ArmStats& stats, double sigma, const Belief& prior) {
  if (stats.arms() != 2 || prior.size() != 2) throw Error("two_arm_closed_form: needs K = 2");
  if (stats.pulls(0) == 0 || stats.pulls(1) == 0) {
    throw Error("two_arm_closed_form: both arms must be pulled");
  }
  const double n0 = static_cast<double>(stats.pulls(0));
  const double n1 = static_cast<double>(stats.pulls(1));
  const double diff = stats.mean(0) - stats.mean(1);
  const double alpha = diff * diff / (2.0 * sigma * sigma * (1.0 / n0 + 1.0 / n1));
  // The empirically better arm gains a factor e^alpha over the other.
  std::vector<double> loglik{0.0, 0.0};
  loglik[diff >= 0.0 ? 1 : 0] = -alpha;
  return posterior_from_log_weights(loglik, log_weights(prior));
}

MabStep mints_step(const ArmStats& stats, const Belief& prior, const MabModel& model,
                   const BanditEnv& env, RngStream& rng) {
  const Belief q = mab_posterior(stats, prior, model);
  MabStep out{stats, sample_from_belief(q, rng), 0.0, q.entropy()};
  out.reward = env.pull(out.arm, rng);
  out.stats.update(out.arm, out.reward);
  return out;
}

double baseline_posterior_variance(std::size_t pulls, double sigma) {
  return 1.0 / (1.0 + static_cast<double>(pulls) / (sigma * sigma));
}

MabStep baseline_gaussian_ts_step(const ArmStats& stats, double sigma, const BanditEnv& env,
                                  RngStream& rng) {
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < stats.arms(); ++j) {
    const double var = baseline_posterior_variance(stats.pulls(j), sigma);
    const double mean = var * static_cast<double>(stats.pulls(j)) * stats.mean(j) / (sigma * sigma);
    const double index = mean + std::sqrt(var) * rng.normal();
    if (index > best_index) {
      best_index = index;
      best = j;
    }
  }
  MabStep out{stats, best, 0.0, 0.0};
  out.reward = env.pull(best, rng);
  out.stats.update(best, out.reward);
  return out;
}

EpisodeRecord run_episode(std::size_t arms, std::size_t horizon, const Belief& prior,
                          const MabModel& model, const BanditEnv& env, RngStream& rng) {
  if (horizon == 0) throw Error("run_episode: horizon must be >= 1");
  if (env.arms() != arms || prior.size() != arms) throw Error("run_episode: arm count mismatch");
  model.validate(arms);
  EpisodeRecord rec;
  ArmStats stats(arms);
  for (std::size_t t = 1; t <= horizon; ++t) {
    MabStep s = mints_step(stats, prior, model, env, rng);
    rec.push(RoundRecord{t, s.arm, s.reward, env.gaps()[s.arm], s.entropy});
    stats = std::move(s.stats);
  }
  return rec;
}

EpisodeRecord run_baseline_episode(std::size_t horizon, double sigma, const BanditEnv& env,
                                   RngStream& rng) {
  if (horizon == 0) throw Error("run_baseline_episode: horizon must be >= 1");
  if (!(sigma > 0.0)) throw Error("run_baseline_episode: sigma must be > 0");
  EpisodeRecord rec;
  ArmStats stats(env.arms());
  for (std::size_t t = 1; t <= horizon; ++t) {
    MabStep s = baseline_gaussian_ts_step(stats, sigma, env, rng);
    rec.push(RoundRecord{t, s.arm, s.reward, env.gaps()[s.arm], std::nullopt});
    stats = std::move(s.stats);
  }
  return rec;
}

}  // namespace mints
