#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mints/core.hpp"
#include "mints/rng.hpp"
#include "mints/solvers.hpp"

namespace mints {

/// Per-arm pull counts and streaming empirical means (mean is 0 when unpulled).
class ArmStats {
 public:
  explicit ArmStats(std::size_t arms = 0) : pulls_(arms, 0), mean_(arms, 0.0) {}
  ArmStats(std::vector<std::size_t> pulls, std::vector<double> mean);

  std::size_t arms() const { return pulls_.size(); }
  std::size_t pulls(std::size_t j) const { return pulls_[j]; }
  double mean(std::size_t j) const { return mean_[j]; }
  const std::vector<std::size_t>& pulls() const { return pulls_; }
  const std::vector<double>& means() const { return mean_; }
  std::size_t total_pulls() const;

  void update(std::size_t j, double reward);
  /// Every mean moved by c (pulled arms only).
  ArmStats shifted(double c) const;
  /// Weights N_k and targets mu_k of the Gaussian least-squares objective.
  QuadObjective objective() const;

 private:
  std::vector<std::size_t> pulls_;
  std::vector<double> mean_;
};

struct LipschitzStructure {
  double M = 1.0;
  std::vector<std::vector<double>> distance;  // d(i, j)
};

struct MabModel {
  double sigma = 1.2;
  std::optional<LipschitzStructure> lipschitz;
  SolverOptions solver;

  /// Checks sigma > 0 and, when present, M > 0 and that d is a K x K metric.
  void validate(std::size_t arms) const;
};

/// Distance matrix |p_i - p_j| for arms placed on a line.
std::vector<std::vector<double>> line_distances(const std::vector<double>& positions);

enum class EnvKind { Gaussian, Bernoulli, Bounded };

/// Stochastic reward environment with known true means.
class BanditEnv {
 public:
  static BanditEnv gaussian(std::vector<double> means, double noise_sd);
  static BanditEnv bernoulli(std::vector<double> probs);
  /// Uniform noise on [-half_width, half_width] around each mean.
  static BanditEnv bounded(std::vector<double> means, double half_width);

  EnvKind kind() const { return kind_; }
  std::size_t arms() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& gaps() const { return gaps_; }
  double best_mean() const { return best_; }
  double scale() const { return scale_; }

  /// Same environment with every reward moved by c (Gaussian and bounded only).
  BanditEnv shifted(double c) const;
  /// One reward; consumes a fixed number of words per kind.
  double pull(std::size_t j, RngStream& rng) const;
  /// Set when rewards are not guaranteed 1-sub-Gaussian.
  std::optional<std::string> sub_gaussian_warning() const;

 private:
  BanditEnv(EnvKind kind, std::vector<double> means, double scale);

  EnvKind kind_;
  std::vector<double> means_;
  std::vector<double> gaps_;
  double best_ = 0.0;
  double scale_ = 0.0;  // noise_sd or half_width
};

/// Lambda(j) = min over Theta_j of sum_k N_k (theta_k - mu_k)^2 / (2 sigma^2).
double profile_neg_loglik(const ArmStats& stats, std::size_t j, const MabModel& model);
/// Lambda for every arm.
std::vector<double> profile_neg_loglik_all(const ArmStats& stats, const MabModel& model);

/// Generalized posterior over the optimal arm.
Belief mab_posterior(const ArmStats& stats, const Belief& prior, const MabModel& model);

/// Two-arm posterior from the analytic likelihood ratio. Needs both arms pulled.
Belief two_arm_closed_form(const ArmStats& stats, double sigma, const Belief& prior);

struct MabStep {
  ArmStats stats;
  std::size_t arm = 0;
  double reward = 0.0;
  double entropy = 0.0;  // of the belief the arm was drawn from
};

/// One MINTS round: draw an arm from the posterior, pull it, update the stats.
MabStep mints_step(const ArmStats& stats, const Belief& prior, const MabModel& model,
                   const BanditEnv& env, RngStream& rng);

/// Conjugate-normal Thompson sampling with N(0, 1) priors and noise scale sigma.
MabStep baseline_gaussian_ts_step(const ArmStats& stats, double sigma, const BanditEnv& env,
                                  RngStream& rng);

/// Posterior variance of an arm's mean under the baseline: 1 / (1 + N / sigma^2).
double baseline_posterior_variance(std::size_t pulls, double sigma);

EpisodeRecord run_episode(std::size_t arms, std::size_t horizon, const Belief& prior,
                          const MabModel& model, const BanditEnv& env, RngStream& rng);

EpisodeRecord run_baseline_episode(std::size_t horizon, double sigma, const BanditEnv& env,
                                   RngStream& rng);

}  // namespace mints
