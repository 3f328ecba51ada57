#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mints/errors.hpp"
#include "mints/rng.hpp"

namespace mints {

/// Arm / price index, or a point in [0,1]^d.
using Decision = std::variant<std::size_t, std::vector<double>>;
/// Reward, demand bit, or function value; or a subgradient vector.
using Feedback = std::variant<double, std::vector<double>>;

enum class FeedbackKind { Scalar, Vector };

FeedbackKind kind_of(const Feedback& phi);

struct Observation {
  Decision decision;
  Feedback feedback;
};

/// Append-only history of (decision, feedback) pairs in round order.
class Dataset {
 public:
  Dataset() = default;

  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }
  std::span<const Observation> observations() const { return observations_; }
  /// Fixed by the first observation; empty before that.
  std::optional<FeedbackKind> kind() const { return kind_; }

 private:
  friend Dataset append_observation(const Dataset& d, Decision x, Feedback phi);

  std::vector<Observation> observations_;
  std::optional<FeedbackKind> kind_;
};

/// Returns a copy of `d` with (x, phi) appended. Throws KindMismatchError when
/// phi's kind differs from the kind already recorded in `d`.
Dataset append_observation(const Dataset& d, Decision x, Feedback phi);

/// Probability weights over a finite set of candidate optima.
///
/// Invariants: support and weights have equal nonzero length, every weight is
/// nonnegative and the weights sum to one within 1e-12.
class Belief {
 public:
  Belief(std::vector<std::size_t> support, std::vector<double> weights);

  static Belief uniform(std::size_t k);
  static Belief point_mass(std::size_t k, std::size_t at);

  std::size_t size() const { return weights_.size(); }
  std::span<const std::size_t> support() const { return support_; }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

  /// Index (into the support) of the largest weight; lowest index on ties.
  std::size_t mode_index() const;
  /// Shannon entropy in nats.
  double entropy() const;

 private:
  std::vector<std::size_t> support_;
  std::vector<double> weights_;
};

/// Generalized-Bayes reweighting: weights proportional to
/// exp(log_profile_lik[j] + log_prior[j]), normalized with max-subtraction.
/// Entries may be -inf (impossible candidates). The support is 0..K-1.
Belief posterior_from_log_weights(std::span<const double> log_profile_lik,
                                  std::span<const double> log_prior);

/// Elementwise log of the prior weights (-inf where a weight is zero).
std::vector<double> log_weights(const Belief& b);

/// Draws support[i] with probability weights[i] using one categorical draw.
std::size_t sample_from_belief(const Belief& b, RngStream& rng);

/// Total variation distance between two beliefs over the same support.
double total_variation(const Belief& a, const Belief& b);

/// Per-round trace of a sequential decision episode.
struct RoundRecord {
  std::size_t t = 0;  // 1-based round index
  Decision decision;
  Feedback feedback;
  double regret = 0.0;                 // instantaneous regret of this decision
  std::optional<double> entropy;       // of the belief the decision was drawn from
};

class EpisodeRecord {
 public:
  void push(RoundRecord r);

  std::size_t size() const { return rounds_.size(); }
  std::span<const RoundRecord> rounds() const { return rounds_; }
  /// cumulative()[t-1] == R(t).
  std::span<const double> cumulative() const { return cumulative_; }
  double total_regret() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

 private:
  std::vector<RoundRecord> rounds_;
  std::vector<double> cumulative_;
};

}  // namespace mints
