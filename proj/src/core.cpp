#include "mints/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mints {

FeedbackKind kind_of(const Feedback& phi) {
  return std::holds_alternative<double>(phi) ? FeedbackKind::Scalar : FeedbackKind::Vector;
}

Dataset append_observation(const Dataset& d, Decision x, Feedback phi) {
  const FeedbackKind k = kind_of(phi);
  if (d.kind_ && *d.kind_ != k) {
    throw KindMismatchError("append_observation: feedback kind differs from dataset kind");
  }
  Dataset out = d;
  out.kind_ = k;
  out.observations_.push_back(Observation{std::move(x), std::move(phi)});
  return out;
}

Belief::Belief(std::vector<std::size_t> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (weights_.empty() || support_.size() != weights_.size()) {
    throw Error("Belief: support and weights must have equal nonzero length");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("Belief: weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error("Belief: weights sum to " + std::to_string(total) + ", expected 1");
  }
}

Belief Belief::uniform(std::size_t k) {
  if (k == 0) throw Error("Belief::uniform: empty support");
  std::vector<std::size_t> support(k);
  std::iota(support.begin(), support.end(), std::size_t{0});
  return Belief(std::move(support), std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Belief Belief::point_mass(std::size_t k, std::size_t at) {
  if (at >= k) throw Error("Belief::point_mass: index out of range");
  std::vector<std::size_t> support(k);
  std::iota(support.begin(), support.end(), std::size_t{0});
  std::vector<double> w(k, 0.0);
  w[at] = 1.0;
  return Belief(std::move(support), std::move(w));
}

std::size_t Belief::mode_index() const {
  return static_cast<std::size_t>(std::max_element(weights_.begin(), weights_.end()) -
                                  weights_.begin());
}

double Belief::entropy() const {
  double h = 0.0;
  for (double w : weights_) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

Belief posterior_from_log_weights(std::span<const double> log_profile_lik,
                                  std::span<const double> log_prior) {
  if (log_profile_lik.size() != log_prior.size()) {
    throw Error("posterior_from_log_weights: length mismatch");
  }
  if (log_profile_lik.empty()) throw Error("posterior_from_log_weights: no candidates");

  const std::size_t k = log_profile_lik.size();
  std::vector<double> total(k);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    const double a = log_profile_lik[j];
    const double b = log_prior[j];
    if (std::isnan(a) || std::isnan(b) || a == std::numeric_limits<double>::infinity() ||
        b == std::numeric_limits<double>::infinity()) {
      throw Error("posterior_from_log_weights: NaN or +inf log-weight");
    }
    total[j] = a + b;  // -inf stays -inf
    top = std::max(top, total[j]);
  }
  if (top == -std::numeric_limits<double>::infinity()) {
    throw EmptyPosteriorError("posterior_from_log_weights: every candidate has zero weight");
  }

  std::vector<double> w(k);
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    w[j] = std::exp(total[j] - top);  // exp(-inf) == 0
    sum += w[j];
  }
  for (double& x : w) x /= sum;

  std::vector<std::size_t> support(k);
  std::iota(support.begin(), support.end(), std::size_t{0});
  return Belief(std::move(support), std::move(w));
}

std::vector<double> log_weights(const Belief& b) {
  std::vector<double> out(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    out[j] = b[j] > 0.0 ? std::log(b[j]) : -std::numeric_limits<double>::infinity();
  }
  return out;
}

std::size_t sample_from_belief(const Belief& b, RngStream& rng) {
  return b.support()[rng.categorical(b.weights())];
}

double total_variation(const Belief& a, const Belief& b) {
  if (a.size() != b.size()) throw Error("total_variation: size mismatch");
  double tv = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) tv += std::abs(a[j] - b[j]);
  return 0.5 * tv;
}

void EpisodeRecord::push(RoundRecord r) {
  const double prev = total_regret();
  cumulative_.push_back(prev + r.regret);
  rounds_.push_back(std::move(r));
}

}  // namespace mints
