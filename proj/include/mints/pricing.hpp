#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mints/core.hpp"
#include "mints/rng.hpp"
#include "mints/solvers.hpp"

namespace mints {

/// Increasing positive prices and the Lipschitz constant of the demand curve
/// (M may be +inf, which drops the Lipschitz rows).
struct PriceGrid {
  std::vector<double> prices;
  double lipschitz_M = 1.0;

  std::size_t size() const { return prices.size(); }
  void validate() const;
};

/// Buyer valuation distribution. A sale happens iff price <= valuation.
class ValuationModel {
 public:
  static ValuationModel uniform(double low, double high);
  /// CDF linear between knots, F = 0 left of the first knot (an atom of size
  /// cdf.front() sits there) and cdf.back() must be 1.
  static ValuationModel piecewise_linear(std::vector<double> knots_x, std::vector<double> knots_cdf);

  /// theta_x = P(valuation >= x), exact.
  double demand(double price) const;
  double revenue(double price) const { return price * demand(price); }
  /// Inverse-CDF draw; consumes one word.
  double sample(RngStream& rng) const;

 private:
  ValuationModel(std::vector<double> x, std::vector<double> cdf);

  std::vector<double> x_;
  std::vector<double> cdf_;
};

/// Purchase indicator for one buyer at `price`.
double simulate_demand(const ValuationModel& model, double price, RngStream& rng);

/// Per-price sale counts and purchase frequencies.
class PricingStats {
 public:
  explicit PricingStats(std::size_t prices = 0) : counts_(prices, 0.0), freq_(prices, 0.0) {}
  PricingStats(std::vector<double> counts, std::vector<double> freq);

  std::size_t size() const { return counts_.size(); }
  const std::vector<double>& counts() const { return counts_; }
  const std::vector<double>& frequencies() const { return freq_; }
  bool empty() const;
  void update(std::size_t j, double sale);

 private:
  std::vector<double> counts_;
  std::vector<double> freq_;
};

/// Which demand vectors make price j optimal.
enum class Hypothesis {
  Revenue,  // p_j theta_j >= p_k theta_k
  Literal,  // theta_j >= theta_k
};

/// Box [0,1], theta_{j+1} <= theta_j and theta_j - theta_{j+1} <= M (p_{j+1} - p_j).
ConstraintSet pricing_constraint_set(const PriceGrid& grid);

/// Rows stating that price j is optimal.
ConstraintSet hypothesis_rows(const PriceGrid& grid, std::size_t j, Hypothesis h);

struct PricingProfile {
  double loglik = 0.0;
  std::vector<double> theta;  // maximizing demand vector
};

/// Profile Bernoulli log-likelihood of "price j is optimal".
PricingProfile pricing_profile(const PricingStats& stats, const PriceGrid& grid, std::size_t j,
                               Hypothesis h = Hypothesis::Revenue,
                               std::span<const double> warm_start = {},
                               const SolverOptions& opts = {});

double pricing_profile_loglik(const PricingStats& stats, const PriceGrid& grid, std::size_t j,
                              Hypothesis h = Hypothesis::Revenue);

Belief pricing_posterior(const PricingStats& stats, const PriceGrid& grid, const Belief& prior,
                         Hypothesis h = Hypothesis::Revenue);

/// Keeps the previous round's maximizers as warm starts.
class PricingAgent {
 public:
  PricingAgent(PriceGrid grid, Belief prior, Hypothesis h = Hypothesis::Revenue,
               SolverOptions opts = {});

  Belief posterior(const PricingStats& stats);
  const PriceGrid& grid() const { return grid_; }
  const Belief& prior() const { return prior_; }

 private:
  PriceGrid grid_;
  Belief prior_;
  Hypothesis hypothesis_;
  SolverOptions opts_;
  std::vector<std::vector<double>> warm_;
};

struct PricingEpisode {
  EpisodeRecord record;
  PricingStats stats;
  Belief final_posterior;  // after all T observations
};

/// MINTS over the price grid; regret is measured in exact expected revenue
/// against the best grid price.
PricingEpisode run_pricing_episode(const PriceGrid& grid, const ValuationModel& model,
                                   const Belief& prior, std::size_t horizon, RngStream& rng,
                                   Hypothesis h = Hypothesis::Revenue,
                                   const SolverOptions& opts = {});

}  // namespace mints
