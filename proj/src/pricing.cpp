#include "mints/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mints {

void PriceGrid::validate() const {
  if (prices.empty()) throw Error("PriceGrid: no prices");
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (!(prices[j] > 0.0) || !std::isfinite(prices[j])) throw Error("PriceGrid: prices must be > 0");
    if (j > 0 && !(prices[j] > prices[j - 1])) {
      throw Error("PriceGrid: prices must be strictly increasing");
    }
  }
  if (!(lipschitz_M > 0.0)) throw Error("PriceGrid: Lipschitz constant must be > 0");
}

// ---------------------------------------------------------------------------

ValuationModel::ValuationModel(std::vector<double> x, std::vector<double> cdf)
    : x_(std::move(x)), cdf_(std::move(cdf)) {}

ValuationModel ValuationModel::uniform(double low, double high) {
  if (!(high > low) || !std::isfinite(low) || !std::isfinite(high)) {
    throw Error("ValuationModel: uniform needs low < high");
  }
  return ValuationModel({low, high}, {0.0, 1.0});
}

ValuationModel ValuationModel::piecewise_linear(std::vector<double> knots_x,
                                                std::vector<double> knots_cdf) {
  if (knots_x.size() < 2 || knots_x.size() != knots_cdf.size()) {
    throw Error("ValuationModel: need at least two knots with matching CDF values");
  }
  for (std::size_t i = 0; i < knots_x.size(); ++i) {
    if (!std::isfinite(knots_x[i])) throw Error("ValuationModel: non-finite knot");
    if (i > 0 && !(knots_x[i] > knots_x[i - 1])) {
      throw Error("ValuationModel: knots must be strictly increasing");
    }
    if (!(knots_cdf[i] >= 0.0 && knots_cdf[i] <= 1.0)) {
      throw Error("ValuationModel: CDF values must lie in [0, 1]");
    }
    if (i > 0 && knots_cdf[i] < knots_cdf[i - 1]) {
      throw Error("ValuationModel: CDF must be nondecreasing");
    }
  }
  if (knots_cdf.back() != 1.0) throw Error("ValuationModel: CDF must reach 1 at the last knot");
  return ValuationModel(std::move(knots_x), std::move(knots_cdf));
}

double ValuationModel::demand(double price) const {
  // P(v >= x) = 1 - F(x-); the only atom is at the first knot.
  if (price <= x_.front()) return 1.0;
  if (price >= x_.back()) return 0.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), price);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin());
  const double w = (price - x_[i - 1]) / (x_[i] - x_[i - 1]);
  const double f = cdf_[i - 1] + w * (cdf_[i] - cdf_[i - 1]);
  return std::clamp(1.0 - f, 0.0, 1.0);
}

double ValuationModel::sample(RngStream& rng) const {
  const double u = rng.uniform();
  if (u < cdf_.front()) return x_.front();
  // Smallest x with F(x) >= u; the segment where the CDF first exceeds u.
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (cdf_[i] > u) {
      const double w = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
      return x_[i - 1] + w * (x_[i] - x_[i - 1]);
    }
  }
  return x_.back();
}

double simulate_demand(const ValuationModel& model, double price, RngStream& rng) {
  return price <= model.sample(rng) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------

PricingStats::PricingStats(std::vector<double> counts, std::vector<double> freq)
    : counts_(std::move(counts)), freq_(std::move(freq)) {
  if (counts_.size() != freq_.size()) throw Error("PricingStats: length mismatch");
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    if (!(counts_[j] >= 0.0)) throw Error("PricingStats: counts must be >= 0");
    if (!(freq_[j] >= 0.0 && freq_[j] <= 1.0)) throw Error("PricingStats: frequencies must lie in [0, 1]");
  }
}

bool PricingStats::empty() const {
  return std::all_of(counts_.begin(), counts_.end(), [](double n) { return n == 0.0; });
}

void PricingStats::update(std::size_t j, double sale) {
  counts_.at(j) += 1.0;
  freq_[j] += (sale - freq_[j]) / counts_[j];
}

// ---------------------------------------------------------------------------

namespace {

// Monotone and Lipschitz rows only; the solver adds its own [delta, 1 - delta] box.
ConstraintSet shape_rows(const PriceGrid& grid) {
  const std::size_t k = grid.size();
  ConstraintSet cons(k);
  for (std::size_t j = 0; j + 1 < k; ++j) {
    cons.add_difference(j + 1, j, 0.0);
    if (std::isfinite(grid.lipschitz_M)) {
      cons.add_difference(j, j + 1, grid.lipschitz_M * (grid.prices[j + 1] - grid.prices[j]));
    }
  }
  return cons;
}

}  // namespace

ConstraintSet pricing_constraint_set(const PriceGrid& grid) {
  grid.validate();
  ConstraintSet cons(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    cons.add_lower(j, 0.0);
    cons.add_upper(j, 1.0);
  }
  cons.append(shape_rows(grid));
  return cons;
}

ConstraintSet hypothesis_rows(const PriceGrid& grid, std::size_t j, Hypothesis h) {
  const std::size_t k = grid.size();
  if (j >= k) throw Error("hypothesis_rows: price index out of range");
  ConstraintSet cons(k);
  std::vector<double> a(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (i == j) continue;
    std::fill(a.begin(), a.end(), 0.0);
    if (h == Hypothesis::Revenue) {
      a[i] = grid.prices[i];
      a[j] = -grid.prices[j];
    } else {
      a[i] = 1.0;
      a[j] = -1.0;
    }
    cons.add_row(a, 0.0);
  }
  return cons;
}

PricingProfile pricing_profile(const PricingStats& stats, const PriceGrid& grid, std::size_t j,
                               Hypothesis h, std::span<const double> warm_start,
                               const SolverOptions& opts) {
  grid.validate();
  if (stats.size() != grid.size()) throw Error("pricing_profile: stats size differs from grid");
  if (j >= grid.size()) throw Error("pricing_profile: price index out of range");
  ConstraintSet cons = shape_rows(grid);
  cons.append(hypothesis_rows(grid, j, h));
  const SolveResult res =
      max_bernoulli_loglik(stats.counts(), stats.frequencies(), cons, opts, warm_start);
  if (res.status != SolveStatus::Optimal) {
    throw SolverError("pricing_profile: hypothesis " + std::to_string(j) + " ended with status " +
                      to_string(res.status));
  }
  return {res.value, res.argmin};
}

double pricing_profile_loglik(const PricingStats& stats, const PriceGrid& grid, std::size_t j,
                              Hypothesis h) {
  return pricing_profile(stats, grid, j, h).loglik;
}

Belief pricing_posterior(const PricingStats& stats, const PriceGrid& grid, const Belief& prior,
                         Hypothesis h) {
  PricingAgent agent(grid, prior, h);
  return agent.posterior(stats);
}

PricingAgent::PricingAgent(PriceGrid grid, Belief prior, Hypothesis h, SolverOptions opts)
    : grid_(std::move(grid)), prior_(std::move(prior)), hypothesis_(h), opts_(opts),
      warm_(grid_.size()) {
  grid_.validate();
  if (prior_.size() != grid_.size()) throw Error("PricingAgent: prior size differs from grid");
}

Belief PricingAgent::posterior(const PricingStats& stats) {
  const std::size_t k = grid_.size();
  if (stats.empty()) return posterior_from_log_weights(std::vector<double>(k, 0.0), log_weights(prior_));
  std::vector<double> loglik(k);
  for (std::size_t j = 0; j < k; ++j) {
    PricingProfile p = pricing_profile(stats, grid_, j, hypothesis_, warm_[j], opts_);
    loglik[j] = p.loglik;
    warm_[j] = std::move(p.theta);
  }
  return posterior_from_log_weights(loglik, log_weights(prior_));
}

PricingEpisode run_pricing_episode(const PriceGrid& grid, const ValuationModel& model,
                                   const Belief& prior, std::size_t horizon, RngStream& rng,
                                   Hypothesis h, const SolverOptions& opts) {
  if (horizon == 0) throw Error("run_pricing_episode: horizon must be >= 1");
  PricingAgent agent(grid, prior, h, opts);
  const std::size_t k = grid.size();
  std::vector<double> revenue(k);
  for (std::size_t j = 0; j < k; ++j) revenue[j] = model.revenue(grid.prices[j]);
  const double best = *std::max_element(revenue.begin(), revenue.end());

  PricingStats stats(k);
  EpisodeRecord rec;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Belief q = agent.posterior(stats);
    const std::size_t j = sample_from_belief(q, rng);
    const double sale = simulate_demand(model, grid.prices[j], rng);
    stats.update(j, sale);
    rec.push(RoundRecord{t, j, sale, best - revenue[j], q.entropy()});
  }
  Belief final_q = agent.posterior(stats);
  return {std::move(rec), std::move(stats), std::move(final_q)};
}

}  // namespace mints
