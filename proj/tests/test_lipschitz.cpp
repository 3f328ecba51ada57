#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mints/lipschitz.hpp"
#include "mints/solvers.hpp"

using namespace mints;

namespace {

ContinuumDataset data1(std::vector<double> xs, std::vector<double> phis) {
  ContinuumDataset d;
  d.dim = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) d.add({xs[i]}, phis[i]);
  return d;
}

PriorSampler fixed(std::vector<double> x) {
  return [x](RngStream&) { return x; };
}

// Exhaustive grid over (v_1..v_t) in [lo, hi] with v chosen on the same grid.
double grid_v_value(double x, const ContinuumDataset& d, double M, double sigma, double lo, double hi,
                    double step) {
  const std::size_t t = d.size();
  const long n = std::lround((hi - lo) / step);
  std::vector<long> idx(t, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<double> v(t);
    for (std::size_t i = 0; i < t; ++i) v[i] = lo + idx[i] * step;
    bool ok = true;
    for (std::size_t i = 0; i < t && ok; ++i)
      for (std::size_t j = i + 1; j < t && ok; ++j)
        ok = std::abs(v[i] - v[j]) <= M * std::abs(d.points[i][0] - d.points[j][0]) + 1e-12;
    if (ok) {
      double vlo = -1e300, vhi = 1e300;
      for (std::size_t i = 0; i < t; ++i) {
        vlo = std::max(vlo, v[i]);
        vhi = std::min(vhi, v[i] + M * std::abs(x - d.points[i][0]));
      }
      const double g = lo + std::ceil((vlo - lo) / step - 1e-9) * step;
      if (g <= vhi + 1e-12) {
        double s = 0.0;
        for (std::size_t i = 0; i < t; ++i) s += (v[i] - d.values[i]) * (v[i] - d.values[i]);
        best = std::min(best, s / (2 * sigma * sigma));
      }
    }
    std::size_t k = 0;
    while (k < t && ++idx[k] > n) idx[k++] = 0;
    if (k == t) break;
  }
  return best;
}

}  // namespace

TEST_CASE("data_consistent") {
  CHECK(data_consistent(data1({0.3}, {5.0}), 1.0));
  ContinuumDataset far;
  far.dim = 2;
  far.add({0.0, 0.0}, 0.0);
  far.add({1.0, 1.0}, 1.0);
  CHECK(data_consistent(far, 1.0));  // distance sqrt 2
  CHECK(data_consistent(data1({0.0, 1.0}, {0.0, 1.0}), 1.0));
  CHECK_FALSE(data_consistent(data1({0.0, 0.5}, {0.0, 1.0}), 1.0));
  CHECK(data_consistent(data1({0.0, 0.5}, {0.0, 1.0}), 1e12));
}

TEST_CASE("s_feasible_noiseless: examples") {
  const ContinuumDataset empty = data1({}, {});
  CHECK(s_feasible_noiseless(std::vector<double>{0.42}, empty, 1.0));
  const ContinuumDataset d = data1({0.0, 1.0}, {0.0, 1.0});
  CHECK(s_feasible_noiseless(std::vector<double>{1.0}, d, 1.0));
  CHECK_FALSE(s_feasible_noiseless(std::vector<double>{0.0}, d, 1.0));
  CHECK_THROWS_AS(s_feasible_noiseless(std::vector<double>{0.5}, data1({0.0, 0.9}, {0.0, 1.0}), 1.0),
                  EmptyPosteriorError);
}

TEST_CASE("s_feasible_noiseless agrees with feasible() on the explicit polytope") {
  RngStream r(10);
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t t = 1 + r.next_u64() % 4;
    ContinuumDataset d;
    d.dim = 1;
    const double amp = 0.3 * r.uniform(), w = 1.0 + 3.0 * r.uniform(), ph = 6.0 * r.uniform();
    for (std::size_t i = 0; i < t; ++i) {
      const double x = r.uniform();
      d.add({x}, amp * std::sin(w * x + ph));  // slope <= 0.3 * 4 < M = 1.5
    }
    for (int g = 0; g <= 64; ++g) {
      const double x = g / 64.0;
      ConstraintSet c(t + 1);
      for (std::size_t i = 0; i < t; ++i) {
        c.add_upper(i + 1, d.values[i]);
        c.add_lower(i + 1, d.values[i]);
        c.add_difference(i + 1, 0, 0.0);
        c.add_difference(0, i + 1, 1.5 * std::abs(x - d.points[i][0]));
      }
      CHECK(s_feasible_noiseless(std::vector<double>{x}, d, 1.5) == feasible(c));
    }
  }
}

TEST_CASE("sample_noiseless") {
  RngStream r(1);
  const SampleResult first = sample_noiseless(uniform_prior(1), data1({}, {}), 1.0, r);
  CHECK(first.attempts == 1);

  // Feasible set is [0.5, 1].
  const ContinuumDataset d = data1({0.0, 1.0}, {0.0, 0.5});
  for (int i = 0; i < 2000; ++i) {
    const SampleResult s = sample_noiseless(uniform_prior(1), d, 1.0, r);
    CHECK(s_feasible_noiseless(s.x, d, 1.0));
    CHECK(s.x[0] >= 0.5);
  }
  CHECK_THROWS_AS(sample_noiseless(fixed({0.3}), d, 1.0, r, 1), SamplerExhaustedError);
  CHECK(sample_noiseless(fixed({1.0}), d, 1.0, r, 1).x[0] == 1.0);
}

TEST_CASE("v_value and v_min: examples") {
  const LipschitzSpec spec{1.0, 1.0};
  CHECK(v_value(std::vector<double>{0.3}, data1({}, {}), spec) == 0.0);
  const ContinuumDataset d = data1({0.0, 1.0}, {0.0, 1.0});
  CHECK(v_value(std::vector<double>{0.0}, d, spec) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(std::abs(grid_v_value(0.0, d, 1.0, 1.0, -2.0, 3.0, 1e-2) - 0.25) < 1e-3);
  CHECK(v_value(std::vector<double>{1.0}, d, spec) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v_min(d, spec) == doctest::Approx(0.0).epsilon(1e-12));

  const ContinuumDataset e = data1({0.0, 0.5}, {0.0, 1.0});
  CHECK(v_min(e, spec) == doctest::Approx(0.0625).epsilon(1e-9));
}

TEST_CASE("v_value properties on random data") {
  RngStream r(44);
  for (int inst = 0; inst < 60; ++inst) {
    const std::size_t t = 1 + r.next_u64() % 3;
    ContinuumDataset d;
    d.dim = 1;
    for (std::size_t i = 0; i < t; ++i) d.add({r.uniform()}, r.uniform());
    const LipschitzSpec spec{0.5 + r.uniform(), 0.5 + r.uniform()};
    const LipschitzSpec wide{2.0 * spec.M, spec.sigma};
    const double vm = v_min(d, spec);
    for (int g = 0; g <= 20; ++g) {
      const std::vector<double> x{g / 20.0};
      const double v = v_value(x, d, spec);
      CHECK(v >= -1e-12);
      CHECK(vm <= v + 1e-9);
      CHECK(v_value(x, d, wide) <= v + 1e-9);
    }
    if (t <= 2) {
      const double x = r.uniform();
      const double ref = grid_v_value(x, d, spec.M, spec.sigma, -2.0, 3.0, 1e-2);
      CHECK(std::abs(v_value(std::vector<double>{x}, d, spec) - ref) < 2e-2);
    }
  }
}

TEST_CASE("noiseless and noisy models agree on consistent data") {
  RngStream r(3);
  int compared = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t t = 1 + r.next_u64() % 4;
    ContinuumDataset d;
    d.dim = 1;
    const double a = 0.9 * r.uniform(), c = r.uniform();
    for (std::size_t i = 0; i < t; ++i) {
      const double x = r.uniform();
      d.add({x}, -a * std::abs(x - c));
    }
    for (int g = 0; g <= 50; ++g) {
      const double x = g / 50.0;
      double top = -1e300, ceil = 1e300;
      for (std::size_t i = 0; i < t; ++i) {
        top = std::max(top, d.values[i]);
        ceil = std::min(ceil, d.values[i] + std::abs(x - d.points[i][0]));
      }
      if (std::abs(top - ceil) < 1e-6) continue;
      const bool zero = v_value(std::vector<double>{x}, d, {1.0, 1.0}) <= 1e-10;
      CHECK(zero == s_feasible_noiseless(std::vector<double>{x}, d, 1.0));
      ++compared;
    }
  }
  CHECK(compared > 3000);
}

TEST_CASE("sample_gaussian acceptance frequencies") {
  const ContinuumDataset d = data1({0.2, 0.7}, {0.6, 0.1});
  const LipschitzSpec spec{0.5, 0.4};
  const double vm = v_min(d, spec);
  RngStream r(8);
  int within = 0;
  for (int g = 0; g < 64; ++g) {
    const double x = (g + 0.5) / 64.0;
    const double p = std::exp(vm - v_value(std::vector<double>{x}, d, spec));
    const int n = 10000;
    int acc = 0;
    for (int k = 0; k < n; ++k) {
      try {
        (void)sample_gaussian(fixed({x}), d, spec, r, 1);
        ++acc;
      } catch (const SamplerExhaustedError&) {
      }
    }
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
    within += std::abs(acc / double(n) - p) <= 3.0 * se + 1e-12;
  }
  // 3 standard errors: a stray miss is possible; two or more is not plausible.
  CHECK(within >= 62);

  RngStream s(2);
  CHECK(sample_gaussian(uniform_prior(1), data1({}, {}), spec, s).attempts == 1);
  // One observation that is the running max: acceptance 1 at the point.
  const ContinuumDataset one = data1({0.4}, {2.0});
  CHECK(v_value(std::vector<double>{0.4}, one, spec) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v_min(one, spec) == 0.0);
}

TEST_CASE("sample_gaussian exhaustion reports the acceptance estimate") {
  const ContinuumDataset d = data1({0.0, 1.0}, {0.0, 40.0});
  const LipschitzSpec spec{1.0, 0.05};
  RngStream r(1);
  try {
    (void)sample_gaussian(fixed({0.0}), d, spec, r, 10);
    FAIL("expected exhaustion");
  } catch (const SamplerExhaustedError& e) {
    CHECK(e.acceptance_estimate() >= 0.0);
    CHECK(e.acceptance_estimate() < 1e-6);
  }
}
