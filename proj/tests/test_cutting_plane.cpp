#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mints/cutting_plane.hpp"
#include "mints/errors.hpp"

using namespace mints;

namespace {

Polygon2D unit() { return Polygon2D::box({0, 0}, {1, 1}); }

Eigen::MatrixXd random_spd(Eigen::Index d, RngStream& r) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) a(i, k) = r.normal();
  return a * a.transpose() + 0.2 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::VectorXd random_vec(Eigen::Index d, RngStream& r) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = r.normal();
  return v;
}

// Independent area: fraction of a fine grid inside the polygon.
double grid_area(const Polygon2D& p, int n) {
  int in = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) in += p.contains({(i + 0.5) / n, (k + 0.5) / n}, 0.0);
  return in / double(n) / double(n);
}

}  // namespace

TEST_CASE("clip_halfplane: examples") {
  const Polygon2D left = clip_halfplane(unit(), {1, 0}, {0.5, 0.5});
  CHECK(area(left) == doctest::Approx(0.5));
  CHECK(left.is_convex_ccw());
  for (const Point2& v : left.vertices) CHECK(v.x <= 0.5 + 1e-15);
  const Point2 c = centroid(left);
  CHECK(c.x == doctest::Approx(0.25));
  CHECK(c.y == doctest::Approx(0.5));

  const Polygon2D same = clip_halfplane(unit(), {1, 0}, {2.0, 0.0});
  CHECK(area(same) == doctest::Approx(1.0));
  CHECK(same.vertices.size() == 4);

  CHECK(clip_halfplane(unit(), {1, 0}, {-1.0, 0.0}).empty());
}

TEST_CASE("centroid: examples") {
  const Point2 c = centroid(unit());
  CHECK(c.x == doctest::Approx(0.5));
  CHECK(c.y == doctest::Approx(0.5));
  const Polygon2D tri{{{0, 0}, {1, 0}, {0, 1}}};
  CHECK(centroid(tri).x == doctest::Approx(1.0 / 3));
  CHECK(centroid(tri).y == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(centroid(Polygon2D{}), Error);
}

TEST_CASE("polygon after cuts equals the intersection of half-planes") {
  RngStream r(6);
  for (int inst = 0; inst < 10; ++inst) {
    Polygon2D p = unit();
    std::vector<std::pair<Point2, Point2>> cuts;
    for (int k = 0; k < 5; ++k) {
      const Point2 x0 = centroid(p);
      const Point2 g{r.normal(), r.normal()};
      cuts.push_back({g, x0});
      const double before = area(p);
      p = clip_halfplane(p, g, x0);
      CHECK(area(p) <= before + 1e-15);
      CHECK(p.is_convex_ccw());
    }
    int mismatch = 0;
    for (int i = 0; i < 100; ++i) {
      for (int k = 0; k < 100; ++k) {
        const Point2 q{(i + 0.5) / 100, (k + 0.5) / 100};
        bool inside = true;
        double margin = 1e9;
        for (const auto& [g, x0] : cuts) {
          const double s = g.x * (q.x - x0.x) + g.y * (q.y - x0.y);
          inside = inside && s <= 0.0;
          margin = std::min(margin, std::abs(s));
        }
        if (margin < 1e-9) continue;
        mismatch += inside != p.contains(q, 0.0);
      }
    }
    CHECK(mismatch == 0);
    CHECK(std::abs(grid_area(p, 400) - area(p)) < 0.01);
  }
}

TEST_CASE("cog_run: examples") {
  const auto constant = [](const Eigen::VectorXd&) { return OracleValue{1.0, Eigen::Vector2d::Zero()}; };
  const auto one = cog_run(constant, unit(), 10);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x.x == doctest::Approx(0.5));

  const auto f = diagonal_quadratic(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(1.0, 1.0));
  const auto steps = cog_run(f, unit(), 40);
  CHECK(steps.back().value <= 1e-6);

  Polygon2D prev = unit();
  for (const auto& s : steps) {
    CHECK(prev.contains(s.x, 1e-12));
    const double frac = area(s.region) / area(prev);
    CHECK(frac >= 4.0 / 9.0 - 1e-9);
    CHECK(frac <= 5.0 / 9.0 + 1e-9);
    prev = s.region;
  }
}

TEST_CASE("subgradient inequality of the built-in quadratic") {
  RngStream r(2);
  const auto f = diagonal_quadratic(Eigen::Vector3d(0.1, -0.2, 0.5), Eigen::Vector3d(1.0, 2.0, 0.5));
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = random_vec(3, r), y = random_vec(3, r);
    const OracleValue fx = f(x);
    CHECK(f(y).value >= fx.value + fx.subgradient.dot(y - x) - 1e-12);
  }
}

TEST_CASE("ellipsoid_kl_update: canonical instance") {
  const Ellipsoid e = Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0);
  const Ellipsoid n = ellipsoid_kl_update(e, Eigen::Vector2d(1.0, 0.0));
  CHECK(std::abs(n.center[0] + 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(n.center[1]) < 1e-12);
  CHECK(std::abs(n.shape_inv(0, 0) - 4.0 / 9.0) < 1e-12);
  CHECK(std::abs(n.shape_inv(1, 1) - 4.0 / 3.0) < 1e-12);
  CHECK(std::abs(n.shape_inv(0, 1)) < 1e-12);
  CHECK_THROWS_AS(ellipsoid_kl_update(e, Eigen::Vector2d::Zero()), Error);
  Ellipsoid bad = e;
  bad.shape_inv(0, 0) = -1.0;
  CHECK_THROWS_AS(ellipsoid_kl_update(bad, Eigen::Vector2d(1.0, 0.0)), Error);
}

TEST_CASE("ellipsoid_kl_update: d = 1 halves the interval") {
  Ellipsoid e{Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Constant(1, 1, 9.0)};
  const Ellipsoid n = ellipsoid_kl_update(e, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(n.center[0] == doctest::Approx(0.5));
  CHECK(n.shape_inv(0, 0) == doctest::Approx(9.0 / 4.0));
  const Ellipsoid m = ellipsoid_kl_update(e, Eigen::VectorXd::Constant(1, -3.0));
  CHECK(m.center[0] == doctest::Approx(3.5));
  CHECK(ellipsoid_volume_ratio(1) == 0.5);
}

TEST_CASE("ellipsoid_kl_update: volume ratio and rotational equivariance") {
  CHECK(ellipsoid_volume_ratio(2) == doctest::Approx(2.0 / 3.0 * std::sqrt(4.0 / 3.0)).epsilon(1e-15));
  RngStream r(13);
  for (int inst = 0; inst < 100; ++inst) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(r.next_u64() % 4);
    const Ellipsoid e{random_vec(d, r), random_spd(d, r)};
    const Eigen::VectorXd g = random_vec(d, r);
    const Ellipsoid n = ellipsoid_kl_update(e, g);
    CHECK(std::abs(n.volume() / e.volume() - ellipsoid_volume_ratio(d)) < 1e-9);
    CHECK(n.volume() < e.volume());

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_spd(d, r));
    const Eigen::MatrixXd q = qr.householderQ();
    const Ellipsoid rot{q * e.center, q * e.shape_inv * q.transpose()};
    const Ellipsoid nr = ellipsoid_kl_update(rot, q * g);
    CHECK((nr.center - q * n.center).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + n.center.norm()));
    CHECK((nr.shape_inv - q * n.shape_inv * q.transpose()).cwiseAbs().maxCoeff() <
          1e-10 * (1.0 + n.shape_inv.norm()));
  }
}

TEST_CASE("halfellipsoid_cover_check") {
  RngStream r(21);
  const Ellipsoid e{Eigen::Vector2d(0.3, -0.4), random_spd(2, r)};
  const Eigen::Vector2d g(0.7, -1.2);
  const Ellipsoid n = ellipsoid_kl_update(e, g);
  CHECK(halfellipsoid_cover_check(e, g, n, 100000, r));
  Ellipsoid shrunk = n;
  shrunk.shape_inv *= 0.99 * 0.99;
  CHECK_FALSE(halfellipsoid_cover_check(e, g, shrunk, 100000, r));
  CHECK_FALSE(halfellipsoid_cover_check(e, -g, n, 100000, r));
}

TEST_CASE("ellipsoid_kl_update: perturbed covers are not smaller") {
  RngStream r(5);
  for (int inst = 0; inst < 20; ++inst) {
    const Ellipsoid e{random_vec(2, r), random_spd(2, r)};
    const Eigen::VectorXd g = random_vec(2, r);
    const Ellipsoid n = ellipsoid_kl_update(e, g);
    // Dense boundary of the half-ellipsoid (arc plus flat side); covering it
    // covers the convex hull.
    std::vector<Eigen::VectorXd> pts;
    const Eigen::Matrix2d l = Eigen::LLT<Eigen::Matrix2d>(e.shape_inv).matrixL();
    const Eigen::Vector2d h = l.transpose() * g;
    for (int k = 0; k < 8000; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 8000.0;
      const Eigen::Vector2d u(std::cos(th), std::sin(th));
      if (h.dot(u) <= 0.0) pts.push_back(e.center + l * u);
    }
    const Eigen::Vector2d side = Eigen::Vector2d(-h[1], h[0]).normalized();
    for (int k = 0; k <= 2000; ++k) pts.push_back(e.center + l * ((k / 1000.0 - 1.0) * side));
    const double vol = n.volume();
    for (int k = 0; k < 30; ++k) {
      Ellipsoid p = n;
      const double eps = 1e-3 * std::sqrt(n.shape_inv.norm());
      p.center += eps * random_vec(2, r);
      Eigen::Matrix2d dm;
      dm << r.normal(), r.normal(), 0.0, r.normal();
      dm(1, 0) = dm(0, 1);
      p.shape_inv += 1e-3 * n.shape_inv.norm() * dm;
      if (Eigen::LLT<Eigen::MatrixXd>(p.shape_inv).info() != Eigen::Success) continue;
      const auto ldlt = p.shape_inv.ldlt();
      bool covers = true;
      for (const auto& v : pts) {
        const Eigen::VectorXd d = v - p.center;
        if (d.dot(ldlt.solve(d)) > 1.0 + 1e-9) {
          covers = false;
          break;
        }
      }
      if (covers) CHECK(p.volume() >= vol * (1.0 - 1e-5));
    }
  }
}

TEST_CASE("KL ordering of covering ellipsoids follows volume") {
  // Candidates: the update and inflated or stretched copies that still cover.
  RngStream r(9);
  const Ellipsoid e = Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0);
  const Eigen::Vector2d g(1.0, 0.0);
  const Ellipsoid base = ellipsoid_kl_update(e, g);
  const double inner = std::numbers::pi / 2.0;  // half of the unit disc
  std::vector<Ellipsoid> cands{base};
  for (int k = 1; k <= 6; ++k) {
    Ellipsoid c = base;
    c.shape_inv *= 1.0 + 0.1 * k * r.uniform();
    cands.push_back(c);
  }
  cands.push_back(e);
  std::vector<double> kl, scaled_form;
  for (const auto& c : cands) {
    REQUIRE(halfellipsoid_cover_check(e, g, c, 20000, r));
    kl.push_back(uniform_forward_kl(inner, c.volume()));
    scaled_form.push_back(std::log(c.volume() / inner) / inner);
  }
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CHECK(kl[i] >= kl[0]);
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const bool by_volume = cands[i].volume() < cands[k].volume();
      CHECK(by_volume == (kl[i] < kl[k]));
      CHECK(by_volume == (scaled_form[i] < scaled_form[k]));
    }
  }
  CHECK_THROWS_AS(uniform_forward_kl(2.0, 1.0), Error);
}

TEST_CASE("ellipsoid_run") {
  const auto f = diagonal_quadratic(Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones());
  const auto steps = ellipsoid_run(f, Ellipsoid::ball(Eigen::Vector2d(2, 2), 4.0), 100);
  double best = 1e300;
  for (const auto& s : steps) best = std::min(best, s.value);
  CHECK(best <= 1e-4);

  // Constant g: centers move along -Bg and volumes shrink at the fixed ratio.
  const auto lin = [](const Eigen::VectorXd& x) { return OracleValue{x[0], Eigen::Vector2d(1.0, 0.0)}; };
  const auto ls = ellipsoid_run(lin, Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0), 10);
  double vol = Ellipsoid::ball(Eigen::Vector2d::Zero(), 1.0).volume();
  for (std::size_t t = 0; t < ls.size(); ++t) {
    CHECK(std::abs(ls[t].region.volume() / vol - ellipsoid_volume_ratio(2)) < 1e-9);
    vol = ls[t].region.volume();
    CHECK(ls[t].region.center[1] == doctest::Approx(0.0));
    if (t > 0) CHECK(ls[t].x[0] < ls[t - 1].x[0]);
  }

  // d = 1 bisection.
  const auto q1 = [](const Eigen::VectorXd& x) {
    return OracleValue{(x[0] - 0.3) * (x[0] - 0.3), Eigen::VectorXd::Constant(1, 2 * (x[0] - 0.3))};
  };
  const Ellipsoid seg{Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.25)};
  const auto bs = ellipsoid_run(q1, seg, 30);
  double width = 1.0;
  for (const auto& s : bs) {
    const double w = 2.0 * std::sqrt(s.region.shape_inv(0, 0));
    CHECK(w == doctest::Approx(width / 2.0));
    width = w;
  }
  CHECK(std::abs(bs.back().x[0] - 0.3) < 1e-8);
}

TEST_CASE("Ellipsoid validation and sampling") {
  Ellipsoid e{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()};
  e.shape_inv(0, 1) = 0.5;
  CHECK_THROWS_AS(e.validate(), Error);
  RngStream r(4);
  const Ellipsoid b{Eigen::Vector2d(1, 2), random_spd(2, r)};
  int inside_half = 0;
  for (int i = 0; i < 20000; ++i) {
    const Eigen::VectorXd v = b.sample(r);
    CHECK(b.contains(v, 1e-12));
    // Uniform: P(inside the ellipsoid scaled by 1/sqrt 2) = 1/2.
    const Eigen::VectorXd d = v - b.center;
    inside_half += d.dot(b.shape_inv.ldlt().solve(d)) <= 0.5;
  }
  CHECK(std::abs(inside_half / 20000.0 - 0.5) < 0.02);
}
