#include "mints/cutting_plane.hpp"

#include <cmath>
#include <numbers>

#include "mints/errors.hpp"

namespace mints {
namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

Polygon2D Polygon2D::box(Point2 lower, Point2 upper) {
  if (!(upper.x > lower.x) || !(upper.y > lower.y)) throw Error("Polygon2D::box: empty box");
  return {{lower, {upper.x, lower.y}, upper, {lower.x, upper.y}}};
}

bool Polygon2D::contains(Point2 p, double tol) const {
  if (empty()) return false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices[i];
    const Point2 b = vertices[(i + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (cross(a, b, p) < -tol * len) return false;
  }
  return true;
}

bool Polygon2D::is_convex_ccw() const {
  if (empty()) return true;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < -1e-10) return false;
  }
  return area(*this) > 0.0;
}

double area(const Polygon2D& poly) {
  if (poly.empty()) return 0.0;
  const std::size_t n = poly.vertices.size();
  // Moments about the first vertex keep the shoelace sums well conditioned.
  const Point2 o = poly.vertices[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross(o, poly.vertices[i], poly.vertices[i + 1]);
  return 0.5 * twice;
}

Point2 centroid(const Polygon2D& poly) {
  if (poly.empty()) throw Error("centroid: empty polygon");
  const std::size_t n = poly.vertices.size();
  const Point2 o = poly.vertices[0];
  double twice = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Point2 a = poly.vertices[i];
    const Point2 b = poly.vertices[i + 1];
    const double w = cross(o, a, b);
    twice += w;
    cx += w * (a.x + b.x - 2.0 * o.x);
    cy += w * (a.y + b.y - 2.0 * o.y);
  }
  if (!(twice > 0.0)) throw Error("centroid: degenerate polygon");
  return {o.x + cx / (3.0 * twice), o.y + cy / (3.0 * twice)};
}

Polygon2D clip_halfplane(const Polygon2D& poly, Point2 g, Point2 x0) {
  if (poly.empty()) return {};
  auto side = [&](Point2 p) { return g.x * (p.x - x0.x) + g.y * (p.y - x0.y); };
  Polygon2D out;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly.vertices[i];
    const Point2 b = poly.vertices[(i + 1) % n];
    const double sa = side(a);
    const double sb = side(b);
    if (sa <= 0.0) out.vertices.push_back(a);
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      const double t = sa / (sa - sb);
      out.vertices.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  // Drop near-duplicate vertices left by cuts through existing corners.
  Polygon2D clean;
  for (const Point2& p : out.vertices) {
    if (!clean.vertices.empty()) {
      const Point2& q = clean.vertices.back();
      if (std::abs(p.x - q.x) <= 1e-12 && std::abs(p.y - q.y) <= 1e-12) continue;
    }
    clean.vertices.push_back(p);
  }
  while (clean.vertices.size() > 1) {
    const Point2& f = clean.vertices.front();
    const Point2& l = clean.vertices.back();
    if (std::abs(f.x - l.x) > 1e-12 || std::abs(f.y - l.y) > 1e-12) break;
    clean.vertices.pop_back();
  }
  if (clean.vertices.size() < 3 || !(area(clean) > 0.0)) return {};
  return clean;
}

std::vector<CogStep> cog_run(const SubgradientOracle& oracle, const Polygon2D& start,
                             std::size_t horizon) {
  if (!(area(start) > 0.0)) throw Error("cog_run: start polygon has no area");
  std::vector<CogStep> steps;
  Polygon2D region = start;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Point2 x = centroid(region);
    Eigen::Vector2d xv(x.x, x.y);
    const OracleValue ov = oracle(xv);
    if (ov.subgradient.size() != 2) throw Error("cog_run: oracle must return a 2-vector");
    const Point2 g{ov.subgradient[0], ov.subgradient[1]};
    if (g.x == 0.0 && g.y == 0.0) {
      steps.push_back({x, ov.value, region});
      break;
    }
    region = clip_halfplane(region, g, x);
    steps.push_back({x, ov.value, region});
    if (area(region) < 1e-14) break;
  }
  return steps;
}

// ---------------------------------------------------------------------------

Ellipsoid Ellipsoid::ball(const Eigen::VectorXd& center, double radius) {
  if (!(radius > 0.0)) throw Error("Ellipsoid::ball: radius must be > 0");
  const Eigen::Index d = center.size();
  return {center, Eigen::MatrixXd::Identity(d, d) * (radius * radius)};
}

void Ellipsoid::validate() const {
  const Eigen::Index d = dim();
  if (d == 0 || shape_inv.rows() != d || shape_inv.cols() != d) {
    throw Error("Ellipsoid: shape matrix must be d x d with d >= 1");
  }
  const double scale = std::max(1.0, shape_inv.cwiseAbs().maxCoeff());
  if ((shape_inv - shape_inv.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error("Ellipsoid: shape matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(shape_inv);
  if (llt.info() != Eigen::Success) throw Error("Ellipsoid: shape matrix is not positive definite");
}

double unit_ball_volume(Eigen::Index d) {
  const double dd = static_cast<double>(d);
  return std::pow(std::numbers::pi, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0);
}

double Ellipsoid::volume() const {
  // vol = vol(unit ball) * sqrt(det B)
  Eigen::LLT<Eigen::MatrixXd> llt(shape_inv);
  if (llt.info() != Eigen::Success) throw Error("Ellipsoid: shape matrix is not positive definite");
  const double sqrt_det = llt.matrixL().toDenseMatrix().diagonal().prod();
  return unit_ball_volume(dim()) * sqrt_det;
}

bool Ellipsoid::contains(const Eigen::VectorXd& v, double tol) const {
  const Eigen::VectorXd r = v - center;
  const double q = r.dot(shape_inv.ldlt().solve(r));
  return q <= 1.0 + tol;
}

Eigen::VectorXd Ellipsoid::sample(RngStream& rng) const {
  const Eigen::Index d = dim();
  Eigen::VectorXd z(d);
  for (Eigen::Index k = 0; k < d; ++k) z[k] = rng.normal();
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  z *= radius / z.norm();
  Eigen::LLT<Eigen::MatrixXd> llt(shape_inv);
  return center + llt.matrixL() * z;
}

Ellipsoid ellipsoid_kl_update(const Ellipsoid& e, const Eigen::VectorXd& g) {
  e.validate();
  const Eigen::Index d = e.dim();
  if (g.size() != d) throw Error("ellipsoid_kl_update: cut has wrong dimension");
  const Eigen::VectorXd bg = e.shape_inv * g;
  const double gbg = g.dot(bg);
  if (!(gbg > 1e-300)) throw Error("ellipsoid_kl_update: zero cut (g' B g <= 1e-300)");
  if (d == 1) {
    // Interval [c - r, c + r] keeps the half on the side opposite to g.
    const double r = std::sqrt(e.shape_inv(0, 0));
    Ellipsoid out = e;
    out.center[0] -= (g[0] > 0.0 ? 1.0 : -1.0) * r / 2.0;
    out.shape_inv(0, 0) /= 4.0;
    return out;
  }
  const double dd = static_cast<double>(d);
  const Eigen::VectorXd b = bg / std::sqrt(gbg);
  Ellipsoid out;
  out.center = e.center - b / (dd + 1.0);
  out.shape_inv = dd * dd / (dd * dd - 1.0) * (e.shape_inv - (2.0 / (dd + 1.0)) * b * b.transpose());
  out.shape_inv = 0.5 * (out.shape_inv + out.shape_inv.transpose());
  return out;
}

double ellipsoid_volume_ratio(Eigen::Index d) {
  if (d == 1) return 0.5;
  const double dd = static_cast<double>(d);
  return dd / (dd + 1.0) * std::pow(dd * dd / (dd * dd - 1.0), (dd - 1.0) / 2.0);
}

double uniform_forward_kl(double vol_inner, double vol_outer) {
  if (!(vol_inner > 0.0) || vol_outer < vol_inner) {
    throw Error("uniform_forward_kl: the outer region must cover the inner one");
  }
  return std::log(vol_outer / vol_inner);
}

std::vector<EllipsoidStep> ellipsoid_run(const SubgradientOracle& oracle, const Ellipsoid& start,
                                         std::size_t horizon) {
  start.validate();
  std::vector<EllipsoidStep> steps;
  Ellipsoid region = start;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Eigen::VectorXd x = region.center;
    const OracleValue ov = oracle(x);
    if (ov.subgradient.size() != region.dim()) throw Error("ellipsoid_run: subgradient has wrong dimension");
    if (ov.subgradient.isZero(0.0)) {
      steps.push_back({x, ov.value, region});
      break;
    }
    // Stop once the region has collapsed below double precision.
    const double gbg = ov.subgradient.dot(region.shape_inv * ov.subgradient);
    Ellipsoid next = region;
    bool collapsed = !(gbg > 1e-300);
    if (!collapsed) {
      next = ellipsoid_kl_update(region, ov.subgradient);
      collapsed = Eigen::LLT<Eigen::MatrixXd>(next.shape_inv).info() != Eigen::Success;
    }
    if (collapsed) {
      steps.push_back({x, ov.value, region});
      break;
    }
    region = std::move(next);
    steps.push_back({x, ov.value, region});
  }
  return steps;
}

bool halfellipsoid_cover_check(const Ellipsoid& e, const Eigen::VectorXd& g, const Ellipsoid& cover,
                               std::size_t n_samples, RngStream& rng) {
  e.validate();
  cover.validate();
  std::size_t accepted = 0;
  while (accepted < n_samples) {
    const Eigen::VectorXd v = e.sample(rng);
    if (g.dot(v - e.center) > 0.0) continue;
    ++accepted;
    if (!cover.contains(v, 1e-9)) return false;
  }
  return true;
}

SubgradientOracle diagonal_quadratic(Eigen::VectorXd center, Eigen::VectorXd curvature) {
  if (center.size() != curvature.size()) throw Error("diagonal_quadratic: size mismatch");
  return [center = std::move(center), curvature = std::move(curvature)](const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = x - center;
    return OracleValue{curvature.dot(r.cwiseProduct(r)), 2.0 * curvature.cwiseProduct(r)};
  };
}

}  // namespace mints
