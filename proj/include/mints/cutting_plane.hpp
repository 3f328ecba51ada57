#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mints/rng.hpp"

namespace mints {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Convex polygon with counter-clockwise vertices; no vertices means empty.
struct Polygon2D {
  std::vector<Point2> vertices;

  static Polygon2D box(Point2 lower, Point2 upper);
  static Polygon2D unit_square() { return box({0.0, 0.0}, {1.0, 1.0}); }

  bool empty() const { return vertices.size() < 3; }
  /// Point lies on the inner side of every edge, up to tol.
  bool contains(Point2 p, double tol = 1e-12) const;
  /// Convex and counter-clockwise within a 1e-10 cross-product tolerance.
  bool is_convex_ccw() const;
};

double area(const Polygon2D& poly);
/// Exact centroid from the shoelace moments. Throws on empty or zero-area input.
Point2 centroid(const Polygon2D& poly);
/// Keeps { x : g . (x - x0) <= 0 }.
Polygon2D clip_halfplane(const Polygon2D& poly, Point2 g, Point2 x0);

struct OracleValue {
  double value = 0.0;
  Eigen::VectorXd subgradient;
};

/// x -> (f(x), some g in the subdifferential at x).
using SubgradientOracle = std::function<OracleValue(const Eigen::VectorXd&)>;

struct CogStep {
  Point2 x;
  double value = 0.0;
  Polygon2D region;  // after the cut through x
};

/// Center-of-gravity iteration: query the centroid, cut through it.
/// Stops early on a zero subgradient or when the area drops below 1e-14.
std::vector<CogStep> cog_run(const SubgradientOracle& oracle, const Polygon2D& start,
                             std::size_t horizon);

/// { v : (v - c)' B^{-1} (v - c) <= 1 }, stored through B = A^{-1}.
struct Ellipsoid {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape_inv;

  static Ellipsoid ball(const Eigen::VectorXd& center, double radius);

  Eigen::Index dim() const { return center.size(); }
  /// Throws unless B is symmetric within 1e-12 and positive definite.
  void validate() const;
  double volume() const;
  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const;
  /// Uniform draw from the ellipsoid.
  Eigen::VectorXd sample(RngStream& rng) const;
};

/// Minimum-volume ellipsoid containing { v in E : g . (v - c) <= 0 }.
/// Throws on g' B g <= 1e-300 or a non positive definite B.
Ellipsoid ellipsoid_kl_update(const Ellipsoid& e, const Eigen::VectorXd& g);

/// Volume of the unit d-ball.
double unit_ball_volume(Eigen::Index d);

/// Expected volume ratio of one central cut in dimension d.
double ellipsoid_volume_ratio(Eigen::Index d);

/// KL divergence from the uniform law on a region of volume vol_inner to the
/// uniform law on a covering region of volume vol_outer.
double uniform_forward_kl(double vol_inner, double vol_outer);

struct EllipsoidStep {
  Eigen::VectorXd x;
  double value = 0.0;
  Ellipsoid region;  // after the update
};

/// Central-cut ellipsoid iteration. Stops early on a zero subgradient or when
/// the next region would no longer be numerically positive definite.
std::vector<EllipsoidStep> ellipsoid_run(const SubgradientOracle& oracle, const Ellipsoid& start,
                                         std::size_t horizon);

/// Monte Carlo check that `cover` contains n uniform draws from the half of
/// `e` with g . (v - c) <= 0 (boundary tolerance 1e-9).
bool halfellipsoid_cover_check(const Ellipsoid& e, const Eigen::VectorXd& g, const Ellipsoid& cover,
                               std::size_t n_samples, RngStream& rng);

/// f(x) = sum_k curvature_k (x_k - center_k)^2 as a subgradient oracle.
SubgradientOracle diagonal_quadratic(Eigen::VectorXd center, Eigen::VectorXd curvature);

}  // namespace mints
