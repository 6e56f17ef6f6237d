#pragma once
/**
 * @file geometry.hpp
 * @brief Planar primitives: points, simple polygons, rigid motions and the
 * tolerance-aware predicates the arc engine is built on.
 *
 * Nothing here uses exact arithmetic. Every predicate takes a Tolerance and
 * reports near-degenerate configurations instead of guessing; callers decide
 * what to do with them (the kinematic sampler resamples).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace meanarc {

// ---- errors ---------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vertex loop violates the simple-polygon invariants.
struct ValidationError : Error {
  ValidationError(const std::string& what, std::optional<std::pair<std::size_t, std::size_t>> edges = {})
      : Error(what), crossing_edges(edges) {}
  /// Indices of the first offending edge pair (edge i runs from vertex i to i+1).
  std::optional<std::pair<std::size_t, std::size_t>> crossing_edges;
};

struct DegenerateInput : Error {
  using Error::Error;
};

// ---- points ---------------------------------------------------------------

struct Point {
  double x{0.0};
  double y{0.0};

  constexpr Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  constexpr Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  constexpr Point operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Point&) const = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Distance from q to the closed segment [a, b].
inline double segment_distance(Point q, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(q, a + ab * t);
}

struct Tolerance {
  double eps_length = 1e-9;  ///< absolute length tolerance
  double eps_param = 1e-12;  ///< parametric / angular tolerance

  void check() const {
    if (!(eps_length > 0.0) || !(eps_param > 0.0))
      throw Error("tolerances must be strictly positive");
  }
};

struct BoundingBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void expand(Point p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }
  Point center() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }
  bool overlaps(const BoundingBox& o, double slack = 0.0) const {
    return min_x <= o.max_x + slack && o.min_x <= max_x + slack && min_y <= o.max_y + slack &&
           o.min_y <= max_y + slack;
  }
};

inline BoundingBox bounding_box(std::span<const Point> pts) {
  BoundingBox b;
  for (const Point& p : pts) b.expand(p);
  return b;
}

// ---- rigid motions --------------------------------------------------------

inline double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

/// Rotation by theta about the origin followed by translation by (tx, ty).
struct RigidMotion {
  double theta = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  RigidMotion() = default;
  RigidMotion(double theta_, double tx_, double ty_) : theta(normalize_angle(theta_)), tx(tx_), ty(ty_) {}

  Point apply(Point p) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
  }

  RigidMotion inverse() const {
    const double c = std::cos(theta), s = std::sin(theta);
    // p = R^T (q - t)
    return RigidMotion(-theta, -(c * tx + s * ty), -(-s * tx + c * ty));
  }

  /// (*this) after `first`: p -> this(first(p)).
  RigidMotion compose(const RigidMotion& first) const {
    const Point t = apply({first.tx, first.ty});
    return RigidMotion(theta + first.theta, t.x, t.y);
  }
};

/// Transform a vertex loop into `out` without allocation in steady state.
inline void transform_into(std::span<const Point> in, const RigidMotion& m, std::vector<Point>& out) {
  out.resize(in.size());
  const double c = std::cos(m.theta), s = std::sin(m.theta);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const Point p = in[i];
    out[i] = {c * p.x - s * p.y + m.tx, s * p.x + c * p.y + m.ty};
  }
}

// ---- segment intersection -------------------------------------------------

enum class HitKind { None, Proper, Degenerate };

struct SegmentHit {
  HitKind kind = HitKind::None;
  Point point{};   ///< valid for Proper
  double s = 0.0;  ///< parameter along a0->a1
  double t = 0.0;  ///< parameter along b0->b1
};

/**
 * Classify the intersection of segments a0a1 and b0b1.
 *
 * Proper is reported only for a transversal crossing strictly interior to
 * both segments (each endpoint farther than eps_length from the crossing).
 * Endpoint touches, collinear overlaps and near-parallel contacts are
 * Degenerate. The classification is symmetric under swapping a and b.
 */
inline SegmentHit segment_intersection(Point a0, Point a1, Point b0, Point b1, const Tolerance& tol) {
  const Point r = a1 - a0;
  const Point q = b1 - b0;
  const double la = norm(r);
  const double lb = norm(q);
  const double d = cross(r, q);
  const Point w = b0 - a0;

  if (std::abs(d) <= tol.eps_param * la * lb) {
    // Parallel: separation measured from both sides so the result is symmetric.
    const double sep = std::max(std::abs(cross(r, w)) / la, std::abs(cross(q, w)) / lb);
    if (sep > tol.eps_length) return {};
    const auto overlap = [](Point o, Point dir, double len, Point p0, Point p1) {
      const double u0 = dot(p0 - o, dir) / len;
      const double u1 = dot(p1 - o, dir) / len;
      return std::min(len, std::max(u0, u1)) - std::max(0.0, std::min(u0, u1));
    };
    const double ov = std::min(overlap(a0, r, la, b0, b1), overlap(b0, q, lb, a0, a1));
    if (ov >= -tol.eps_length) return {HitKind::Degenerate};
    return {};
  }

  const double s = cross(w, q) / d;
  const double t = cross(w, r) / d;
  const double sa0 = s * la, sa1 = (1.0 - s) * la;
  const double tb0 = t * lb, tb1 = (1.0 - t) * lb;
  const double e = tol.eps_length;
  if (sa0 < -e || sa1 < -e || tb0 < -e || tb1 < -e) return {};
  if (sa0 > e && sa1 > e && tb0 > e && tb1 > e) {
    const Point pa = a0 + r * s;
    const Point pb = b0 + q * t;
    return {HitKind::Proper, {0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)}, s, t};
  }
  return {HitKind::Degenerate, {}, s, t};
}

// ---- polygon validation ---------------------------------------------------

namespace detail {

inline double signed_area(std::span<const Point> v) {
  double acc = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) acc += cross(v[i], v[(i + 1) % n]);
  return 0.5 * acc;
}

// Any contact between two closed segments (including touching) within eps.
inline bool segments_touch(Point a0, Point a1, Point b0, Point b1, double eps) {
  const Tolerance tol{eps, 1e-12};
  if (segment_intersection(a0, a1, b0, b1, tol).kind != HitKind::None) return true;
  return segment_distance(a0, b0, b1) <= eps || segment_distance(a1, b0, b1) <= eps ||
         segment_distance(b0, a0, a1) <= eps || segment_distance(b1, a0, a1) <= eps;
}

inline std::string fmt_point(Point p) {
  std::ostringstream os;
  os.precision(17);
  os << '(' << p.x << ", " << p.y << ')';
  return os.str();
}

/// Throws ValidationError describing the first violated invariant.
inline void validate_loop(std::span<const Point> v) {
  const std::size_t n = v.size();
  if (n < 3) throw ValidationError("polygon needs at least 3 vertices, got " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (!is_finite(v[i])) throw ValidationError("vertex " + std::to_string(i) + " is not finite");

  const double scale = std::max(bounding_box(v).diagonal(), std::numeric_limits<double>::min());
  const double eps = 1e-12 * scale;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (distance(v[i], v[j]) <= eps)
      throw ValidationError("repeated vertex: vertices " + std::to_string(i) + " and " + std::to_string(j) +
                            " coincide at " + fmt_point(v[i]));
  }

  // Adjacent edges may only share their common vertex: reject fold-backs.
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
    const Point e1 = b - a, e2 = c - b;
    if (std::abs(cross(e1, e2)) <= 1e-12 * norm(e1) * norm(e2) && dot(e1, e2) < 0.0)
      throw ValidationError("edges " + std::to_string(i) + " and " + std::to_string((i + 1) % n) +
                                " fold back on each other at vertex " + std::to_string((i + 1) % n),
                            std::pair{i, (i + 1) % n});
  }

  std::vector<BoundingBox> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    boxes[i].expand(v[i]);
    boxes[i].expand(v[(i + 1) % n]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closure edge
      if (!boxes[i].overlaps(boxes[j], eps)) continue;
      if (segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n], eps))
        throw ValidationError("self-intersection: edge " + std::to_string(i) + "->" + std::to_string((i + 1) % n) +
                                  " meets edge " + std::to_string(j) + "->" + std::to_string((j + 1) % n),
                              std::pair{i, j});
    }
  }

  if (!(std::abs(signed_area(v)) > eps * scale)) throw ValidationError("polygon has zero area");
}

}  // namespace detail

// ---- simple polygon -------------------------------------------------------

/**
 * Closed, non-self-intersecting vertex loop stored counter-clockwise.
 * Clockwise input is reversed on construction.
 */
class SimplePolygon {
 public:
  explicit SimplePolygon(std::vector<Point> vertices) : v_(std::move(vertices)) {
    detail::validate_loop(v_);
    if (detail::signed_area(v_) < 0.0) std::reverse(v_.begin(), v_.end());
  }

  /// Skip validation; for isometries and similarities of an already valid polygon.
  static SimplePolygon trusted(std::vector<Point> vertices) {
    SimplePolygon p;
    p.v_ = std::move(vertices);
    return p;
  }

  std::span<const Point> vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const Point& operator[](std::size_t i) const { return v_[i]; }
  const Point& vertex(std::size_t i) const { return v_[i % v_.size()]; }
  bool operator==(const SimplePolygon&) const = default;

 private:
  SimplePolygon() = default;
  std::vector<Point> v_;
};

inline double area(const SimplePolygon& p) { return detail::signed_area(p.vertices()); }

inline double perimeter(std::span<const Point> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += distance(v[i], v[(i + 1) % v.size()]);
  return acc;
}
inline double perimeter(const SimplePolygon& p) { return perimeter(p.vertices()); }

inline BoundingBox bounding_box(const SimplePolygon& p) { return bounding_box(p.vertices()); }

/// Area centroid.
inline Point centroid(const SimplePolygon& p) {
  const auto v = p.vertices();
  // Shift to the first vertex for conditioning.
  const Point o = v[0];
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point p0 = v[i] - o, p1 = v[(i + 1) % v.size()] - o;
    const double c = cross(p0, p1);
    a += c;
    cx += (p0.x + p1.x) * c;
    cy += (p0.y + p1.y) * c;
  }
  return {o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)};
}

/// Largest vertex-to-vertex distance.
inline double diameter(const SimplePolygon& p) {
  const auto v = p.vertices();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, distance(v[i], v[j]));
  return best;
}

inline double circumradius_about(const SimplePolygon& p, Point ref) {
  double best = 0.0;
  for (const Point& q : p.vertices()) best = std::max(best, distance(q, ref));
  return best;
}

/// Scale-relative defaults: eps_length = 1e-9 x the larger diameter.
inline Tolerance default_tolerance(const SimplePolygon& a, const SimplePolygon& b) {
  return {1e-9 * std::max(diameter(a), diameter(b)), 1e-12};
}
inline Tolerance default_tolerance(const SimplePolygon& a) { return default_tolerance(a, a); }

inline bool is_convex(const SimplePolygon& p) {
  const auto v = p.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point e1 = v[(i + 1) % n] - v[i];
    const Point e2 = v[(i + 2) % n] - v[(i + 1) % n];
    if (cross(e1, e2) < -1e-12 * norm(e1) * norm(e2)) return false;
  }
  return true;
}

inline SimplePolygon apply_motion(const SimplePolygon& p, const RigidMotion& m) {
  std::vector<Point> out;
  transform_into(p.vertices(), m, out);
  return SimplePolygon::trusted(std::move(out));
}

inline SimplePolygon translate(const SimplePolygon& p, Point d) {
  std::vector<Point> out(p.vertices().begin(), p.vertices().end());
  for (Point& q : out) q = q + d;
  return SimplePolygon::trusted(std::move(out));
}

enum class Location { Inside, Outside, OnBoundary };

/// Boundary distance first (OnBoundary within eps_length), then even-odd ray casting.
inline Location point_in_polygon(Point q, std::span<const Point> v, const Tolerance& tol) {
  const std::size_t n = v.size();
  bool inside = false;
  const double e = tol.eps_length;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[j], b = v[i];
    const bool near_box = q.x >= std::min(a.x, b.x) - e && q.x <= std::max(a.x, b.x) + e &&
                          q.y >= std::min(a.y, b.y) - e && q.y <= std::max(a.y, b.y) + e;
    if (near_box && segment_distance(q, a, b) < e) return Location::OnBoundary;
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x) inside = !inside;
    }
  }
  return inside ? Location::Inside : Location::Outside;
}

inline Location point_in_polygon(Point q, const SimplePolygon& p, const Tolerance& tol) {
  return point_in_polygon(q, p.vertices(), tol);
}

/// Signed distance to the boundary, positive inside.
inline double signed_distance(Point q, std::span<const Point> v) {
  const std::size_t n = v.size();
  bool inside = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[j], b = v[i];
    best = std::min(best, segment_distance(q, a, b));
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x) inside = !inside;
    }
  }
  return inside ? best : -best;
}

/// Andrew's monotone chain; collinear boundary points are dropped.
inline SimplePolygon convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw DegenerateInput("convex hull needs at least 3 distinct points");

  const double scale = bounding_box(pts).diagonal();
  const auto turn = [scale](Point o, Point a, Point b) {
    const double c = cross(a - o, b - o);
    return c > 1e-14 * scale * scale ? c : 0.0;
  };
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw DegenerateInput("all input points are collinear");
  return SimplePolygon(std::move(hull));
}

}  // namespace meanarc
