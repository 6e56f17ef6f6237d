#pragma once
/**
 * @file arc_engine.hpp
 * @brief Per-placement evaluation: how much of a moved trajectory loop lies
 * inside the domain, how often the two boundaries cross, and how the inside
 * part splits into arcs.
 *
 * The domain is indexed once (PreparedDomain, a uniform grid over its edges)
 * and the trajectory once (PreparedTrajectory, edge lengths and chunk
 * bounding circles) because both are evaluated over many placements.
 * Crossings are found edge-pair wise through the grid.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "meanarc/geometry.hpp"

namespace meanarc {

enum class Classification { Disjoint, Crossing, TrajectoryInsideDomain, DomainInsideTrajectory };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Disjoint: return "disjoint";
    case Classification::Crossing: return "crossing";
    case Classification::TrajectoryInsideDomain: return "contained";
    case Classification::DomainInsideTrajectory: return "covering";
  }
  return "?";
}

struct Arc {
  std::vector<Point> polyline;  ///< only filled when polylines are requested
  double length = 0.0;
};

struct ArcReport {
  double inside_length = 0.0;
  double outside_length = 0.0;  ///< complementary classification, for conservation checks
  int crossing_count = 0;
  std::vector<Arc> arcs;
  Classification classification = Classification::Disjoint;
  bool degenerate = false;
};

enum class ArcDetail { Lengths, Polylines };

/// Per-worker visit marks for grid queries.
struct CandidateScratch {
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  void next_epoch(std::size_t edges) {
    if (stamp.size() < edges) stamp.assign(edges, 0);
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
  }
};

/// Immutable domain with an edge grid; safe to share between threads.
class PreparedDomain {
 public:
  explicit PreparedDomain(SimplePolygon polygon) : poly_(std::move(polygon)) {
    const auto v = poly_.vertices();
    const std::size_t n = v.size();
    box_ = bounding_box(v);
    perimeter_ = meanarc::perimeter(v);
    area_ = meanarc::area(poly_);
    edge_boxes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      edge_boxes_[i].expand(v[i]);
      edge_boxes_[i].expand(v[(i + 1) % n]);
    }
    if (n <= kLinearScanEdges) return;

    // Roughly two cells per edge, square cells.
    const double w = std::max(box_.width(), 1e-300), h = std::max(box_.height(), 1e-300);
    const double cell = std::sqrt(w * h / (2.0 * static_cast<double>(n)));
    nx_ = std::clamp(static_cast<int>(std::ceil(w / cell)), 1, 256);
    ny_ = std::clamp(static_cast<int>(std::ceil(h / cell)), 1, 256);
    cw_ = w / nx_;
    ch_ = h / ny_;
    std::vector<std::vector<std::uint32_t>> cells(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [x0, y0, x1, y1] = cell_range(edge_boxes_[i]);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) cells[static_cast<std::size_t>(y) * nx_ + x].push_back(static_cast<std::uint32_t>(i));
    }
    // Summed-area table of cell occupancy for O(1) "any edge here?" queries.
    occupancy_.assign(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1), 0);
    for (int y = 0; y < ny_; ++y)
      for (int x = 0; x < nx_; ++x)
        occupancy_[static_cast<std::size_t>(y + 1) * (nx_ + 1) + x + 1] =
            static_cast<std::uint32_t>(cells[static_cast<std::size_t>(y) * nx_ + x].size()) +
            occupancy_[static_cast<std::size_t>(y) * (nx_ + 1) + x + 1] +
            occupancy_[static_cast<std::size_t>(y + 1) * (nx_ + 1) + x] -
            occupancy_[static_cast<std::size_t>(y) * (nx_ + 1) + x];
    cell_start_.assign(cells.size() + 1, 0);
    for (std::size_t c = 0; c < cells.size(); ++c) cell_start_[c + 1] = cell_start_[c] + static_cast<std::uint32_t>(cells[c].size());
    cell_edges_.reserve(cell_start_.back());
    for (auto& c : cells) cell_edges_.insert(cell_edges_.end(), c.begin(), c.end());
  }

  const SimplePolygon& polygon() const { return poly_; }
  std::span<const Point> vertices() const { return poly_.vertices(); }
  const BoundingBox& box() const { return box_; }
  double perimeter() const { return perimeter_; }
  double area() const { return area_; }

  /// False only if no domain edge box can meet `query` (conservative).
  bool may_touch(const BoundingBox& query, double slack) const {
    if (!box_.overlaps(query, slack)) return false;
    if (cell_start_.empty()) {
      for (const BoundingBox& b : edge_boxes_)
        if (b.overlaps(query, slack)) return true;
      return false;
    }
    BoundingBox q = query;
    q.min_x -= slack;
    q.min_y -= slack;
    q.max_x += slack;
    q.max_y += slack;
    const auto [x0, y0, x1, y1] = cell_range(q);
    const auto at = [this](int x, int y) { return occupancy_[static_cast<std::size_t>(y) * (nx_ + 1) + x]; };
    return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0) > 0;
  }

  /**
   * point_in_polygon through the grid: boundary distance only against edges
   * near q, ray casting only against edges in q's row to the right.
   */
  Location locate(Point q, const Tolerance& tol, CandidateScratch& scratch) const {
    const double e = tol.eps_length;
    const auto v = vertices();
    if (cell_start_.empty() || q.x < box_.min_x || q.x > box_.max_x || q.y < box_.min_y || q.y > box_.max_y) {
      if (!box_.overlaps(BoundingBox{q.x, q.y, q.x, q.y}, e)) return Location::Outside;
      return point_in_polygon(q, v, tol);
    }
    bool on_boundary = false;
    for_each_candidate(BoundingBox{q.x, q.y, q.x, q.y}, e, scratch, [&](std::size_t i) {
      if (!on_boundary && segment_distance(q, v[i], v[(i + 1) % v.size()]) < e) on_boundary = true;
    });
    if (on_boundary) return Location::OnBoundary;

    const auto [cx, cy, cx1, cy1] = cell_range(BoundingBox{q.x, q.y, q.x, q.y});
    (void)cx1;
    (void)cy1;
    scratch.next_epoch(edge_boxes_.size());
    bool inside = false;
    for (int x = cx; x < nx_; ++x) {
      const std::size_t c = static_cast<std::size_t>(cy) * nx_ + x;
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const std::uint32_t i = cell_edges_[k];
        if (scratch.stamp[i] == scratch.epoch) continue;
        scratch.stamp[i] = scratch.epoch;
        const Point a = v[i], b = v[(i + 1) % v.size()];
        if ((a.y > q.y) != (b.y > q.y)) {
          const double xc = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
          if (q.x < xc) inside = !inside;
        }
      }
    }
    return inside ? Location::Inside : Location::Outside;
  }

  /// Calls fn(edge_index) for every domain edge whose box meets `query`; each edge at most once.
  template <class Fn>
  void for_each_candidate(const BoundingBox& query, double slack, CandidateScratch& scratch, Fn&& fn) const {
    if (!box_.overlaps(query, slack)) return;
    if (cell_start_.empty()) {
      for (std::size_t i = 0; i < edge_boxes_.size(); ++i)
        if (edge_boxes_[i].overlaps(query, slack)) fn(i);
      return;
    }
    BoundingBox q = query;
    q.min_x -= slack;
    q.min_y -= slack;
    q.max_x += slack;
    q.max_y += slack;
    const auto [x0, y0, x1, y1] = cell_range(q);
    const bool single = x0 == x1 && y0 == y1;
    if (!single) scratch.next_epoch(edge_boxes_.size());
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const std::size_t c = static_cast<std::size_t>(y) * nx_ + x;
        for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
          const std::uint32_t i = cell_edges_[k];
          if (!single) {
            if (scratch.stamp[i] == scratch.epoch) continue;
            scratch.stamp[i] = scratch.epoch;
          }
          if (edge_boxes_[i].overlaps(query, slack)) fn(i);
        }
      }
  }

 private:
  static constexpr std::size_t kLinearScanEdges = 16;

  struct CellRange {
    int x0, y0, x1, y1;
  };
  CellRange cell_range(const BoundingBox& b) const {
    const auto clampi = [](double v, int hi) { return std::clamp(static_cast<int>(std::floor(v)), 0, hi - 1); };
    return {clampi((b.min_x - box_.min_x) / cw_, nx_), clampi((b.min_y - box_.min_y) / ch_, ny_),
            clampi((b.max_x - box_.min_x) / cw_, nx_), clampi((b.max_y - box_.min_y) / ch_, ny_)};
  }

  SimplePolygon poly_;
  BoundingBox box_;
  double perimeter_ = 0.0;
  double area_ = 0.0;
  std::vector<BoundingBox> edge_boxes_;
  int nx_ = 0, ny_ = 0;
  double cw_ = 0.0, ch_ = 0.0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_edges_;
  std::vector<std::uint32_t> occupancy_;
};

/// Trajectory loop in its own frame with motion-invariant data precomputed.
class PreparedTrajectory {
 public:
  static constexpr std::size_t kChunk = 8;  ///< edges per bounding circle

  explicit PreparedTrajectory(const SimplePolygon& loop) : poly_(loop) {
    const auto v = poly_.vertices();
    const std::size_t m = v.size();
    edge_len_.resize(m);
    prefix_.assign(m + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      edge_len_[j] = distance(v[j], v[(j + 1) % m]);
      prefix_[j + 1] = prefix_[j] + edge_len_[j];
    }
    for (std::size_t j = 0; j < m; j += kChunk) {
      const std::size_t end = std::min(j + kChunk, m);
      BoundingBox b;
      for (std::size_t k = j; k <= end; ++k) b.expand(v[k % m]);
      Chunk c{j, end, b.center(), 0.0};
      for (std::size_t k = j; k <= end; ++k) c.radius = std::max(c.radius, distance(v[k % m], c.center));
      chunks_.push_back(c);
    }
    BoundingBox all = bounding_box(v);
    center_ = all.center();
    radius_ = circumradius_about(poly_, center_);
  }

  struct Chunk {
    std::size_t first_edge, end_edge;
    Point center;
    double radius;
  };

  const SimplePolygon& polygon() const { return poly_; }
  std::span<const Point> vertices() const { return poly_.vertices(); }
  double perimeter() const { return prefix_.back(); }
  double edge_length(std::size_t j) const { return edge_len_[j]; }
  /// Arc length from vertex 0 to the point at parameter s on edge e.
  double arc_position(std::size_t e, double s) const { return prefix_[e] + s * edge_len_[e]; }
  /// Inverse of arc_position for a position in [0, perimeter).
  std::pair<std::size_t, double> locate_arc(double pos) const {
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), pos);
    std::size_t e = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - prefix_.begin() - 1, 0));
    e = std::min(e, edge_len_.size() - 1);
    return {e, std::clamp((pos - prefix_[e]) / edge_len_[e], 0.0, 1.0)};
  }
  std::span<const Chunk> chunks() const { return chunks_; }
  Point center() const { return center_; }
  double radius() const { return radius_; }

 private:
  SimplePolygon poly_;
  std::vector<double> edge_len_;
  std::vector<double> prefix_;
  std::vector<Chunk> chunks_;
  Point center_;
  double radius_ = 0.0;
};

/// Reusable buffers for the hot loop; one per worker.
struct ClipScratch {
  std::vector<Point> moved;
  CandidateScratch candidates;
  struct Crossing {
    std::size_t edge;
    double s;
    Point p;
  };
  std::vector<Crossing> crossings;
  std::vector<Crossing> edge_hits;
};

namespace detail {

struct Placement {
  double c, s, tx, ty;
  explicit Placement(const RigidMotion& m) : c(std::cos(m.theta)), s(std::sin(m.theta)), tx(m.tx), ty(m.ty) {}
  Point apply(Point p) const { return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty}; }
  Point unapply(Point q) const {
    const double dx = q.x - tx, dy = q.y - ty;
    return {c * dx + s * dy, -s * dx + c * dy};
  }
};

}  // namespace detail

/**
 * Evaluate `trajectory` placed by `motion` against `domain`.
 *
 * Only chunks of trajectory edges whose bounding circle can reach a domain
 * edge are transformed and intersected. Each run of the loop between two
 * consecutive crossings is classified by its arc-length midpoint; runs must
 * alternate inside/outside, otherwise the report is flagged degenerate.
 */
inline ArcReport clip_boundary(const PreparedDomain& domain, const PreparedTrajectory& trajectory,
                               const RigidMotion& motion, const Tolerance& tol, ArcDetail detail,
                               ClipScratch& scratch) {
  ArcReport rep;
  const auto tv = trajectory.vertices();
  const std::size_t m = tv.size();
  const auto dv = domain.vertices();
  const double P = trajectory.perimeter();
  const detail::Placement place(motion);
  const double e = tol.eps_length;

  const auto circle_box = [](Point c, double r) { return BoundingBox{c.x - r, c.y - r, c.x + r, c.y + r}; };
  if (!domain.box().overlaps(circle_box(place.apply(trajectory.center()), trajectory.radius()), e)) {
    rep.outside_length = P;
    return rep;
  }

  auto& moved = scratch.moved;
  moved.resize(m);
  auto& crossings = scratch.crossings;
  auto& edge_hits = scratch.edge_hits;
  crossings.clear();
  for (const auto& chunk : trajectory.chunks()) {
    if (!domain.may_touch(circle_box(place.apply(chunk.center), chunk.radius), e)) continue;
    for (std::size_t k = chunk.first_edge; k <= chunk.end_edge; ++k) moved[k % m] = place.apply(tv[k % m]);
    for (std::size_t j = chunk.first_edge; j < chunk.end_edge; ++j) {
      const Point a = moved[j], b = moved[(j + 1) % m];
      BoundingBox eb;
      eb.expand(a);
      eb.expand(b);
      edge_hits.clear();
      const Point r = b - a;
      const double reach = e * trajectory.edge_length(j);
      domain.for_each_candidate(eb, e, scratch.candidates, [&](std::size_t i) {
        const Point d0 = dv[i], d1 = dv[(i + 1) % dv.size()];
        // Both domain endpoints clearly on one side of the edge's line: no contact.
        const double o0 = cross(r, d0 - a), o1 = cross(r, d1 - a);
        if ((o0 > reach && o1 > reach) || (o0 < -reach && o1 < -reach)) return;
        const SegmentHit hit = segment_intersection(a, b, d0, d1, tol);
        if (hit.kind == HitKind::Proper)
          edge_hits.push_back({j, hit.s, hit.point});
        else if (hit.kind == HitKind::Degenerate)
          rep.degenerate = true;
      });
      if (edge_hits.size() > 1)
        std::sort(edge_hits.begin(), edge_hits.end(), [](const auto& x, const auto& y) { return x.s < y.s; });
      crossings.insert(crossings.end(), edge_hits.begin(), edge_hits.end());
    }
  }
  const std::size_t n = crossings.size();
  rep.crossing_count = static_cast<int>(n);
  const bool keep = detail == ArcDetail::Polylines;

  if (n == 0) {
    const Location first = domain.locate(place.apply(tv[0]), tol, scratch.candidates);
    if (first == Location::OnBoundary) rep.degenerate = true;
    if (first == Location::Inside) {
      rep.classification = Classification::TrajectoryInsideDomain;
      rep.inside_length = P;
      Arc arc;
      arc.length = P;
      if (keep) {
        for (std::size_t k = 0; k <= m; ++k) arc.polyline.push_back(place.apply(tv[k % m]));
      }
      rep.arcs.push_back(std::move(arc));
      return rep;
    }
    rep.outside_length = P;
    // Covering test in the trajectory's own frame.
    const Location cover = point_in_polygon(place.unapply(dv[0]), tv, tol);
    if (cover == Location::OnBoundary) rep.degenerate = true;
    rep.classification = cover == Location::Inside ? Classification::DomainInsideTrajectory : Classification::Disjoint;
    return rep;
  }

  rep.classification = Classification::Crossing;
  if (n % 2 != 0) rep.degenerate = true;

  int previous = -1, first_status = -1;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& from = crossings[k];
    const auto& to = crossings[(k + 1) % n];
    const double start = trajectory.arc_position(from.edge, from.s);
    double stop = trajectory.arc_position(to.edge, to.s);
    if (k + 1 == n || stop <= start) stop += P;  // wraps through vertex 0
    if (n == 1) stop = start + P;
    const double run_length = stop - start;

    double mid = start + 0.5 * run_length;
    if (mid >= P) mid -= P;
    const auto [me, ms] = trajectory.locate_arc(mid);
    const Point a = tv[me], b = tv[(me + 1) % m];
    const Point probe = place.apply(a + (b - a) * ms);

    const Location where = domain.locate(probe, tol, scratch.candidates);
    if (where == Location::OnBoundary) rep.degenerate = true;
    const int status = where == Location::Inside ? 1 : 0;
    if (previous >= 0 && status == previous) rep.degenerate = true;  // runs must alternate
    if (k == 0) first_status = status;
    previous = status;

    if (status == 1) {
      Arc arc;
      arc.length = run_length;
      if (keep) {
        arc.polyline.push_back(from.p);
        if (!(from.edge == to.edge && to.s > from.s && k + 1 != n)) {
          std::size_t v = (from.edge + 1) % m;
          for (;;) {
            arc.polyline.push_back(place.apply(tv[v]));
            if (v == to.edge) break;
            v = (v + 1) % m;
          }
        }
        arc.polyline.push_back(to.p);
      }
      rep.inside_length += run_length;
      rep.arcs.push_back(std::move(arc));
    } else {
      rep.outside_length += run_length;
    }
  }
  if (n > 1 && previous == first_status) rep.degenerate = true;
  return rep;
}

inline ArcReport clip_boundary(const PreparedDomain& domain, const SimplePolygon& trajectory, const RigidMotion& motion,
                               const Tolerance& tol, ArcDetail detail = ArcDetail::Lengths) {
  ClipScratch scratch;
  return clip_boundary(domain, PreparedTrajectory(trajectory), motion, tol, detail, scratch);
}

inline ArcReport clip_boundary(const SimplePolygon& domain, const SimplePolygon& trajectory, const RigidMotion& motion,
                               const Tolerance& tol, ArcDetail detail = ArcDetail::Lengths) {
  return clip_boundary(PreparedDomain(domain), trajectory, motion, tol, detail);
}

/// True iff every vertex of `inner` is strictly inside and no boundary contact exists.
inline bool classify_containment(const PreparedDomain& outer, std::span<const Point> inner, const Tolerance& tol,
                                 CandidateScratch& scratch) {
  const BoundingBox ib = bounding_box(inner);
  if (ib.min_x < outer.box().min_x || ib.max_x > outer.box().max_x || ib.min_y < outer.box().min_y ||
      ib.max_y > outer.box().max_y)
    return false;
  const auto ov = outer.vertices();
  const std::size_t m = inner.size();
  for (std::size_t j = 0; j < m; ++j) {
    const Point a = inner[j], b = inner[(j + 1) % m];
    BoundingBox eb;
    eb.expand(a);
    eb.expand(b);
    bool touched = false;
    outer.for_each_candidate(eb, tol.eps_length, scratch, [&](std::size_t i) {
      if (!touched && segment_intersection(a, b, ov[i], ov[(i + 1) % ov.size()], tol).kind != HitKind::None)
        touched = true;
    });
    if (touched) return false;
  }
  for (const Point& p : inner)
    if (outer.locate(p, tol, scratch) != Location::Inside) return false;
  return true;
}

inline bool classify_containment(const SimplePolygon& outer, const SimplePolygon& inner) {
  CandidateScratch scratch;
  return classify_containment(PreparedDomain(outer), inner.vertices(), default_tolerance(outer, inner), scratch);
}

}  // namespace meanarc
