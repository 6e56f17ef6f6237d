#pragma once
/**
 * @file critical.hpp
 * @brief Largest scale at which a trajectory shape still fits inside a domain,
 * and the fits / does-not-fit decision at a fixed scale.
 *
 * Containment at a fixed scale is searched over (x, y, theta) by maximising a
 * clearance score: the smallest signed distance of a trajectory vertex to the
 * domain boundary (positive inside), combined with the smallest distance of a
 * domain vertex outside the trajectory. A positive score is only a candidate;
 * classify_containment has the last word. The search can miss placements, so
 * find_critical_scale returns a lower bound.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "meanarc/arc_engine.hpp"
#include "meanarc/estimators.hpp"
#include "meanarc/geometry.hpp"
#include "meanarc/rng.hpp"
#include "meanarc/shapes.hpp"

namespace meanarc {

struct BoundsInvalid : Error {
  using Error::Error;
};

struct SearchOptions {
  int grid = 10;           ///< seed positions per axis over the domain box
  int angles = 8;          ///< seed orientations
  int refine_starts = 4;   ///< best seeds handed to the local search
  std::uint64_t budget = 20000;  ///< clearance evaluations per fixed-scale search
  double min_step = 1e-7;  ///< relative to the domain box diagonal
};

struct ContainmentResult {
  std::optional<RigidMotion> witness;  ///< motion of the centred shape
  RigidMotion best;
  double best_clearance = -std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;
};

class ContainmentSearch {
 public:
  ContainmentSearch(const PreparedDomain& domain, const Tolerance& tol, SearchOptions opt = {})
      : domain_(domain), tol_(tol), opt_(opt) {}

  /// `shape` must be centred on its centroid. Warm starts are tried before grid seeds.
  ContainmentResult search(const SimplePolygon& shape, std::uint64_t seed,
                           std::span<const RigidMotion> warm = {}) const {
    ContainmentResult res;
    const BoundingBox box = domain_.box();
    const double diag = box.diagonal();
    const auto verts = shape.vertices();
    const double radius = std::max(circumradius_about(shape, {0, 0}), 1e-300);
    std::vector<Point> moved;
    CandidateScratch scratch;

    struct Candidate {
      double x, y, theta, score;
    };
    const auto evaluate = [&](double x, double y, double th, double bail) {
      ++res.evaluations;
      transform_into(verts, RigidMotion(th, x, y), moved);
      return clearance(moved, bail);
    };
    const auto accept = [&](const Candidate& c) {
      if (c.score > res.best_clearance) {
        res.best_clearance = c.score;
        res.best = RigidMotion(c.theta, c.x, c.y);
      }
      if (c.score <= 0.0) return false;
      transform_into(verts, RigidMotion(c.theta, c.x, c.y), moved);
      if (!classify_containment(domain_, moved, tol_, scratch)) return false;
      res.witness = RigidMotion(c.theta, c.x, c.y);
      return true;
    };
    const double ninf = -std::numeric_limits<double>::infinity();

    std::vector<Candidate> seeds;
    for (const RigidMotion& w : warm) {
      Candidate c{w.tx, w.ty, w.theta, evaluate(w.tx, w.ty, w.theta, ninf)};
      if (accept(c)) return res;
      seeds.push_back(c);
    }
    const std::size_t warm_count = seeds.size();

    CounterRng rng(seed, 0x5eed);
    std::vector<Candidate> grid;
    const auto dv = domain_.vertices();
    for (int i = 0; i < opt_.grid; ++i)
      for (int j = 0; j < opt_.grid; ++j) {
        const double x = box.min_x + box.width() * (i + 0.25 + 0.5 * rng.uniform()) / opt_.grid;
        const double y = box.min_y + box.height() * (j + 0.25 + 0.5 * rng.uniform()) / opt_.grid;
        if (point_in_polygon({x, y}, dv, tol_) != Location::Inside) continue;
        const double offset = rng.uniform();
        for (int a = 0; a < opt_.angles; ++a) {
          const double th = 2.0 * std::numbers::pi * (a + offset) / opt_.angles;
          Candidate c{x, y, th, evaluate(x, y, th, ninf)};
          if (accept(c)) return res;
          grid.push_back(c);
        }
      }
    std::sort(grid.begin(), grid.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    // Keep distinct positions among the best seeds.
    const double sep = 0.5 * diag / opt_.grid;
    for (const Candidate& c : grid) {
      if (seeds.size() - warm_count >= static_cast<std::size_t>(opt_.refine_starts)) break;
      bool near = false;
      for (std::size_t k = warm_count; k < seeds.size(); ++k)
        near = near || std::hypot(seeds[k].x - c.x, seeds[k].y - c.y) < sep;
      if (!near) seeds.push_back(c);
    }

    // Pattern search: axis moves, then diagonal moves, then random probes; halve on failure.
    std::vector<std::array<int, 3>> dirs;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c)
          if (a || b || c) dirs.push_back({a, b, c});
    std::stable_sort(dirs.begin(), dirs.end(), [](const auto& p, const auto& q) {
      return std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]) < std::abs(q[0]) + std::abs(q[1]) + std::abs(q[2]);
    });

    const std::uint64_t per_start = opt_.budget / std::max<std::size_t>(seeds.size(), 1);
    for (Candidate cur : seeds) {
      const std::uint64_t stop_at = res.evaluations + per_start;
      double hp = 0.5 * diag / opt_.grid;
      double ht = std::numbers::pi / opt_.angles;
      while (res.evaluations < stop_at && (hp > opt_.min_step * diag || ht * radius > opt_.min_step * diag)) {
        bool moved_any = false;
        const auto probe = [&](double dx, double dy, double dt) {
          const Candidate c{cur.x + dx, cur.y + dy, cur.theta + dt, 0.0};
          const double v = evaluate(c.x, c.y, c.theta, cur.score);
          if (v > cur.score) {
            cur = {c.x, c.y, c.theta, v};
            moved_any = true;
          }
        };
        for (const auto& d : dirs) {
          probe(d[0] * hp, d[1] * hp, d[2] * ht);
          if (moved_any) break;
        }
        for (int r = 0; r < 6 && !moved_any; ++r) {
          const double u = 2 * rng.uniform() - 1, v = 2 * rng.uniform() - 1, w = 2 * rng.uniform() - 1;
          probe(u * hp, v * hp, w * ht);
        }
        if (moved_any) {
          if (accept(cur)) return res;
        } else {
          hp *= 0.5;
          ht *= 0.5;
        }
      }
      if (accept(cur)) return res;
    }
    return res;
  }

 private:
  // min over trajectory vertices of signed distance to the domain (+ inside),
  // and over domain vertices of signed distance to the trajectory (+ outside).
  // Stops early once the running minimum falls to `bail`.
  double clearance(std::span<const Point> moved, double bail) const {
    double best = std::numeric_limits<double>::infinity();
    const auto dv = domain_.vertices();
    for (const Point& p : moved) {
      best = std::min(best, signed_distance(p, dv));
      if (best <= bail) return best;
    }
    for (const Point& q : dv) {
      best = std::min(best, -signed_distance(q, moved));
      if (best <= bail) return best;
    }
    return best;
  }

  const PreparedDomain& domain_;
  Tolerance tol_;
  SearchOptions opt_;
};

// ---- critical scale -------------------------------------------------------

struct LambdaBounds {
  double low = 0.0;
  double high = 0.0;
};

struct CriticalScaleResult {
  double lambda_critical = 0.0;  ///< largest scale with a verified witness
  double lambda_failed = 0.0;    ///< smallest scale at which the search failed
  RigidMotion witness_motion;    ///< places scale(template, lambda_critical)
  std::uint64_t evaluations = 0;
  int refinement_depth = 0;
};

namespace detail {

// Motion of the centred shape -> motion of the shape with centroid c.
inline RigidMotion uncenter(const RigidMotion& m, Point c) { return m.compose(RigidMotion(0.0, -c.x, -c.y)); }

}  // namespace detail

/// Bounds that always bracket: a scale that fits near the deepest grid point, and the equal-area scale.
inline LambdaBounds default_critical_bounds(const SimplePolygon& domain, const SimplePolygon& trajectory_template) {
  const BoundingBox b = bounding_box(domain);
  double depth = 0.0;
  constexpr int n = 64;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point p{b.min_x + b.width() * (i + 0.5) / n, b.min_y + b.height() * (j + 0.5) / n};
      depth = std::max(depth, signed_distance(p, domain.vertices()));
    }
  const double radius = circumradius_about(trajectory_template, centroid(trajectory_template));
  return {0.5 * depth / radius, std::sqrt(area(domain) / area(trajectory_template)) * 1.001};
}

/**
 * Bisection on the scale of `trajectory_template` (scaled about its centroid).
 * The low bound must admit a containing placement and the high bound must
 * not. Stops once the bracket is narrower than rel_tol x low.
 */
inline CriticalScaleResult find_critical_scale(const SimplePolygon& domain, const SimplePolygon& trajectory_template,
                                               LambdaBounds bounds, std::uint64_t placement_budget, std::uint64_t seed,
                                               double rel_tol = 1e-4) {
  if (!(bounds.low > 0.0) || !(bounds.high > bounds.low)) throw BoundsInvalid("need 0 < low < high");
  const PreparedDomain prepared(domain);
  const Point c = centroid(trajectory_template);
  const SimplePolygon base = centered(trajectory_template);
  const double domain_area = prepared.area();
  const double base_area = area(base);

  SearchOptions so;
  so.budget = placement_budget;
  CriticalScaleResult out;
  const auto attempt = [&](double lambda, std::span<const RigidMotion> warm, int level) {
    const SimplePolygon shape = scale(base, lambda);
    const ContainmentSearch search(prepared, default_tolerance(domain, shape), so);
    ContainmentResult r = search.search(shape, derive_seed(seed, static_cast<std::uint64_t>(level)), warm);
    out.evaluations += r.evaluations;
    return r;
  };

  const ContainmentResult at_low = attempt(bounds.low, {}, 0);
  if (!at_low.witness) throw BoundsInvalid("no containing placement found at the low bound");
  // Larger area than the domain can never fit; only search when that does not settle it.
  if (base_area * bounds.high * bounds.high <= domain_area && attempt(bounds.high, {}, 1).witness)
    throw BoundsInvalid("a containing placement exists at the high bound");

  double lo = bounds.low, hi = bounds.high;
  RigidMotion witness = *at_low.witness;
  int depth = 0;
  while (hi - lo > rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    const RigidMotion warm[] = {witness};
    const ContainmentResult r = attempt(mid, warm, depth + 2);
    if (r.witness) {
      lo = mid;
      witness = *r.witness;
    } else {
      hi = mid;
    }
    ++depth;
  }
  out.lambda_critical = lo;
  out.lambda_failed = hi;
  out.witness_motion = detail::uncenter(witness, c);
  out.refinement_depth = depth;
  return out;
}

// ---- embeddability --------------------------------------------------------

struct EmbedReport {
  bool fits = false;                  ///< direct search verdict
  std::optional<RigidMotion> witness; ///< places `candidate` as given
  MeasureEstimate Nc_estimate;
  double nc_z = 0.0;
  bool statistical_fits = false;  ///< Nc > 0 beyond 3 standard errors
  bool verdicts_agree = false;
  std::optional<double> per_arc_mean;  ///< absent when no placement crossed
  double cauchy = 0.0;
  std::optional<double> mean_gap;  ///< cauchy - per_arc_mean
  std::uint64_t search_evaluations = 0;
};

inline EmbedReport test_embeddability(const SimplePolygon& container, const SimplePolygon& candidate,
                                      std::uint64_t samples, const RunOptions& opt, std::uint64_t search_budget = 20000) {
  EmbedReport rep;
  const PreparedDomain prepared(container);
  const Point c = centroid(candidate);
  const SimplePolygon base = centered(candidate);
  SearchOptions so;
  so.budget = search_budget;
  const ContainmentSearch search(prepared, default_tolerance(container, base), so);
  const ContainmentResult found = search.search(base, derive_seed(opt.seed, 0xE3BED));
  rep.search_evaluations = found.evaluations;
  if (found.witness) {
    rep.fits = true;
    rep.witness = detail::uncenter(*found.witness, c);
  }

  const PlacementStudy st = run_placements(prepared, candidate, samples, opt);
  const KinematicMeasures km = measures_from(st);
  rep.Nc_estimate = km.Nc;
  rep.nc_z = km.Nc.std_error > 0.0 ? km.Nc.value / km.Nc.std_error : 0.0;
  rep.statistical_fits = rep.nc_z > 3.0;
  rep.verdicts_agree = rep.fits == rep.statistical_fits;
  rep.cauchy = cauchy_mean(st.domain);
  if (st.tally.crossing > 0) {
    const MeanArcEstimate ma = mean_arc_from(st);
    rep.per_arc_mean = ma.per_arc_mean;
    rep.mean_gap = rep.cauchy - ma.per_arc_mean;
  }
  return rep;
}

}  // namespace meanarc
