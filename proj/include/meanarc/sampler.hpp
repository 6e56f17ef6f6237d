#pragma once
// Uniform sampling of rigid motions under dK = dx dy dtheta over a window
// that covers every placement able to touch the domain.

#include <cstdint>
#include <numbers>
#include <vector>

#include "meanarc/arc_engine.hpp"
#include "meanarc/geometry.hpp"
#include "meanarc/rng.hpp"

namespace meanarc {

struct DegenerateFlood : Error {
  using Error::Error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
};

/**
 * Range of positions for the trajectory's reference point; theta spans
 * [0, 2 pi). Any placement whose reference point lies outside is disjoint
 * from the domain.
 */
struct SamplingWindow {
  Interval x;
  Interval y;
  Point ref;  ///< reference point of the trajectory, in its own frame

  double measure() const { return x.length() * y.length() * 2.0 * std::numbers::pi; }
  bool contains(Point p) const { return p.x >= x.lo && p.x <= x.hi && p.y >= y.lo && p.y <= y.hi; }

  /// Rescale both intervals about their centres.
  SamplingWindow scaled(double factor) const {
    SamplingWindow w = *this;
    const auto sc = [factor](Interval iv) {
      const double c = iv.center(), h = 0.5 * iv.length() * factor;
      return Interval{c - h, c + h};
    };
    w.x = sc(x);
    w.y = sc(y);
    return w;
  }

  /// Motion that rotates by theta and puts `ref` at `at`.
  RigidMotion motion_for(double theta, Point at) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return RigidMotion(theta, at.x - (c * ref.x - s * ref.y), at.y - (s * ref.x + c * ref.y));
  }

  /// Where `ref` lands under m.
  Point reference_position(const RigidMotion& m) const { return m.apply(ref); }
};

/// Domain bounding box inflated on every side by the trajectory's circumradius about `ref`.
inline SamplingWindow build_window(const SimplePolygon& domain, const SimplePolygon& trajectory, Point ref) {
  const BoundingBox b = bounding_box(domain);
  const double r = circumradius_about(trajectory, ref);
  return {{b.min_x - r, b.max_x + r}, {b.min_y - r, b.max_y + r}, ref};
}

inline SamplingWindow build_window(const SimplePolygon& domain, const SimplePolygon& trajectory) {
  return build_window(domain, trajectory, centroid(trajectory));
}

/// One independent stream of uniformly distributed placements.
class MotionStream {
 public:
  MotionStream(const SamplingWindow& w, std::uint64_t seed, std::uint64_t stream) : w_(w), rng_(seed, stream) {}

  RigidMotion next() {
    const double x = rng_.uniform(w_.x.lo, w_.x.hi);
    const double y = rng_.uniform(w_.y.lo, w_.y.hi);
    const double theta = 2.0 * std::numbers::pi * rng_.uniform();
    return w_.motion_for(theta, {x, y});
  }

 private:
  SamplingWindow w_;
  CounterRng rng_;
};

/// Number of slots assigned to stream `s` when `count` slots are split over `streams`.
constexpr std::uint64_t stream_share(std::uint64_t count, std::uint64_t streams, std::uint64_t s) {
  return count / streams + (s < count % streams ? 1 : 0);
}

/// Streams concatenated in index order.
inline std::vector<RigidMotion> sample_motions(const SamplingWindow& w, std::uint64_t count, std::uint64_t seed,
                                               std::uint64_t streams) {
  if (count < 1 || streams < 1) throw Error("sample_motions needs count >= 1 and streams >= 1");
  std::vector<RigidMotion> out;
  out.reserve(count);
  for (std::uint64_t s = 0; s < streams; ++s) {
    MotionStream ms(w, seed, s);
    for (std::uint64_t i = 0, k = stream_share(count, streams, s); i < k; ++i) out.push_back(ms.next());
  }
  return out;
}

enum class ResampleDecision { Accept, Resample };

inline ResampleDecision resample_policy(const ArcReport& r) {
  return (r.degenerate || r.crossing_count % 2 != 0) ? ResampleDecision::Resample : ResampleDecision::Accept;
}

inline constexpr int kResampleCap = 100;
inline constexpr double kFloodFraction = 1e-3;

}  // namespace meanarc
