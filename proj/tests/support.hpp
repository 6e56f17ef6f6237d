#pragma once
// Shared helpers for the test suites.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "meanarc/meanarc.hpp"

namespace meanarc::testing {

inline SimplePolygon shape(const std::string& spec) { return build(parse_shape_spec(spec)); }

inline SimplePolygon unit_square() { return SimplePolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

inline SimplePolygon lshape() { return SimplePolygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}); }

/// Square of side `side` with lower-left corner at `at`.
inline SimplePolygon square_at(Point at, double side) {
  return SimplePolygon({at, {at.x + side, at.y}, {at.x + side, at.y + side}, {at.x, at.y + side}});
}

/// Circle polygon centred at `c`.
inline SimplePolygon circle_at(Point c, double r, int res = 256) {
  return translate(shape("circle:r=" + std::to_string(r) + ",res=" + std::to_string(res)), c);
}

/// Random simple polygon: star-shaped about the origin with sorted angles and jittered radii.
inline SimplePolygon random_star_shaped(CounterRng& rng, int n) {
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) angles[static_cast<std::size_t>(i)] = 2 * std::numbers::pi * (i + 0.8 * rng.uniform()) / n;
  std::vector<Point> v;
  for (double a : angles) {
    const double r = 0.3 + rng.uniform();
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return SimplePolygon(std::move(v));
}

/// Fraction of `samples` points spaced uniformly by arc length on `loop` that lie inside `domain`.
inline double sampled_inside_fraction(const SimplePolygon& domain, const std::vector<Point>& loop, int samples,
                                      const Tolerance& tol, int* on_boundary = nullptr) {
  const double P = perimeter(loop);
  std::vector<double> prefix(loop.size() + 1, 0.0);
  for (std::size_t i = 0; i < loop.size(); ++i) prefix[i + 1] = prefix[i] + distance(loop[i], loop[(i + 1) % loop.size()]);
  int inside = 0, boundary = 0;
  std::size_t e = 0;
  for (int k = 0; k < samples; ++k) {
    const double pos = P * (k + 0.5) / samples;
    while (prefix[e + 1] < pos) ++e;
    const Point a = loop[e], b = loop[(e + 1) % loop.size()];
    const Point q = a + (b - a) * ((pos - prefix[e]) / (prefix[e + 1] - prefix[e]));
    const Location l = point_in_polygon(q, domain, tol);
    if (l == Location::Inside) ++inside;
    if (l == Location::OnBoundary) ++boundary;
  }
  if (on_boundary) *on_boundary = boundary;
  return static_cast<double>(inside) / samples;
}

}  // namespace meanarc::testing
