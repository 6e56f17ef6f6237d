#pragma once
// Closed-form kinematic measures and mean arc lengths. Pure algebra on
// (area, perimeter) pairs; d is the explored domain, t the trajectory shape.

#include <numbers>

#include "meanarc/geometry.hpp"

namespace meanarc {

struct ShapeSummary {
  double area = 0.0;
  double perimeter = 0.0;
};

inline ShapeSummary summarize(const SimplePolygon& p) { return {area(p), perimeter(p)}; }

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Measure of inside arc length over all placements: 2 pi A_d P_t.
constexpr double blaschke_S(ShapeSummary d, ShapeSummary t) { return kTwoPi * d.area * t.perimeter; }

/// Measure of boundary crossings: 4 P_d P_t.
constexpr double poincare_Ni(ShapeSummary d, ShapeSummary t) { return 4.0 * d.perimeter * t.perimeter; }

/// Mean arc length once no placement is fully contained: pi A_d / P_d.
constexpr double cauchy_mean(ShapeSummary d) { return std::numbers::pi * d.area / d.perimeter; }

/// Measure of overlapping placements of two convex shapes.
constexpr double santalo_Ntot(ShapeSummary d, ShapeSummary t) {
  return kTwoPi * (d.area + t.area) + d.perimeter * t.perimeter;
}

/// Contained-placement measure in the small-trajectory regime, N_tot - N_i/2.
constexpr double contained_measure_small(ShapeSummary d, ShapeSummary t) {
  return kTwoPi * (d.area + t.area) - d.perimeter * t.perimeter;
}

/// Partial-overlap measure in the small-trajectory regime, N_i/2.
constexpr double partial_measure_small(ShapeSummary d, ShapeSummary t) { return 2.0 * d.perimeter * t.perimeter; }

struct SmallTrajectoryMean {
  double value = 0.0;
  bool negative = false;  ///< set when the summaries violate the isoperimetric bound
};

/// (P_d P_t - 2 pi A_t) / (2 P_d); convex pairs, small trajectories.
constexpr SmallTrajectoryMean small_trajectory_mean(ShapeSummary d, ShapeSummary t) {
  const double v = (d.perimeter * t.perimeter - kTwoPi * t.area) / (2.0 * d.perimeter);
  return {v, v < 0.0};
}

/**
 * Smallest scale at which the small-trajectory containment measure of the
 * scaled template reaches zero, or its minimum when it never does. Below it
 * the small-trajectory mean applies; above it the Cauchy plateau.
 */
inline double small_trajectory_crossover(ShapeSummary d, ShapeSummary t) {
  const double b = d.perimeter * t.perimeter, a2 = 2.0 * kTwoPi * t.area;
  const double disc = b * b - 2.0 * a2 * kTwoPi * d.area;
  return (b - std::sqrt(std::max(0.0, disc))) / a2;
}

/// Mean inside arc length over all overlapping placements of a convex pair.
constexpr double mazzolo_mean(ShapeSummary d, ShapeSummary t) { return blaschke_S(d, t) / santalo_Ntot(d, t); }

}  // namespace meanarc
