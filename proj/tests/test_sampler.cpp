#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace meanarc;
using namespace meanarc::testing;

namespace {

constexpr double pi = std::numbers::pi;

TEST(Window, InflatesByCircumradiusAboutCentroid) {
  const SamplingWindow w = build_window(unit_square(), shape("circle:r=0.5"));
  EXPECT_NEAR(w.x.lo, -0.5, 1e-12);
  EXPECT_NEAR(w.x.hi, 1.5, 1e-12);
  EXPECT_NEAR(w.y.lo, -0.5, 1e-12);
  EXPECT_NEAR(w.y.hi, 1.5, 1e-12);
  EXPECT_NEAR(w.measure(), 4 * 2 * pi, 1e-10);
}

TEST(Window, RimReferenceDoublesInflation) {
  const SamplingWindow w = build_window(unit_square(), shape("circle:r=0.5"), {0.5, 0.0});
  EXPECT_NEAR(w.x.lo, -1.0, 1e-12);
  EXPECT_NEAR(w.y.hi, 2.0, 1e-12);
  EXPECT_NEAR(w.measure(), 9 * 2 * pi, 1e-10);
}

TEST(Window, MotionForPlacesReference) {
  const SamplingWindow w = build_window(unit_square(), lshape());
  const RigidMotion m = w.motion_for(1.2, {0.3, -0.4});
  const Point at = w.reference_position(m);
  EXPECT_NEAR(at.x, 0.3, 1e-14);
  EXPECT_NEAR(at.y, -0.4, 1e-14);
}

TEST(Window, CoversEveryInteractingPlacement) {
  const struct {
    const char *d, *t;
  } pairs[] = {{"star:outer=1,inner=0.4", "ellipse:a=0.7,b=0.2,res=32"},
               {"lshape", "comb:teeth=2,tooth_w=0.2,tooth_h=0.6,gap=0.2,base_h=0.2"},
               {"rect:w=3,h=0.5", "star:outer=0.9,inner=0.2,points=3"}};
  for (const auto& p : pairs) {
    const SimplePolygon d = shape(p.d), t = shape(p.t);
    const SamplingWindow w = build_window(d, t);
    const SamplingWindow big = w.scaled(1.1);
    const PreparedDomain pd(d);
    const PreparedTrajectory pt(t);
    ClipScratch scratch;
    MotionStream ms(big, 31, 0);
    int interacting = 0;
    for (int k = 0; k < 100000; ++k) {
      const RigidMotion m = ms.next();
      const ArcReport r = clip_boundary(pd, pt, m, default_tolerance(d, t), ArcDetail::Lengths, scratch);
      if (r.classification == Classification::Disjoint) continue;
      ++interacting;
      ASSERT_TRUE(w.contains(w.reference_position(m))) << p.d;
    }
    EXPECT_GT(interacting, 1000);
  }
}

TEST(Window, PushedOutsideBoundaryIsDisjoint) {
  const SimplePolygon d = shape("star:outer=1,inner=0.4"), t = shape("keyhole:r=0.3,slot_w=0.2,slot_h=0.4");
  const SamplingWindow w = build_window(d, t);
  CounterRng rng(4, 0);
  const double push = 1e-6;
  for (int k = 0; k < 4000; ++k) {
    const double u = rng.uniform();
    Point at;
    switch (k % 4) {
      case 0: at = {w.x.lo - push, w.y.lo + u * w.y.length()}; break;
      case 1: at = {w.x.hi + push, w.y.lo + u * w.y.length()}; break;
      case 2: at = {w.x.lo + u * w.x.length(), w.y.lo - push}; break;
      default: at = {w.x.lo + u * w.x.length(), w.y.hi + push}; break;
    }
    const ArcReport r = clip_boundary(d, t, w.motion_for(rng.uniform(0, 2 * pi), at), default_tolerance(d, t));
    ASSERT_EQ(r.classification, Classification::Disjoint);
  }
}

TEST(Window, Scaled) {
  const SamplingWindow w = build_window(unit_square(), shape("circle:r=0.5"));
  const SamplingWindow h = w.scaled(0.5);
  EXPECT_NEAR(h.x.center(), w.x.center(), 1e-15);
  EXPECT_NEAR(h.measure(), w.measure() / 4, 1e-12);
}

TEST(Sampling, Deterministic) {
  const SamplingWindow w = build_window(unit_square(), lshape());
  const auto a = sample_motions(w, 1000, 42, 4), b = sample_motions(w, 1000, 42, 4);
  ASSERT_EQ(a.size(), 1000u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].theta, b[i].theta);
    EXPECT_EQ(a[i].tx, b[i].tx);
    EXPECT_EQ(a[i].ty, b[i].ty);
  }
  const auto c = sample_motions(w, 1000, 43, 4);
  EXPECT_NE(a[0].theta, c[0].theta);
}

TEST(Sampling, StreamsConcatenateInOrder) {
  const SamplingWindow w = build_window(unit_square(), lshape());
  const auto all = sample_motions(w, 1003, 7, 4);
  std::size_t i = 0;
  for (std::uint64_t s = 0; s < 4; ++s) {
    MotionStream ms(w, 7, s);
    for (std::uint64_t k = 0; k < stream_share(1003, 4, s); ++k, ++i) EXPECT_EQ(ms.next().tx, all[i].tx);
  }
  EXPECT_EQ(i, all.size());
  EXPECT_EQ(stream_share(1003, 4, 0), 251u);
  EXPECT_EQ(stream_share(1003, 4, 3), 250u);
}

TEST(Sampling, UniformMoments) {
  const SamplingWindow w = build_window(unit_square(), shape("circle:r=0.5"));
  const auto m = sample_motions(w, 1'000'000, 1, 16);
  double st = 0, sx = 0, sy = 0;
  for (const auto& r : m) {
    st += r.theta;
    const Point at = w.reference_position(r);
    sx += at.x;
    sy += at.y;
    ASSERT_TRUE(w.contains(at));
    ASSERT_GE(r.theta, 0.0);
    ASSERT_LT(r.theta, 2 * pi);
  }
  const double n = static_cast<double>(m.size());
  EXPECT_NEAR(st / n, pi, 3 * (pi / std::sqrt(3.0)) / std::sqrt(n));
  const double sd_x = w.x.length() / std::sqrt(12.0);
  EXPECT_NEAR(sx / n, w.x.center(), 3 * sd_x / std::sqrt(n));
  EXPECT_NEAR(sy / n, w.y.center(), 3 * sd_x / std::sqrt(n));
}

TEST(Sampling, RejectsEmptyRequests) {
  const SamplingWindow w = build_window(unit_square(), lshape());
  EXPECT_THROW(sample_motions(w, 0, 1, 1), Error);
  EXPECT_THROW(sample_motions(w, 10, 1, 0), Error);
}

TEST(Rng, StreamsDiffer) {
  CounterRng a(1, 0), b(1, 1), c(2, 0);
  const auto x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_NE(x, c.next());
  CounterRng d(1, 0);
  EXPECT_EQ(x, d.next());
  for (int k = 0; k < 10000; ++k) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
