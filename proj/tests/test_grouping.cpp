#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "xline/grouping.hpp"

using namespace xline;

namespace {

LineSegment seg(double x0, double y0, double x1, double y1, double score = 1.0) { return {{x0, y0}, {x1, y1}, score}; }

PixelRegion head_blob(std::vector<Cell> cells) {
  return make_region(std::move(cells), Heatmap{Grid<double>(40, 40, 1.0), 4, Channel::Head});
}

Point rigid(Point p, double angle, Point shift) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Point{c * p.x - s * p.y, s * p.x + c * p.y} + shift;
}

// A cross-shaped aircraft: fuselage along `heading` through `center`.
std::pair<LineSegment, LineSegment> cross_at(Point center, double heading, double len, double span, double s1,
                                             double s2) {
  const Point h{std::cos(heading), std::sin(heading)};
  const Point n{-h.y, h.x};
  return {{center - 0.5 * len * h, center + 0.5 * len * h, s1}, {center - 0.5 * span * n, center + 0.5 * span * n, s2}};
}

bool same_detections(std::vector<AircraftDetection> a, std::vector<AircraftDetection> b) {
  auto key = [](const AircraftDetection& d) {
    return std::tuple(detail::canonical_key(d.l1), detail::canonical_key(d.l2), d.score);
  };
  auto less = [&](const AircraftDetection& x, const AircraftDetection& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (key(a[i]) != key(b[i])) return false;
  return true;
}

}  // namespace

TEST(GroupingConfig, Defaults) {
  const GroupingConfig cfg;
  EXPECT_EQ(cfg.midpoint_tol, 0.15);
  EXPECT_EQ(cfg.angle_min, 60.0);
  EXPECT_EQ(cfg.angle_max, 120.0);
  EXPECT_EQ(cfg.extension_tol, 0.1);
  EXPECT_EQ(cfg.head_radius, 0.25);
  GroupingConfig bad;
  bad.angle_min = 130;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.midpoint_tol = 0.6;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(PairPredicate, PerpendicularBisector) {
  EXPECT_TRUE(pair_predicate(seg(0, 0, 10, 0), seg(5, -3, 5, 3), {}));
}

TEST(PairPredicate, OffCenterCrossingFails) {
  const auto hit = line_crossing(seg(0, 0, 10, 0), seg(5, -1, 5, 5));
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->along_l2, 1.0 / 6, 1e-15);
  EXPECT_FALSE(pair_predicate(seg(0, 0, 10, 0), seg(5, -1, 5, 5), {}));
}

TEST(PairPredicate, ShallowAngleFails) {
  EXPECT_NEAR(acute_angle_deg(seg(0, 0, 10, 0), seg(5, -1, 15, 1)), 11.309932474020215, 1e-12);
  EXPECT_FALSE(pair_predicate(seg(0, 0, 10, 0), seg(5, -1, 15, 1), {}));
}

TEST(PairPredicate, ExtensionTolerance) {
  // Wing crosses the fuselage line 0.5 units past p1 (5% of |l1|).
  EXPECT_TRUE(pair_predicate(seg(0, 0, 10, 0), seg(10.5, -3, 10.5, 3), {}));
  EXPECT_FALSE(pair_predicate(seg(0, 0, 10, 0), seg(11.5, -3, 11.5, 3), {}));
  EXPECT_FALSE(pair_predicate(seg(0, 0, 10, 0), seg(20, 0, 30, 0), {}));  // parallel
}

TEST(PairPredicate, AngleBounds) {
  const double a60 = 60.0 * kPi / 180, a59 = 59.0 * kPi / 180;
  EXPECT_TRUE(pair_predicate(seg(-10, 0, 10, 0), seg(-std::cos(a60), -std::sin(a60), std::cos(a60), std::sin(a60)), {}));
  EXPECT_FALSE(pair_predicate(seg(-10, 0, 10, 0), seg(-std::cos(a59), -std::sin(a59), std::cos(a59), std::sin(a59)), {}));
}

TEST(PairPredicate, SymmetricInWingEndpoints) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10);
  int admitted = 0;
  for (int i = 0; i < 2000; ++i) {
    const LineSegment l1 = seg(u(rng), u(rng), u(rng), u(rng));
    const LineSegment l2 = seg(u(rng), u(rng), u(rng), u(rng));
    EXPECT_EQ(pair_predicate(l1, l2, {}), pair_predicate(l1, l2.reversed(), {}));
    admitted += pair_predicate(l1, l2, {});
  }
  EXPECT_GT(admitted, 0);
}

TEST(PairPredicate, RigidMotionInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    // Half the fixtures are near-aircraft crosses so both outcomes occur.
    LineSegment l1, l2;
    if (i % 2 == 0) {
      std::tie(l1, l2) = cross_at({50 * u(rng), 50 * u(rng)}, 2 * kPi * u(rng), 20 + 40 * u(rng), 20 + 40 * u(rng), 1, 1);
      l2.p0 = l2.p0 + Point{6 * u(rng) - 3, 6 * u(rng) - 3};
    } else {
      l1 = seg(50 * u(rng), 50 * u(rng), 50 * u(rng), 50 * u(rng));
      l2 = seg(50 * u(rng), 50 * u(rng), 50 * u(rng), 50 * u(rng));
    }
    const bool base = pair_predicate(l1, l2, {});
    for (int k = 0; k < 10; ++k) {
      const double angle = 2 * kPi * u(rng);
      const Point shift{1000 * u(rng) - 500, 1000 * u(rng) - 500};
      const LineSegment m1{rigid(l1.p0, angle, shift), rigid(l1.p1, angle, shift), 1};
      const LineSegment m2{rigid(l2.p0, angle, shift), rigid(l2.p1, angle, shift), 1};
      EXPECT_NEAR(acute_angle_deg(m1, m2), acute_angle_deg(l1, l2), 1e-9);
      EXPECT_EQ(pair_predicate(m1, m2, {}), base);
    }
  }
}

TEST(PairSegments, SinglePair) {
  const auto dets = pair_segments({seg(0, 0, 10, 0, 0.8)}, {seg(5, -3, 5, 3, 0.6)}, {});
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_DOUBLE_EQ(dets[0].score, 0.7);
  EXPECT_FALSE(dets[0].head_resolved);
}

TEST(PairSegments, TwoParallelAircraft) {
  const auto [f1, w1] = cross_at({50, 50}, 0.0, 60, 50, 1, 1);
  const auto [f2, w2] = cross_at({50, 150}, 0.0, 60, 50, 1, 1);
  const std::vector<LineSegment> fs{f1, f2}, ws{w1, w2};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(pair_predicate(fs[i], ws[j], {}), i == j);
  const auto dets = pair_segments(fs, ws, {});
  ASSERT_EQ(dets.size(), 2u);
  for (const auto& d : dets) EXPECT_EQ(d.l1.center().y, d.l2.center().y);
}

TEST(PairSegments, HigherScoredWingWins) {
  const LineSegment f = seg(0, 0, 10, 0, 0.9);
  const LineSegment weak = seg(5, -3, 5, 3, 0.4);
  const LineSegment strong = seg(5.2, -3, 5.2, 3, 0.7);
  for (const auto& wings : {std::vector{weak, strong}, std::vector{strong, weak}}) {
    const auto dets = pair_segments({f}, wings, {});
    ASSERT_EQ(dets.size(), 1u);
    EXPECT_EQ(dets[0].l2, strong);
  }
}

TEST(PairSegments, OneToOneAndPermutationInvariant) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<LineSegment> fs, ws;
    const int n = 2 + i % 6;
    for (int k = 0; k < n; ++k) {
      // Crowded scene so segments compete.
      const double score = std::round(4 * u(rng)) / 4;
      auto [f, w] = cross_at({100 * u(rng), 100 * u(rng)}, 2 * kPi * u(rng), 30 + 30 * u(rng), 30 + 30 * u(rng),
                             score, 1 - score);
      fs.push_back(f);
      ws.push_back(w);
    }
    const auto base = pair_segments(fs, ws, {});
    EXPECT_LE(base.size(), std::min(fs.size(), ws.size()));
    for (std::size_t a = 0; a < base.size(); ++a)
      for (std::size_t b = a + 1; b < base.size(); ++b) {
        EXPECT_NE(base[a].l1, base[b].l1);
        EXPECT_NE(base[a].l2, base[b].l2);
      }
    for (int k = 0; k < 10; ++k) {
      std::shuffle(fs.begin(), fs.end(), rng);
      std::shuffle(ws.begin(), ws.end(), rng);
      EXPECT_TRUE(same_detections(pair_segments(fs, ws, {}), base));
    }
  }
}

TEST(MatchHead, BlobAtP1Swaps) {
  const AircraftDetection det{seg(2, 22, 22, 22), seg(12, 12, 12, 32), 1.0, false};
  const AircraftDetection out = match_head(det, {head_blob({{5, 5}})}, 4);
  EXPECT_TRUE(out.head_resolved);
  EXPECT_EQ(out.l1.p0, (Point{22, 22}));
  EXPECT_EQ(out.l1.p1, (Point{2, 22}));
}

TEST(MatchHead, NoHeads) {
  const AircraftDetection det{seg(2, 22, 22, 22), seg(12, 12, 12, 32), 1.0, true};
  const AircraftDetection out = match_head(det, {}, 4);
  EXPECT_FALSE(out.head_resolved);
  EXPECT_EQ(out.l1, det.l1);
}

TEST(MatchHead, EquidistantKeepsOrder) {
  const AircraftDetection det{seg(2, 22, 22, 22), seg(12, 12, 12, 32), 1.0, false};
  const PixelRegion mid = head_blob({{2, 5}, {3, 5}});  // centroid pixel (12, 22)
  GroupingConfig wide;
  wide.head_radius = 0.6;
  const AircraftDetection out = match_head(det, {mid}, 4, wide);
  EXPECT_TRUE(out.head_resolved);
  EXPECT_EQ(out.l1, det.l1);
  // Half the fuselage away is outside the default radius.
  EXPECT_FALSE(match_head(det, {mid}, 4).head_resolved);
}

TEST(MatchHead, NearestRegionDecides) {
  const AircraftDetection det{seg(2, 22, 42, 22), seg(22, 12, 22, 32), 1.0, false};
  // One blob 4 px from p1, another 8 px from p0.
  const AircraftDetection out = match_head(det, {head_blob({{0, 7}}), head_blob({{10, 4}})}, 4);
  EXPECT_TRUE(out.head_resolved);
  EXPECT_EQ(out.l1.p0, (Point{42, 22}));
  EXPECT_FALSE(match_head(det, {head_blob({{5, 0}})}, 4).head_resolved);
}
