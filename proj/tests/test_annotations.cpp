#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "xline/annotations.hpp"
#include "xline/grouping.hpp"

using namespace xline;

namespace {

const Keypoints5 kSample{{0, 10}, {-6, 2}, {-1, -4}, {1, -4}, {6, 2}};

const char* kKpRecord =
    R"({"image_id":"a","height":100,"width":120,"aircraft_kp":[{"head":[50,20],"left_wing":[30,40],)"
    R"("left_tail":[45,70],"right_tail":[55,70],"right_wing":[70,40]}]})";

ErrorKind kind_of(std::string_view text) {
  try {
    parse_annotation_file(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::Io;
}

}  // namespace

TEST(ParseScene, EmptyAircraftList) {
  const SceneAnnotation s = parse_scene(R"({"image_id":"e","height":10,"width":10,"aircraft_kp":[]})");
  EXPECT_EQ(s.count(), 0u);
  EXPECT_TRUE(s.has_keypoints());
}

TEST(ParseScene, NegativeCoordinateIsOutOfBounds) {
  const std::string rec =
      R"({"image_id":"n","height":20,"width":20,"aircraft_kp":[{"head":[0,10],"left_wing":[-6,2],)"
      R"("left_tail":[1,1],"right_tail":[2,1],"right_wing":[6,2]}]})";
  try {
    parse_scene(rec, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfBounds);
    ASSERT_TRUE(e.record());
    EXPECT_EQ(*e.record(), 7u);
  }
}

TEST(ParseScene, FieldsInDocumentedOrder) {
  const SceneAnnotation s = parse_scene(kKpRecord);
  ASSERT_EQ(s.count(), 1u);
  const Keypoints5& kp = std::get<0>(s.aircraft)[0];
  EXPECT_EQ(kp.head, (Point{50, 20}));
  EXPECT_EQ(kp.left_wing, (Point{30, 40}));
  EXPECT_EQ(kp.left_tail, (Point{45, 70}));
  EXPECT_EQ(kp.right_tail, (Point{55, 70}));
  EXPECT_EQ(kp.right_wing, (Point{70, 40}));
  EXPECT_EQ(s.size.height, 100);
  EXPECT_EQ(s.size.width, 120);
}

TEST(ParseScene, ErrorKinds) {
  EXPECT_EQ(kind_of("{not json"), ErrorKind::MalformedRecord);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":10,"aircraft_kp":[]})"), ErrorKind::MalformedRecord);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":10,"width":10})"), ErrorKind::MalformedRecord);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":10,"width":10,"aircraft_kp":[],"aircraft_rbox":[]})"),
            ErrorKind::MalformedRecord);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":10,"width":10,"aircraft_kp":[{"head":[1,1]}]})"),
            ErrorKind::MalformedRecord);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":20,"width":20,"aircraft_kp":[{"head":[5,1],"left_wing":[3,3],)"
                    R"("left_tail":[4,9],"right_tail":[6,9],"right_wing":[3,3]}]})"),
            ErrorKind::DegenerateAircraft);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":20,"width":20,"aircraft_kp":[{"head":[5,9],"left_wing":[3,3],)"
                    R"("left_tail":[4,9],"right_tail":[6,9],"right_wing":[7,3]}]})"),
            ErrorKind::DegenerateAircraft);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":20,"width":20,"aircraft_rbox":[{"cx":5,"cy":5,"w":0,"h":2,"angle":0}]})"),
            ErrorKind::DegenerateAircraft);
  EXPECT_EQ(kind_of(R"({"image_id":"x","height":20,"width":20,"aircraft_rbox":[{"cx":18,"cy":5,"w":8,"h":2,"angle":0}]})"),
            ErrorKind::OutOfBounds);
}

TEST(ParseScene, ErrorNamesRecordIndex) {
  const std::string text = std::string(kKpRecord) + "\n\n" + "{broken\n";
  try {
    parse_annotation_file(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedRecord);
    EXPECT_EQ(e.record().value(), 1u);
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
  }
}

TEST(ParseScene, MixedKindsPerRecord) {
  const std::string text = std::string(kKpRecord) + "\n" +
                           R"({"image_id":"b","height":20,"width":20,"aircraft_rbox":[{"cx":10,"cy":10,"w":8,"h":4,"angle":4.0}]})";
  const auto scenes = parse_annotation_file(text);
  ASSERT_EQ(scenes.size(), 2u);
  EXPECT_TRUE(scenes[0].has_keypoints());
  EXPECT_FALSE(scenes[1].has_keypoints());
  const RotatedBox& b = std::get<1>(scenes[1].aircraft)[0];
  EXPECT_NEAR(b.angle, 4.0 - kPi, 1e-12);
}

TEST(ParseScene, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    SceneAnnotation s{"img" + std::to_string(i), {300, 400}, {}};
    if (i % 2 == 0) {
      std::vector<Keypoints5> kps;
      for (int k = 0; k < 3; ++k) {
        kps.push_back({{400 * u(rng), 300 * u(rng)}, {400 * u(rng), 300 * u(rng)}, {400 * u(rng), 300 * u(rng)},
                       {400 * u(rng), 300 * u(rng)}, {400 * u(rng), 300 * u(rng)}});
      }
      s.aircraft = kps;
    } else {
      s.aircraft = std::vector<RotatedBox>{{{200 + 50 * u(rng), 150 + 50 * u(rng)}, 20 + 30 * u(rng), 10 + 20 * u(rng), 3.1 * u(rng)}};
    }
    const SceneAnnotation once = parse_scene(serialize_scene(s));
    EXPECT_EQ(once, s);
    EXPECT_EQ(parse_scene(serialize_scene(once)), once);
  }
}

TEST(KpToSegments, SampleAircraft) {
  const SegmentPair s = kp_to_segments(kSample);
  EXPECT_EQ(s.l1.p0, (Point{0, 10}));
  EXPECT_EQ(s.l1.p1, (Point{0, -4}));
  EXPECT_EQ(s.l2.p0, (Point{-6, 2}));
  EXPECT_EQ(s.l2.p1, (Point{6, 2}));
}

TEST(KpToSegments, MirrorSwapsWingEndpoints) {
  auto mirror = [](Point p) { return Point{-p.x, p.y}; };
  const Keypoints5 m{mirror(kSample.head), mirror(kSample.left_wing), mirror(kSample.left_tail),
                     mirror(kSample.right_tail), mirror(kSample.right_wing)};
  const SegmentPair a = kp_to_segments(kSample);
  const SegmentPair b = kp_to_segments(m);
  EXPECT_EQ(b.l1.p0, a.l1.p0);
  EXPECT_EQ(b.l1.p1, a.l1.p1);
  EXPECT_EQ(b.l2.p0, a.l2.p1);
  EXPECT_EQ(b.l2.p1, a.l2.p0);
}

TEST(KpToSegments, TailIsMeanOfTailPoints) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  for (int i = 0; i < 100; ++i) {
    const Keypoints5 kp{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    const SegmentPair s = kp_to_segments(kp);
    EXPECT_EQ(s.l1.p1.x, (kp.left_tail.x + kp.right_tail.x) / 2);
    EXPECT_EQ(s.l1.p1.y, (kp.left_tail.y + kp.right_tail.y) / 2);
    EXPECT_EQ(s.l1.p0, kp.head);
  }
}

TEST(KpToSegments, ZeroLengthThrows) {
  const Keypoints5 kp{{0, 0}, {1, 1}, {-1, 0}, {1, 0}, {1, 1}};
  EXPECT_THROW(kp_to_segments(kp), Error);
}

TEST(RboxToSegments, AxisAligned) {
  const SegmentPair s = rbox_to_segments({{5, 5}, 10, 4, 0});
  EXPECT_EQ(s.l1.p0, (Point{0, 5}));
  EXPECT_EQ(s.l1.p1, (Point{10, 5}));
  EXPECT_EQ(s.l2.p0, (Point{5, 3}));
  EXPECT_EQ(s.l2.p1, (Point{5, 7}));
}

TEST(RboxToSegments, QuarterTurn) {
  const SegmentPair s = rbox_to_segments({{5, 5}, 10, 4, kPi / 2});
  EXPECT_NEAR(s.l1.p0.x, 5, 1e-12);
  EXPECT_NEAR(s.l1.p0.y, 0, 1e-12);
  EXPECT_NEAR(s.l1.p1.x, 5, 1e-12);
  EXPECT_NEAR(s.l1.p1.y, 10, 1e-12);
  EXPECT_NEAR(s.l2.p0.x, 3, 1e-12);
  EXPECT_NEAR(s.l2.p0.y, 5, 1e-12);
  EXPECT_NEAR(s.l2.p1.x, 7, 1e-12);
  EXPECT_NEAR(s.l2.p1.y, 5, 1e-12);
}

TEST(RboxToSegments, SquareUsesBoxXAxis) {
  const SegmentPair s = rbox_to_segments({{0, 0}, 6, 6, 0.3});
  const Point d = s.l1.direction();
  EXPECT_NEAR(std::abs(cross(d, Point{std::cos(0.3), std::sin(0.3)})), 0.0, 1e-12);
}

TEST(RboxToSegments, RandomBoxesArePerpendicularBisectors) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GroupingConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const RotatedBox b{{100 * u(rng), 100 * u(rng)}, 1 + 50 * u(rng), 1 + 50 * u(rng), kPi * u(rng)};
    const SegmentPair s = rbox_to_segments(b);
    EXPECT_NEAR(dot(s.l1.direction(), s.l2.direction()), 0.0, 1e-9 * s.l1.length() * s.l2.length());
    EXPECT_NEAR(distance(s.l1.center(), b.center), 0.0, 1e-9);
    EXPECT_NEAR(distance(s.l2.center(), b.center), 0.0, 1e-9);
    EXPECT_NEAR(s.l1.length(), std::max(b.width, b.height), 1e-9);
    EXPECT_NEAR(s.l2.length(), std::min(b.width, b.height), 1e-9);
    const auto hit = line_crossing(s.l1, s.l2);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->along_l2, 0.5, 1e-9);
    EXPECT_NEAR(acute_angle_deg(s.l1, s.l2), 90.0, 1e-9);
    EXPECT_TRUE(pair_predicate(s.l1, s.l2, cfg));
  }
}

TEST(GtPentagon, HeadIsFirstVertex) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Point c{100 + 10 * u(rng), 100 + 10 * u(rng)};
    const double a = kPi * u(rng);
    const Point h{std::cos(a), std::sin(a)}, n{-h.y, h.x};
    const Keypoints5 kp{c - 30 * h, c + 25 * n, c + 30 * h + 4 * n, c + 30 * h - 4 * n, c - 25 * n};
    const PentagonMask m = gt_pentagon(kp);
    EXPECT_EQ(m.vertices.front(), kp.head);
    const SegmentPair s = kp_to_segments(kp);
    EXPECT_EQ(m, pentagon_from_pair({s.l1, s.l2, 1.0, true}));
  }
}

TEST(GroundTruthPairs, HeadResolvedOnlyForKeypoints) {
  const auto kp = ground_truth_pairs(parse_scene(kKpRecord));
  ASSERT_EQ(kp.size(), 1u);
  EXPECT_TRUE(kp[0].head_resolved);
  const auto rb = ground_truth_pairs(
      parse_scene(R"({"image_id":"b","height":20,"width":20,"aircraft_rbox":[{"cx":10,"cy":10,"w":8,"h":4,"angle":0}]})"));
  ASSERT_EQ(rb.size(), 1u);
  EXPECT_FALSE(rb[0].head_resolved);
}
