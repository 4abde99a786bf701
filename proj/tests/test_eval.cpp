#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "xline/eval.hpp"
#include "xline/pipeline.hpp"
#include "xline/synthetic.hpp"

using namespace xline;

namespace {

RankedShape det(const std::string& image, double score, HorizontalBox b) { return {image, score, Shape{b}}; }
TruthShape truth(const std::string& image, HorizontalBox b) { return {image, Shape{b}}; }

struct Fixture {
  std::vector<RankedShape> dets;
  std::vector<TruthShape> truths;
};

// Random boxes in three images; detections are jittered copies of truths
// plus clutter.
Fixture random_fixture(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Fixture f;
  for (int img = 0; img < 3; ++img) {
    const std::string id = "i" + std::to_string(img);
    const int n = 1 + static_cast<int>(4 * u(rng));
    for (int k = 0; k < n; ++k) {
      const double x = 200 * u(rng), y = 200 * u(rng), w = 10 + 30 * u(rng), h = 10 + 30 * u(rng);
      f.truths.push_back(truth(id, {x, y, x + w, y + h}));
      if (u(rng) < 0.8) {
        const double j = 8 * u(rng) - 4;
        f.dets.push_back(det(id, u(rng), {x + j, y - j, x + w + j, y + h}));
      }
    }
    for (int k = 0; k < 2; ++k) {
      const double x = 200 * u(rng), y = 200 * u(rng);
      f.dets.push_back(det(id, u(rng), {x, y, x + 20, y + 20}));
    }
  }
  return f;
}

SceneAnnotation scene_of(std::vector<Keypoints5> kps) { return {"s", {256, 256}, std::move(kps)}; }

}  // namespace

TEST(MatchAndScore, PerfectDetector) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 10, 10})};
  const std::vector<RankedShape> d{det("a", 0.7, {0, 0, 10, 9})};
  for (ApStyle style : {ApStyle::Continuous, ApStyle::ElevenPoint}) {
    const EvalReport r = match_and_score(d, t, BoxForm::Hbb, 0.5, style);
    EXPECT_DOUBLE_EQ(r.ap, 1.0);
    EXPECT_EQ(r.tp, 1u);
    EXPECT_NEAR(r.matches[0].iou, 0.9, 1e-12);
  }
}

TEST(MatchAndScore, FalsePositiveRankedFirst) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 10, 10})};
  const std::vector<RankedShape> d{det("a", 0.9, {50, 50, 60, 60}), det("a", 0.8, {0, 0, 10, 10})};
  const EvalReport r = match_and_score(d, t, BoxForm::Hbb);
  EXPECT_DOUBLE_EQ(r.ap, 0.5);
  EXPECT_EQ(r.precision, (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(r.recall, (std::vector<double>{0.0, 1.0}));
  EXPECT_DOUBLE_EQ(match_and_score(d, t, BoxForm::Hbb, 0.5, ApStyle::ElevenPoint).ap, 0.5);
}

TEST(MatchAndScore, ThresholdIsInclusive) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 2, 1})};
  const std::vector<RankedShape> d{det("a", 0.5, {0, 0, 1, 1})};
  const EvalReport r = match_and_score(d, t, BoxForm::Hbb, 0.5);
  EXPECT_EQ(r.matches[0].iou, 0.5);
  EXPECT_TRUE(r.matches[0].true_positive);
}

TEST(MatchAndScore, EmptyGroundTruthIsAnError) {
  const std::vector<RankedShape> d{det("a", 0.5, {0, 0, 1, 1})};
  try {
    match_and_score(d, {}, BoxForm::Hbb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyGroundTruth);
  }
}

TEST(MatchAndScore, DuplicatesGiveOneTruePositive) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 10, 10})};
  const std::vector<RankedShape> d{det("a", 0.9, {0, 0, 10, 10}), det("a", 0.8, {0, 0, 10, 10}),
                                   det("a", 0.7, {1, 0, 10, 10})};
  const EvalReport r = match_and_score(d, t, BoxForm::Hbb);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 2u);
  EXPECT_DOUBLE_EQ(r.ap, 1.0);
}

TEST(MatchAndScore, ImagesAreSeparate) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 10, 10})};
  const std::vector<RankedShape> d{det("b", 0.9, {0, 0, 10, 10})};
  EXPECT_EQ(match_and_score(d, t, BoxForm::Hbb).tp, 0u);
}

TEST(MatchAndScore, MissingShapeIsFalsePositive) {
  const std::vector<TruthShape> t{{"a", Shape{PentagonMask{{{0, 10}, {6, 2}, {1.2, 0}, {-1.2, 0}, {-6, 2}}}}}};
  const std::vector<RankedShape> d{{"a", 0.9, std::nullopt}, {"a", 0.5, t[0].shape}};
  const EvalReport r = match_and_score(d, t, BoxForm::Pentagon);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_FALSE(r.matches[0].true_positive);
}

TEST(MatchAndScore, TiesBreakByImageThenInputOrder) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 10, 10}), truth("b", {0, 0, 10, 10})};
  const std::vector<RankedShape> d{det("b", 0.5, {0, 0, 10, 10}), det("a", 0.5, {0, 0, 10, 10}),
                                   det("a", 0.5, {0, 0, 10, 10})};
  const EvalReport r = match_and_score(d, t, BoxForm::Hbb);
  ASSERT_EQ(r.matches.size(), 3u);
  EXPECT_EQ(r.matches[0].detection, 1u);
  EXPECT_EQ(r.matches[1].detection, 2u);
  EXPECT_EQ(r.matches[2].detection, 0u);
  EXPECT_TRUE(r.matches[0].true_positive);
  EXPECT_FALSE(r.matches[1].true_positive);
}

TEST(MatchAndScore, WrongFormIsRejected) {
  const std::vector<TruthShape> t{truth("a", {0, 0, 10, 10})};
  const std::vector<RankedShape> d{det("a", 0.5, {0, 0, 1, 1})};
  EXPECT_THROW(match_and_score(d, t, BoxForm::Rbb), Error);
}

TEST(MatchAndScore, RandomFixtureInvariants) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    Fixture f = random_fixture(rng);
    const EvalReport r = match_and_score(f.dets, f.truths, BoxForm::Hbb);
    EXPECT_EQ(r.tp + r.fp, f.dets.size());
    EXPECT_LE(r.tp, r.n_gt);
    for (std::size_t k = 1; k < r.recall.size(); ++k) EXPECT_GE(r.recall[k], r.recall[k - 1]);
    EXPECT_GE(r.ap, 0.0);
    EXPECT_LE(r.ap, 1.0);
    const EvalReport eleven = match_and_score(f.dets, f.truths, BoxForm::Hbb, 0.5, ApStyle::ElevenPoint);
    EXPECT_GE(eleven.ap, 0.0);
    EXPECT_LE(eleven.ap, 1.0);

    // Strictly monotone score maps keep the ranking and hence AP.
    std::vector<RankedShape> mapped = f.dets;
    for (RankedShape& d : mapped) d.score = std::exp(3 * d.score) - 7;
    EXPECT_EQ(match_and_score(mapped, f.truths, BoxForm::Hbb).ap, r.ap);
  }
}

TEST(AveragePrecision, Envelope) {
  const std::vector<double> recall{0.25, 0.25, 0.5, 0.75};
  const std::vector<double> precision{1.0, 0.5, 0.6667, 0.75};
  EXPECT_NEAR(average_precision(recall, precision, ApStyle::Continuous), 0.25 * 1.0 + 0.5 * 0.75, 1e-12);
  // Recall levels 0..0.2 -> 1.0, 0.3..0.7 -> 0.75, 0.8..1.0 -> 0.
  EXPECT_NEAR(average_precision(recall, precision, ApStyle::ElevenPoint), (3 * 1.0 + 5 * 0.75) / 11, 1e-12);
}

TEST(ShapeIou, Forms) {
  const RotatedBox r{{5, 5}, 10, 4, 0};
  EXPECT_NEAR(shape_iou(Shape{r}, Shape{r}), 1.0, 1e-12);
  EXPECT_EQ(form_of(Shape{r}), BoxForm::Rbb);
  EXPECT_STREQ(to_string(BoxForm::Pentagon), "pentagon");
  EXPECT_EQ(box_form_from_string("rbb"), BoxForm::Rbb);
  EXPECT_EQ(ap_style_from_string("eleven_point"), ApStyle::ElevenPoint);
  EXPECT_THROW(box_form_from_string("obb"), Error);
}

TEST(TruthShapes, RboxScenes) {
  const SceneAnnotation s{"r", {100, 100}, std::vector<RotatedBox>{{{50, 50}, 30, 10, 0.2}}};
  const auto rbb = truth_shapes(s, BoxForm::Rbb);
  ASSERT_EQ(rbb.size(), 1u);
  EXPECT_EQ(std::get<RotatedBox>(rbb[0].shape), std::get<1>(s.aircraft)[0]);
  EXPECT_EQ(truth_shapes(s, BoxForm::Hbb).size(), 1u);
  EXPECT_THROW(truth_shapes(s, BoxForm::Pentagon), Error);
}

TEST(RunPipeline, ThreeAircraftRoundTrip) {
  const SceneAnnotation s = scene_of({
      make_aircraft({60, 60}, {0, 1}, {1, 0}, 80, 70, 0.4, 5),
      make_aircraft({180, 70}, {std::sqrt(0.5), std::sqrt(0.5)}, {std::sqrt(0.5), -std::sqrt(0.5)}, 90, 80, 0.45, 5),
      make_aircraft({120, 190}, {-1, 0}, {0, 1}, 70, 76, 0.4, 4),
  });
  const auto out = run_pipeline(render_all(s, 4));
  ASSERT_EQ(out.size(), 3u);
  const auto truths = truth_shapes(s, BoxForm::Hbb);
  for (const TruthShape& t : truths) {
    double best = 0.0;
    for (const DecodedAircraft& a : out) best = std::max(best, box_iou(a.hbb, std::get<HorizontalBox>(t.shape)));
    EXPECT_GE(best, 0.9);
  }
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GE(out[i - 1].det.score, out[i].det.score);
  for (const DecodedAircraft& a : out) {
    EXPECT_TRUE(a.det.head_resolved);
    EXPECT_TRUE(a.pentagon.has_value());
  }
}

TEST(RunPipeline, ZeroHeatmaps) {
  const SceneAnnotation s = scene_of({});
  EXPECT_TRUE(run_pipeline(render_all(s, 4)).empty());
}

TEST(RunPipeline, AdhesionNeedsCutting) {
  std::mt19937_64 rng(31);
  AdhesionSpec spec;
  spec.max_extra_aircraft = 0;
  const SceneAnnotation s = adhesion_scene(rng, spec, "adh");
  const HeatmapSet maps = render_all(s, 4);
  EXPECT_EQ(run_pipeline(maps).size(), 2u);
  PipelineConfig off;
  off.cutline_enabled = false;
  EXPECT_LT(run_pipeline(maps, off).size(), 2u);
}

TEST(RunPipeline, ChecksHeatmapSet) {
  HeatmapSet maps = render_all(scene_of({}), 4);
  get(maps, Channel::Head).values = Grid<double>(3, 3, 0.0);
  try {
    run_pipeline(maps);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
  maps = render_all(scene_of({}), 4);
  get(maps, Channel::Head).channel = Channel::Wings;
  EXPECT_THROW(run_pipeline(maps), Error);
}

TEST(RunBatch, FailureDoesNotAbort) {
  std::mt19937_64 rng(3);
  const SceneAnnotation good = random_scene(rng, SceneSpec{}, "good");
  HeatmapSet broken = render_all(good, 4);
  get(broken, Channel::Wings).stride = 8;
  const auto results = run_batch({{"bad", broken}, {"good", render_all(good, 4)}});
  ASSERT_EQ(results.size(), 2u);
  EXPECT_TRUE(results[0].error.has_value());
  EXPECT_FALSE(results[1].error.has_value());
  EXPECT_EQ(results[1].aircraft.size(), good.count());
}
