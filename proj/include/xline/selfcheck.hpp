#pragma once

// Built-in verification suite: loss and gradient against reference
// implementations, region labelling against flood fill, polygon IoU against
// Monte-Carlo sampling, and a synthetic render/decode/evaluate round trip.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "xline/decoder.hpp"
#include "xline/eval.hpp"
#include "xline/loss.hpp"
#include "xline/oracles.hpp"
#include "xline/pipeline.hpp"
#include "xline/synthetic.hpp"

namespace xline {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

using GradientFn = std::function<Grid<double>(const Heatmap&, const Heatmap&, const LossWeights&, int)>;

struct SelfcheckOptions {
  GradientFn gradient = [](const Heatmap& p, const Heatmap& g, const LossWeights& w, int n) {
    return focal_loss_grad(p, g, w, n);
  };
  std::uint64_t seed = 20190611;
  int gradient_grids = 20;
  int loss_fixtures = 100;
  int masks = 50;
  int polygon_pairs = 20;
  std::size_t mc_samples = 200000;
  int round_trip_scenes = 5;
};

inline CheckResult check_focal_loss(const SelfcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  double worst = 0.0;
  for (int i = 0; i < opt.loss_fixtures; ++i) {
    const Heatmap gt = oracle::random_binary_heatmap(rng, 8, 8);
    const Heatmap pred = oracle::random_prediction(rng, 8, 8);
    const LossWeights w{2.0, 0.5, 0.5};
    const double got = focal_loss(pred, gt, w, 3);
    const double want = oracle::focal_loss_reference(pred, gt, 2.0, 3);
    worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
  }
  std::ostringstream os;
  os << "max relative error " << worst << " (limit 1e-12)";
  return {"focal_loss_reference", worst <= 1e-12, os.str()};
}

inline CheckResult check_gradient(const SelfcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed + 1);
  double worst = 0.0;
  for (int i = 0; i < opt.gradient_grids; ++i) {
    const Heatmap gt = oracle::random_binary_heatmap(rng, 8, 8);
    // Keep predictions away from the clamp interval so differences are smooth.
    const Heatmap pred = oracle::random_prediction(rng, 8, 8, 0.02, 0.98);
    const LossWeights w{2.0, 0.5, 0.5};
    const Grid<double> analytic = opt.gradient(pred, gt, w, 3);
    const Grid<double> numeric = oracle::central_difference(
        [&](const Heatmap& p) { return focal_loss(p, gt, w, 3); }, pred, 1e-6);
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      const double a = analytic.values()[k];
      const double n = numeric.values()[k];
      worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-12}));
    }
  }
  std::ostringstream os;
  os << "max relative error " << worst << " (limit 1e-5)";
  return {"gradient_finite_difference", worst < 1e-5, os.str()};
}

/// True when the regions partition the mask exactly as the flood fill does.
inline bool same_partition(const std::vector<PixelRegion>& regions, const Grid<int>& labels) {
  std::size_t covered = 0;
  for (const PixelRegion& r : regions) {
    const int label = labels[r.pixels.front()];
    if (label < 0) return false;
    for (const Cell& c : r.pixels) {
      if (labels[c] != label) return false;
    }
    covered += r.pixels.size();
  }
  std::size_t set = 0;
  for (int v : labels.values()) set += v >= 0;
  // Distinct labels must match region count too.
  std::vector<int> distinct;
  for (int v : labels.values())
    if (v >= 0) distinct.push_back(v);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return covered == set && distinct.size() == regions.size();
}

inline CheckResult check_components(const SelfcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed + 2);
  int mismatches = 0;
  for (int i = 0; i < opt.masks; ++i) {
    const double density = 0.2 + 0.5 * (i % 5) / 4.0;
    BinaryMask mask{oracle::random_mask(rng, 64, 64, density), 0.5};
    Heatmap src{Grid<double>(64, 64, 1.0), 1, Channel::Endpoints};
    if (!same_partition(connected_components(mask, src), oracle::flood_fill_labels(mask.bits))) ++mismatches;
  }
  return {"connected_components_flood_fill", mismatches == 0,
          std::to_string(mismatches) + " of " + std::to_string(opt.masks) + " masks differ"};
}

inline CheckResult check_polygon_iou(const SelfcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed + 3);
  double worst = 0.0;
  for (int i = 0; i < opt.polygon_pairs; ++i) {
    const Polygon p = oracle::random_convex_polygon(rng);
    const Polygon q = oracle::random_convex_polygon(rng);
    const double exact = polygon_iou(p, q);
    const double sampled = oracle::monte_carlo_iou(p, q, opt.mc_samples, opt.seed + 100 + i);
    worst = std::max(worst, std::abs(exact - sampled));
  }
  const double analytic = polygon_iou(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                                      Polygon{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}});
  const bool ok = worst <= 0.005 && std::abs(analytic - 0.25 / 1.75) <= 1e-9;
  std::ostringstream os;
  os << "max |exact - sampled| " << worst << " (limit 0.005); offset squares " << analytic;
  return {"polygon_iou_monte_carlo", ok, os.str()};
}

inline CheckResult check_round_trip(const SelfcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed + 4);
  std::vector<ImageResult> results;
  std::vector<TruthShape> truth;
  for (int i = 0; i < opt.round_trip_scenes; ++i) {
    const SceneAnnotation scene = random_scene(rng, SceneSpec{}, "fixture" + std::to_string(i));
    results.push_back({scene.image_id, run_pipeline(render_all(scene, 4)), std::nullopt});
    for (TruthShape& t : truth_shapes(scene, BoxForm::Hbb)) truth.push_back(std::move(t));
  }
  const EvalReport report = match_and_score(ranked_shapes(results, BoxForm::Hbb), truth, BoxForm::Hbb, 0.5);
  std::ostringstream os;
  os << "AP@0.5 (hbb, continuous) = " << report.ap;
  return {"round_trip_ap", report.ap == 1.0, os.str()};
}

inline std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opt = {}) {
  return {check_focal_loss(opt), check_gradient(opt), check_components(opt), check_polygon_iou(opt),
          check_round_trip(opt)};
}

}  // namespace xline
