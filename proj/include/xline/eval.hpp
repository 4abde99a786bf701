#pragma once

// PASCAL-VOC style average precision over horizontal boxes, rotated boxes
// or pentagonal masks.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xline/annotations.hpp"
#include "xline/geometry.hpp"

namespace xline {

enum class BoxForm { Hbb, Rbb, Pentagon };
enum class ApStyle { Continuous, ElevenPoint };

inline const char* to_string(BoxForm f) {
  switch (f) {
    case BoxForm::Hbb: return "hbb";
    case BoxForm::Rbb: return "rbb";
    case BoxForm::Pentagon: return "pentagon";
  }
  return "?";
}

inline BoxForm box_form_from_string(const std::string& s) {
  if (s == "hbb") return BoxForm::Hbb;
  if (s == "rbb") return BoxForm::Rbb;
  if (s == "pentagon") return BoxForm::Pentagon;
  throw Error(ErrorKind::InvalidArgument, "unknown box form '" + s + "'");
}

inline const char* to_string(ApStyle s) { return s == ApStyle::Continuous ? "continuous" : "eleven_point"; }

inline ApStyle ap_style_from_string(const std::string& s) {
  if (s == "continuous") return ApStyle::Continuous;
  if (s == "eleven_point") return ApStyle::ElevenPoint;
  throw Error(ErrorKind::InvalidArgument, "unknown AP style '" + s + "'");
}

/// One box form; the variant index matches BoxForm.
using Shape = std::variant<HorizontalBox, RotatedBox, PentagonMask>;

inline BoxForm form_of(const Shape& s) { return static_cast<BoxForm>(s.index()); }

inline double shape_iou(const Shape& a, const Shape& b) {
  if (a.index() != b.index()) throw Error(ErrorKind::InvalidArgument, "IoU between different box forms");
  switch (form_of(a)) {
    case BoxForm::Hbb: return box_iou(std::get<HorizontalBox>(a), std::get<HorizontalBox>(b));
    case BoxForm::Rbb: return polygon_iou(to_polygon(std::get<RotatedBox>(a)), to_polygon(std::get<RotatedBox>(b)));
    case BoxForm::Pentagon:
      return polygon_iou(std::get<PentagonMask>(a).vertices, std::get<PentagonMask>(b).vertices);
  }
  return 0.0;
}

/// Form of a detection, or nullopt when it cannot be built (for example a
/// pentagon without a resolved head).
inline std::optional<Shape> shape_of(const AircraftDetection& det, BoxForm form) {
  try {
    switch (form) {
      case BoxForm::Hbb: return Shape{hbb_from_pair(det)};
      case BoxForm::Rbb: return Shape{rbb_from_pair(det)};
      case BoxForm::Pentagon:
        if (!det.head_resolved) return std::nullopt;
        return Shape{pentagon_from_pair(det)};
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

struct RankedShape {
  std::string image_id;
  double score = 0.0;
  std::optional<Shape> shape;  // missing shapes always count as false positives
};

struct TruthShape {
  std::string image_id;
  Shape shape;
};

/// Ground truth of one scene in the requested form. Rotated-box scenes keep
/// their annotated boxes; pentagons need keypoint annotations.
inline std::vector<TruthShape> truth_shapes(const SceneAnnotation& scene, BoxForm form) {
  std::vector<TruthShape> out;
  if (form == BoxForm::Rbb && !scene.has_keypoints()) {
    for (const RotatedBox& b : std::get<1>(scene.aircraft)) out.push_back({scene.image_id, Shape{b}});
    return out;
  }
  if (form == BoxForm::Pentagon && !scene.has_keypoints()) {
    throw Error(ErrorKind::InvalidArgument,
                "pentagon evaluation needs keypoint ground truth (image '" + scene.image_id + "')");
  }
  for (const AircraftDetection& a : ground_truth_pairs(scene)) {
    switch (form) {
      case BoxForm::Hbb: out.push_back({scene.image_id, Shape{hbb_from_pair(a)}}); break;
      case BoxForm::Rbb: out.push_back({scene.image_id, Shape{rbb_from_pair(a)}}); break;
      case BoxForm::Pentagon: out.push_back({scene.image_id, Shape{pentagon_from_pair(a)}}); break;
    }
  }
  return out;
}

struct DetectionMatch {
  std::string image_id;
  std::size_t detection = 0;            // index into the detection input
  double score = 0.0;
  bool true_positive = false;
  std::optional<std::size_t> truth;     // index into the ground-truth input
  double iou = 0.0;                     // best IoU against unmatched truth
};

struct EvalReport {
  double ap = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t n_gt = 0;
  double iou_thresh = 0.5;
  BoxForm form = BoxForm::Hbb;
  ApStyle ap_style = ApStyle::Continuous;
  std::vector<DetectionMatch> matches;  // in ranked order
};

/// Area under the precision envelope (precision made non-increasing from
/// the right), or the mean of the envelope at recall 0, 0.1, ..., 1.
inline double average_precision(std::span<const double> recall, std::span<const double> precision, ApStyle style) {
  if (style == ApStyle::ElevenPoint) {
    double sum = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      double best = 0.0;
      for (std::size_t k = 0; k < recall.size(); ++k) {
        if (recall[k] >= t - 1e-12) best = std::max(best, precision[k]);
      }
      sum += best;
    }
    return sum / 11.0;
  }
  std::vector<double> mrec{0.0};
  std::vector<double> mpre{0.0};
  mrec.insert(mrec.end(), recall.begin(), recall.end());
  mpre.insert(mpre.end(), precision.begin(), precision.end());
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  return ap;
}

/// Ranks detections globally by score (ties: image id, then input order);
/// each becomes a true positive when its best-overlapping unmatched truth
/// in the same image reaches iou_thresh, consuming that truth.
inline EvalReport match_and_score(std::span<const RankedShape> detections, std::span<const TruthShape> truths,
                                  BoxForm form, double iou_thresh = 0.5, ApStyle style = ApStyle::Continuous) {
  if (truths.empty()) throw Error(ErrorKind::EmptyGroundTruth, "AP is undefined without ground truth");
  for (const TruthShape& t : truths) {
    if (form_of(t.shape) != form) throw Error(ErrorKind::InvalidArgument, "ground truth is not in the evaluated form");
  }
  for (const RankedShape& d : detections) {
    if (d.shape && form_of(*d.shape) != form) throw Error(ErrorKind::InvalidArgument, "detection is not in the evaluated form");
  }

  std::map<std::string, std::vector<std::size_t>> truth_by_image;
  for (std::size_t i = 0; i < truths.size(); ++i) truth_by_image[truths[i].image_id].push_back(i);

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (detections[a].score != detections[b].score) return detections[a].score > detections[b].score;
    return detections[a].image_id < detections[b].image_id;
  });

  EvalReport report;
  report.n_gt = truths.size();
  report.iou_thresh = iou_thresh;
  report.form = form;
  report.ap_style = style;

  std::vector<bool> consumed(truths.size(), false);
  for (std::size_t idx : order) {
    const RankedShape& det = detections[idx];
    DetectionMatch m{det.image_id, idx, det.score, false, std::nullopt, 0.0};
    if (det.shape) {
      auto it = truth_by_image.find(det.image_id);
      if (it != truth_by_image.end()) {
        double best = -1.0;
        std::optional<std::size_t> best_truth;
        for (std::size_t t : it->second) {
          if (consumed[t]) continue;
          const double iou = shape_iou(*det.shape, truths[t].shape);
          if (iou > best) {
            best = iou;
            best_truth = t;
          }
        }
        if (best_truth) {
          m.iou = best;
          if (best >= iou_thresh) {
            m.true_positive = true;
            m.truth = best_truth;
            consumed[*best_truth] = true;
          }
        }
      }
    }
    if (m.true_positive) ++report.tp;
    else ++report.fp;
    report.recall.push_back(static_cast<double>(report.tp) / static_cast<double>(report.n_gt));
    report.precision.push_back(static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fp));
    report.matches.push_back(std::move(m));
  }
  report.ap = average_precision(report.recall, report.precision, style);
  return report;
}

}  // namespace xline
