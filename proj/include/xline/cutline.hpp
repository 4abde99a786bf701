#pragma once

// Cutting-line step: endpoint regions whose bounding rectangle is too large
// or too elongated mark places where two aircraft's segments have merged;
// an axis-aligned cross of k cells is zeroed there in the fuselage and wing
// heatmaps before segment extraction.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "xline/decoder.hpp"
#include "xline/heatmap.hpp"

namespace xline {

enum class CutPolicy {
  /// Flag a region when either size condition fails.
  ProseAnyViolation,
  /// Flag a region only when both size conditions fail.
  PseudocodeBothViolations,
};

inline const char* to_string(CutPolicy p) {
  return p == CutPolicy::ProseAnyViolation ? "prose_any_violation" : "pseudocode_both_violations";
}

inline CutPolicy cut_policy_from_string(const std::string& s) {
  if (s == "prose_any_violation") return CutPolicy::ProseAnyViolation;
  if (s == "pseudocode_both_violations") return CutPolicy::PseudocodeBothViolations;
  throw Error(ErrorKind::InvalidArgument, "unknown cut policy '" + s + "'");
}

struct CutlineConfig {
  double area_thresh = 100.0;
  double ratio_thresh = 1.5;
  int cut_len = 10;
  CutPolicy policy = CutPolicy::ProseAnyViolation;

  void validate() const {
    if (!(area_thresh > 0)) throw Error(ErrorKind::InvalidArgument, "cutline.area_thresh must be > 0");
    if (!(ratio_thresh >= 1)) throw Error(ErrorKind::InvalidArgument, "cutline.ratio_thresh must be >= 1");
    if (cut_len < 1) throw Error(ErrorKind::InvalidArgument, "cutline.cut_len must be >= 1");
  }
};

/// Whether one endpoint region looks like two merged endpoints.
inline bool is_adhesion(const PixelRegion& region, const CutlineConfig& cfg) {
  const double h = region.bbox.height();
  const double w = region.bbox.width();
  const bool area_violated = !(h * w < cfg.area_thresh);
  const bool ratio_violated = !(std::max(h, w) / std::min(h, w) < cfg.ratio_thresh);
  return cfg.policy == CutPolicy::ProseAnyViolation ? (area_violated || ratio_violated)
                                                    : (area_violated && ratio_violated);
}

/// Centers (bbox midpoint, rounded down to a cell) of the flagged regions.
inline std::vector<Cell> detect_adhesions(const std::vector<PixelRegion>& regions, const CutlineConfig& cfg) {
  cfg.validate();
  std::vector<Cell> centers;
  for (const PixelRegion& r : regions) {
    if (!is_adhesion(r, cfg)) continue;
    centers.push_back({(r.bbox.min_col + r.bbox.max_col) / 2, (r.bbox.min_row + r.bbox.max_row) / 2});
  }
  return centers;
}

/// Zeroes a horizontal and a vertical run of cut_len/2 cells either side of
/// every center, in both heatmaps. Inputs are left untouched.
inline std::pair<Heatmap, Heatmap> apply_cuts(const Heatmap& fuselage, const Heatmap& wings,
                                              const std::vector<Cell>& centers, const CutlineConfig& cfg) {
  cfg.validate();
  if (!fuselage.values.same_shape(wings.values)) {
    throw Error(ErrorKind::ShapeMismatch, "fuselage and wing heatmaps differ in shape");
  }
  Heatmap a = fuselage;
  Heatmap b = wings;
  const int half = cfg.cut_len / 2;
  auto zero = [&](int row, int col) {
    if (!a.values.contains(row, col)) return;
    a.at(row, col) = 0.0;
    b.at(row, col) = 0.0;
  };
  for (const Cell& p : centers) {
    for (int d = -half; d <= half; ++d) {
      zero(p.row, p.col + d);
      zero(p.row + d, p.col);
    }
  }
  return {std::move(a), std::move(b)};
}

}  // namespace xline
