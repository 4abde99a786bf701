#pragma once

// Full heatmap decoding for one image: cutting-line, segment extraction,
// pairing, head orientation, and the three output forms.

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "xline/cutline.hpp"
#include "xline/decoder.hpp"
#include "xline/eval.hpp"
#include "xline/geometry.hpp"
#include "xline/grouping.hpp"
#include "xline/heatmap.hpp"

namespace xline {

struct PipelineConfig {
  double tau = kDefaultThreshold;
  bool cutline_enabled = true;
  CutlineConfig cutline;
  GroupingConfig grouping;
};

struct DecodedAircraft {
  AircraftDetection det;
  HorizontalBox hbb;
  RotatedBox rbb;
  std::optional<PentagonMask> pentagon;
};

/// Intermediate geometry kept for overlays and debugging.
struct PipelineOutput {
  std::vector<Cell> cut_centers;
  std::vector<LineSegment> fuselages;
  std::vector<LineSegment> wings;
  std::vector<DecodedAircraft> aircraft;  // best score first
};

inline void check_heatmap_set(const HeatmapSet& maps) {
  for (Channel c : kAllChannels) {
    const Heatmap& hm = get(maps, c);
    if (hm.channel != c) {
      throw Error(ErrorKind::InvalidArgument, std::string("heatmap in slot ") + channel_letter(c) +
                                                  " is labelled " + channel_letter(hm.channel));
    }
    if (!hm.values.same_shape(get(maps, Channel::Fuselage).values) || hm.stride != get(maps, Channel::Fuselage).stride) {
      throw Error(ErrorKind::ShapeMismatch, "the four heatmaps must share shape and stride");
    }
    if (hm.values.empty()) throw Error(ErrorKind::ShapeMismatch, "empty heatmap");
  }
}

inline PipelineOutput decode_scene(const HeatmapSet& maps, const PipelineConfig& cfg = {}) {
  check_heatmap_set(maps);
  cfg.grouping.validate();
  const int stride = get(maps, Channel::Fuselage).stride;

  PipelineOutput out;
  Heatmap fuselage = get(maps, Channel::Fuselage);
  Heatmap wings = get(maps, Channel::Wings);
  if (cfg.cutline_enabled) {
    out.cut_centers = detect_adhesions(extract_points(get(maps, Channel::Endpoints), cfg.tau), cfg.cutline);
    if (!out.cut_centers.empty()) {
      std::tie(fuselage, wings) = apply_cuts(fuselage, wings, out.cut_centers, cfg.cutline);
    }
  }
  out.fuselages = extract_segments(fuselage, cfg.tau);
  out.wings = extract_segments(wings, cfg.tau);

  const std::vector<PixelRegion> heads = extract_points(get(maps, Channel::Head), cfg.tau);
  for (const AircraftDetection& pair : pair_segments(out.fuselages, out.wings, cfg.grouping)) {
    DecodedAircraft a;
    a.det = match_head(pair, heads, stride, cfg.grouping);
    try {
      a.hbb = hbb_from_pair(a.det);
      a.rbb = rbb_from_pair(a.det);
    } catch (const Error&) {
      continue;
    }
    if (a.det.head_resolved) {
      try {
        a.pentagon = pentagon_from_pair(a.det);
      } catch (const Error&) {
      }
    }
    out.aircraft.push_back(std::move(a));
  }
  std::stable_sort(out.aircraft.begin(), out.aircraft.end(),
                   [](const DecodedAircraft& x, const DecodedAircraft& y) { return x.det.score > y.det.score; });
  return out;
}

inline std::vector<DecodedAircraft> run_pipeline(const HeatmapSet& maps, const PipelineConfig& cfg = {}) {
  return decode_scene(maps, cfg).aircraft;
}

struct ImageHeatmaps {
  std::string image_id;
  HeatmapSet maps;
};

struct ImageResult {
  std::string image_id;
  std::vector<DecodedAircraft> aircraft;
  std::optional<std::string> error;
};

/// Decodes every image; a failing image is reported and the rest proceed.
inline std::vector<ImageResult> run_batch(const std::vector<ImageHeatmaps>& images, const PipelineConfig& cfg = {}) {
  std::vector<ImageResult> results;
  results.reserve(images.size());
  for (const ImageHeatmaps& img : images) {
    ImageResult r{img.image_id, {}, std::nullopt};
    try {
      r.aircraft = run_pipeline(img.maps, cfg);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

inline Shape shape_of(const DecodedAircraft& a, BoxForm form) {
  switch (form) {
    case BoxForm::Hbb: return a.hbb;
    case BoxForm::Rbb: return a.rbb;
    case BoxForm::Pentagon: break;
  }
  if (!a.pentagon) throw Error(ErrorKind::HeadUnresolved, "detection has no pentagon");
  return *a.pentagon;
}

/// Flattens per-image decoder output into ranked shapes for evaluation.
inline std::vector<RankedShape> ranked_shapes(const std::vector<ImageResult>& results, BoxForm form) {
  std::vector<RankedShape> out;
  for (const ImageResult& r : results) {
    for (const DecodedAircraft& a : r.aircraft) {
      RankedShape s{r.image_id, a.det.score, std::nullopt};
      if (form != BoxForm::Pentagon || a.pentagon) s.shape = shape_of(a, form);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace xline
