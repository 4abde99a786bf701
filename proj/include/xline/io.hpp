#pragma once

// JSON-lines readers and writers for segment ground truth, detections,
// overlay geometry and evaluation reports, plus atomic file output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xline/annotations.hpp"
#include "xline/eval.hpp"
#include "xline/pipeline.hpp"

namespace xline {

using nlohmann::json;

inline json segment_json(const LineSegment& s) { return json::array({to_json(s.p0), to_json(s.p1)}); }

/// {"image_id", "height", "width", "kind", "segments": [{"l1": [[x,y],[x,y]], "l2": ...}]}
inline std::string segments_record(const SceneAnnotation& scene) {
  json j;
  j["image_id"] = scene.image_id;
  j["height"] = scene.size.height;
  j["width"] = scene.size.width;
  j["kind"] = scene.has_keypoints() ? "kp" : "rbox";
  json list = json::array();
  for (const AircraftDetection& a : ground_truth_pairs(scene)) {
    list.push_back({{"l1", segment_json(a.l1)}, {"l2", segment_json(a.l2)}});
  }
  j["segments"] = std::move(list);
  return j.dump();
}

/// One detection as stored in a detections file.
struct DetectionRecord {
  double score = 0.0;
  HorizontalBox hbb;
  RotatedBox rbb;
  std::optional<PentagonMask> pentagon;
  bool head_resolved = false;
};

struct ImageDetections {
  std::string image_id;
  std::vector<DetectionRecord> detections;
};

inline DetectionRecord to_record(const DecodedAircraft& a) {
  return {a.det.score, a.hbb, a.rbb, a.pentagon, a.det.head_resolved};
}

inline json rbox_json(const RotatedBox& b) {
  return {{"cx", b.center.x}, {"cy", b.center.y}, {"w", b.width}, {"h", b.height}, {"angle", b.angle}};
}

inline json polygon_json(const Polygon& poly) {
  json list = json::array();
  for (const Point& p : poly) list.push_back(to_json(p));
  return list;
}

inline std::string detections_record(const ImageDetections& img) {
  json dets = json::array();
  for (const DetectionRecord& d : img.detections) {
    json e;
    e["score"] = d.score;
    e["hbb"] = json::array({d.hbb.xmin, d.hbb.ymin, d.hbb.xmax, d.hbb.ymax});
    e["rbb"] = rbox_json(d.rbb);
    e["pentagon"] = d.pentagon ? polygon_json(d.pentagon->vertices) : json(nullptr);
    e["head_resolved"] = d.head_resolved;
    dets.push_back(std::move(e));
  }
  return json{{"image_id", img.image_id}, {"detections", std::move(dets)}}.dump();
}

inline ImageDetections parse_detections_record(std::string_view line, std::size_t index) {
  auto fail = [&](const std::string& what) { return Error(ErrorKind::MalformedRecord, what, index); };
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw fail(std::string("invalid JSON: ") + e.what());
  }
  try {
    ImageDetections img;
    img.image_id = j.at("image_id").get<std::string>();
    for (const json& e : j.at("detections")) {
      DetectionRecord d;
      d.score = e.at("score").get<double>();
      const json& h = e.at("hbb");
      if (!h.is_array() || h.size() != 4) throw fail("hbb must hold 4 numbers");
      d.hbb = {h[0].get<double>(), h[1].get<double>(), h[2].get<double>(), h[3].get<double>()};
      const json& r = e.at("rbb");
      d.rbb = {{r.at("cx").get<double>(), r.at("cy").get<double>()}, r.at("w").get<double>(), r.at("h").get<double>(),
               r.at("angle").get<double>()};
      if (!e.at("pentagon").is_null()) {
        PentagonMask m;
        for (const json& p : e.at("pentagon")) m.vertices.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        if (m.vertices.size() != 5) throw fail("pentagon must hold 5 vertices");
        d.pentagon = std::move(m);
      }
      d.head_resolved = e.at("head_resolved").get<bool>();
      img.detections.push_back(std::move(d));
    }
    return img;
  } catch (const json::exception& e) {
    throw fail(std::string("bad detection record: ") + e.what());
  }
}

namespace detail {

template <typename F>
void for_each_record(std::string_view text, F&& f) {
  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) f(line, index++);
    pos = end + 1;
  }
}

}  // namespace detail

inline std::vector<ImageDetections> parse_detections_file(std::string_view text) {
  std::vector<ImageDetections> out;
  detail::for_each_record(text, [&](std::string_view line, std::size_t i) { out.push_back(parse_detections_record(line, i)); });
  return out;
}

inline std::vector<RankedShape> ranked_shapes(const std::vector<ImageDetections>& images, BoxForm form) {
  std::vector<RankedShape> out;
  for (const ImageDetections& img : images) {
    for (const DetectionRecord& d : img.detections) {
      RankedShape s{img.image_id, d.score, std::nullopt};
      switch (form) {
        case BoxForm::Hbb: s.shape = d.hbb; break;
        case BoxForm::Rbb: s.shape = d.rbb; break;
        case BoxForm::Pentagon:
          if (d.pentagon) s.shape = *d.pentagon;
          break;
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

/// Segments, cut locations and output forms of one decoded image.
inline std::string overlay_record(const std::string& image_id, const PipelineOutput& out, int stride) {
  json cuts = json::array();
  for (const Cell& c : out.cut_centers) cuts.push_back({c.col, c.row});
  auto segs = [](const std::vector<LineSegment>& v) {
    json list = json::array();
    for (const LineSegment& s : v) list.push_back({{"p0", to_json(s.p0)}, {"p1", to_json(s.p1)}, {"score", s.score}});
    return list;
  };
  json aircraft = json::array();
  for (const DecodedAircraft& a : out.aircraft) {
    aircraft.push_back({{"l1", segment_json(a.det.l1)},
                        {"l2", segment_json(a.det.l2)},
                        {"score", a.det.score},
                        {"hbb", polygon_json(to_polygon(a.hbb))},
                        {"rbb", polygon_json(to_polygon(a.rbb))},
                        {"pentagon", a.pentagon ? polygon_json(a.pentagon->vertices) : json(nullptr)}});
  }
  return json{{"image_id", image_id},
              {"stride", stride},
              {"cut_centers", std::move(cuts)},
              {"fuselages", segs(out.fuselages)},
              {"wings", segs(out.wings)},
              {"aircraft", std::move(aircraft)}}
      .dump();
}

inline json report_json(const EvalReport& r) {
  json images = json::object();
  for (const DetectionMatch& m : r.matches) {
    json e{{"detection", m.detection}, {"score", m.score}, {"tp", m.true_positive}, {"iou", m.iou}};
    e["truth"] = m.truth ? json(*m.truth) : json(nullptr);
    images[m.image_id].push_back(std::move(e));
  }
  return {{"ap", r.ap},
          {"precision", r.precision},
          {"recall", r.recall},
          {"tp", r.tp},
          {"fp", r.fp},
          {"n_gt", r.n_gt},
          {"iou_thresh", r.iou_thresh},
          {"form", to_string(r.form)},
          {"ap_style", to_string(r.ap_style)},
          {"images", std::move(images)}};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace xline
