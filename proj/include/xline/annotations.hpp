#pragma once

// Ground-truth annotation records (five-keypoint and rotated-box flavours)
// and their conversion to the fuselage/wing segment representation.
//
// On disk a scene is one JSON object per line:
//   {"image_id": "...", "height": H, "width": W,
//    "aircraft_kp": [{"head":[x,y], "left_wing":[x,y], "left_tail":[x,y],
//                     "right_tail":[x,y], "right_wing":[x,y]}, ...]}
// or the same with "aircraft_rbox": [{"cx","cy","w","h","angle"}, ...].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "xline/core.hpp"
#include "xline/geometry.hpp"

namespace xline {

/// Aircraft keypoints in annotation order (anti-clockwise from the head).
struct Keypoints5 {
  Point head;
  Point left_wing;
  Point left_tail;
  Point right_tail;
  Point right_wing;

  Point tail() const { return midpoint(left_tail, right_tail); }

  friend bool operator==(const Keypoints5&, const Keypoints5&) = default;
};

struct ImageSize {
  int height = 0;
  int width = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct SceneAnnotation {
  std::string image_id;
  ImageSize size;
  std::variant<std::vector<Keypoints5>, std::vector<RotatedBox>> aircraft;

  bool has_keypoints() const { return aircraft.index() == 0; }
  std::size_t count() const {
    return std::visit([](const auto& v) { return v.size(); }, aircraft);
  }

  friend bool operator==(const SceneAnnotation&, const SceneAnnotation&) = default;
};

struct SegmentPair {
  LineSegment l1;
  LineSegment l2;
};

/// Fuselage (head -> tail midpoint) and wing (left -> right) segments.
inline SegmentPair kp_to_segments(const Keypoints5& kp) {
  SegmentPair s{{kp.head, kp.tail(), 1.0}, {kp.left_wing, kp.right_wing, 1.0}};
  if (!(s.l1.length() > 0) || !(s.l2.length() > 0)) {
    throw Error(ErrorKind::DegenerateAircraft, "keypoints give a zero-length segment");
  }
  return s;
}

/// Median lines of a rotated box. l1 runs along the longer side (the box
/// x-axis for squares); each segment's endpoints are in (x, y) order.
inline SegmentPair rbox_to_segments(const RotatedBox& box) {
  const Point u = box_x_axis(box);
  const Point v = box_y_axis(box);
  auto median = [&](Point axis, double len) {
    LineSegment s{box.center - (0.5 * len) * axis, box.center + (0.5 * len) * axis, 1.0};
    return lex_less(s.p1, s.p0) ? s.reversed() : s;
  };
  const LineSegment along_x = median(u, box.width);
  const LineSegment along_y = median(v, box.height);
  if (box.width >= box.height) return {along_x, along_y};
  return {along_y, along_x};
}

inline PentagonMask gt_pentagon(const Keypoints5& kp) {
  const SegmentPair s = kp_to_segments(kp);
  return pentagon_from_pair({s.l1, s.l2, 1.0, true});
}

/// Ground truth as oriented detections (score 1). Keypoint aircraft carry a
/// resolved head; rotated boxes do not.
inline std::vector<AircraftDetection> ground_truth_pairs(const SceneAnnotation& scene) {
  std::vector<AircraftDetection> out;
  if (scene.has_keypoints()) {
    for (const Keypoints5& kp : std::get<0>(scene.aircraft)) {
      const SegmentPair s = kp_to_segments(kp);
      out.push_back({s.l1, s.l2, 1.0, true});
    }
  } else {
    for (const RotatedBox& box : std::get<1>(scene.aircraft)) {
      const SegmentPair s = rbox_to_segments(box);
      out.push_back({s.l1, s.l2, 1.0, false});
    }
  }
  return out;
}

namespace detail {

inline Point parse_point(const nlohmann::json& j, const char* key, std::size_t index) {
  if (!j.contains(key)) {
    throw Error(ErrorKind::MalformedRecord, std::string("missing keypoint '") + key + "'", index);
  }
  const auto& p = j.at(key);
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    throw Error(ErrorKind::MalformedRecord, std::string("keypoint '") + key + "' is not [x, y]", index);
  }
  const Point pt{p[0].get<double>(), p[1].get<double>()};
  if (!is_finite(pt)) {
    throw Error(ErrorKind::MalformedRecord, std::string("keypoint '") + key + "' is not finite", index);
  }
  return pt;
}

inline double parse_number(const nlohmann::json& j, const char* key, std::size_t index) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::MalformedRecord, std::string("missing numeric field '") + key + "'", index);
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::MalformedRecord, std::string("field '") + key + "' is not finite", index);
  }
  return v;
}

inline void require_inside(Point p, ImageSize size, const std::string& what, std::size_t index) {
  if (p.x < 0 || p.y < 0 || p.x > size.width || p.y > size.height) {
    throw Error(ErrorKind::OutOfBounds,
                what + " (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") lies outside the " +
                    std::to_string(size.width) + "x" + std::to_string(size.height) + " image",
                index);
  }
}

inline void validate_keypoints(const Keypoints5& kp, ImageSize size, std::size_t index) {
  const std::pair<const char*, Point> named[] = {{"head", kp.head},
                                                 {"left_wing", kp.left_wing},
                                                 {"left_tail", kp.left_tail},
                                                 {"right_tail", kp.right_tail},
                                                 {"right_wing", kp.right_wing}};
  for (const auto& [name, p] : named) require_inside(p, size, name, index);
  if (kp.left_wing == kp.right_wing) {
    throw Error(ErrorKind::DegenerateAircraft, "left and right wing coincide", index);
  }
  if (kp.head == kp.tail()) {
    throw Error(ErrorKind::DegenerateAircraft, "head coincides with the tail midpoint", index);
  }
}

}  // namespace detail

/// Parses one JSON-lines record; `index` is reported in every error.
inline SceneAnnotation parse_scene(std::string_view line, std::size_t index = 0) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("invalid JSON: ") + e.what(), index);
  }
  if (!j.is_object()) throw Error(ErrorKind::MalformedRecord, "record is not a JSON object", index);
  if (!j.contains("image_id") || !j["image_id"].is_string()) {
    throw Error(ErrorKind::MalformedRecord, "missing string field 'image_id'", index);
  }
  for (const char* key : {"height", "width"}) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() <= 0) {
      throw Error(ErrorKind::MalformedRecord, std::string("field '") + key + "' must be a positive integer", index);
    }
  }
  SceneAnnotation scene;
  scene.image_id = j["image_id"].get<std::string>();
  scene.size = {j["height"].get<int>(), j["width"].get<int>()};

  const bool has_kp = j.contains("aircraft_kp");
  const bool has_rbox = j.contains("aircraft_rbox");
  if (has_kp == has_rbox) {
    throw Error(ErrorKind::MalformedRecord, "record must hold exactly one of 'aircraft_kp' or 'aircraft_rbox'", index);
  }
  const auto& list = has_kp ? j["aircraft_kp"] : j["aircraft_rbox"];
  if (!list.is_array()) throw Error(ErrorKind::MalformedRecord, "aircraft list is not an array", index);

  if (has_kp) {
    std::vector<Keypoints5> aircraft;
    for (const auto& a : list) {
      if (!a.is_object()) throw Error(ErrorKind::MalformedRecord, "aircraft entry is not an object", index);
      Keypoints5 kp{detail::parse_point(a, "head", index), detail::parse_point(a, "left_wing", index),
                    detail::parse_point(a, "left_tail", index), detail::parse_point(a, "right_tail", index),
                    detail::parse_point(a, "right_wing", index)};
      detail::validate_keypoints(kp, scene.size, index);
      aircraft.push_back(kp);
    }
    scene.aircraft = std::move(aircraft);
  } else {
    std::vector<RotatedBox> aircraft;
    for (const auto& a : list) {
      if (!a.is_object()) throw Error(ErrorKind::MalformedRecord, "aircraft entry is not an object", index);
      RotatedBox box{{detail::parse_number(a, "cx", index), detail::parse_number(a, "cy", index)},
                     detail::parse_number(a, "w", index), detail::parse_number(a, "h", index),
                     normalize_half_turn(detail::parse_number(a, "angle", index))};
      if (!(box.width > 0) || !(box.height > 0)) {
        throw Error(ErrorKind::DegenerateAircraft, "rotated box needs positive width and height", index);
      }
      for (const Point& corner : to_polygon(box)) {
        detail::require_inside(corner, scene.size, "box corner", index);
      }
      aircraft.push_back(box);
    }
    scene.aircraft = std::move(aircraft);
  }
  return scene;
}

/// Parses a whole annotation file; blank lines are skipped and record
/// indices count non-blank lines from zero.
inline std::vector<SceneAnnotation> parse_annotation_file(std::string_view text) {
  std::vector<SceneAnnotation> scenes;
  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      scenes.push_back(parse_scene(line, index++));
    }
    pos = end + 1;
  }
  return scenes;
}

inline nlohmann::json to_json(Point p) { return nlohmann::json::array({p.x, p.y}); }

inline std::string serialize_scene(const SceneAnnotation& scene) {
  nlohmann::json j;
  j["image_id"] = scene.image_id;
  j["height"] = scene.size.height;
  j["width"] = scene.size.width;
  if (scene.has_keypoints()) {
    auto list = nlohmann::json::array();
    for (const Keypoints5& kp : std::get<0>(scene.aircraft)) {
      list.push_back({{"head", to_json(kp.head)},
                      {"left_wing", to_json(kp.left_wing)},
                      {"left_tail", to_json(kp.left_tail)},
                      {"right_tail", to_json(kp.right_tail)},
                      {"right_wing", to_json(kp.right_wing)}});
    }
    j["aircraft_kp"] = std::move(list);
  } else {
    auto list = nlohmann::json::array();
    for (const RotatedBox& b : std::get<1>(scene.aircraft)) {
      list.push_back({{"cx", b.center.x}, {"cy", b.center.y}, {"w", b.width}, {"h", b.height}, {"angle", b.angle}});
    }
    j["aircraft_rbox"] = std::move(list);
  }
  return j.dump();
}

}  // namespace xline
