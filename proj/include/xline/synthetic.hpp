#pragma once

// Seeded synthetic scenes: random non-touching aircraft, and wingtip-to-
// wingtip pairs whose wing segments merge after downsampling.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xline/annotations.hpp"
#include "xline/geometry.hpp"

namespace xline {

/// Builds five keypoints from a wing segment and a fuselage crossing it at
/// `wing_center`. `heading` is the unit head->tail direction; the wing
/// crosses the fuselage `wing_frac` of the way from the head.
inline Keypoints5 make_aircraft(Point wing_center, Point heading, Point wing_dir, double fuselage_len,
                                double span, double wing_frac, double tail_half_width) {
  const Point head = wing_center - (wing_frac * fuselage_len) * heading;
  const Point tail = head + fuselage_len * heading;
  Point a = wing_center + (0.5 * span) * wing_dir;
  Point b = wing_center - (0.5 * span) * wing_dir;
  // Right wing sits on the positive side of cross(head->tail, wing - tail).
  if (cross(heading, a - tail) < 0) std::swap(a, b);
  const Point side{-heading.y, heading.x};
  return {head, b, tail - tail_half_width * side, tail + tail_half_width * side, a};
}

struct SceneSpec {
  int width = 640;
  int height = 640;
  int min_aircraft = 3;
  int max_aircraft = 12;
  double min_fuselage = 64.0;
  double max_fuselage = 128.0;
  double min_separation = 12.0;  // pixels between any two aircraft's segments
  double margin = 4.0;
};

namespace detail {

inline bool inside(const Keypoints5& kp, const SceneSpec& spec) {
  for (Point p : {kp.head, kp.left_wing, kp.left_tail, kp.right_tail, kp.right_wing}) {
    if (p.x < spec.margin || p.y < spec.margin || p.x > spec.width - spec.margin || p.y > spec.height - spec.margin) {
      return false;
    }
  }
  return true;
}

inline double aircraft_distance(const Keypoints5& a, const Keypoints5& b) {
  const SegmentPair sa = kp_to_segments(a);
  const SegmentPair sb = kp_to_segments(b);
  return std::min({segment_distance(sa.l1, sb.l1), segment_distance(sa.l1, sb.l2), segment_distance(sa.l2, sb.l1),
                   segment_distance(sa.l2, sb.l2)});
}

inline Point unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace detail

/// Random keypoint aircraft with random heading, roughly perpendicular wings
/// and at least spec.min_separation pixels between different aircraft.
inline Keypoints5 random_aircraft(std::mt19937_64& rng, const SceneSpec& spec) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double len = spec.min_fuselage + (spec.max_fuselage - spec.min_fuselage) * u01(rng);
  const double span = len * (0.8 + 0.4 * u01(rng));
  const double heading_angle = 2.0 * kPi * u01(rng);
  const double wing_tilt = (u01(rng) - 0.5) * (16.0 * kPi / 180.0);
  const Point heading = detail::unit(heading_angle);
  const Point wing_dir = detail::unit(heading_angle + 0.5 * kPi + wing_tilt);
  const double wing_frac = 0.35 + 0.2 * u01(rng);
  const Point center{spec.width * u01(rng), spec.height * u01(rng)};
  return make_aircraft(center, heading, wing_dir, len, span, wing_frac, span * (0.05 + 0.05 * u01(rng)));
}

inline SceneAnnotation random_scene(std::mt19937_64& rng, const SceneSpec& spec, const std::string& image_id) {
  std::uniform_int_distribution<int> count_dist(spec.min_aircraft, spec.max_aircraft);
  const int target = count_dist(rng);
  for (;;) {
    std::vector<Keypoints5> placed;
    int attempts = 0;
    while (static_cast<int>(placed.size()) < target && attempts < 2000) {
      ++attempts;
      const Keypoints5 kp = random_aircraft(rng, spec);
      if (!detail::inside(kp, spec)) continue;
      bool clear = true;
      for (const Keypoints5& other : placed) {
        if (detail::aircraft_distance(kp, other) < spec.min_separation) {
          clear = false;
          break;
        }
      }
      if (clear) placed.push_back(kp);
    }
    if (static_cast<int>(placed.size()) == target) {
      return {image_id, {spec.height, spec.width}, std::move(placed)};
    }
  }
}

struct AdhesionSpec {
  int width = 640;
  int height = 640;
  int stride = 4;
  double min_span = 112.0;
  double max_span = 150.0;
  int max_extra_aircraft = 2;
  SceneSpec extras;  // size range for the additional isolated aircraft
};

/// Two aircraft parked wingtip to wingtip: their wing segments are
/// collinear and axis-aligned, and the facing tips fall in neighbouring
/// heatmap cells. Up to max_extra_aircraft isolated aircraft are added.
inline SceneAnnotation adhesion_scene(std::mt19937_64& rng, const AdhesionSpec& spec, const std::string& image_id) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double d = spec.stride;
  for (;;) {
    const bool vertical_wings = u01(rng) < 0.5;
    const double span_a = spec.min_span + (spec.max_span - spec.min_span) * u01(rng);
    const double span_b = spec.min_span + (spec.max_span - spec.min_span) * u01(rng);
    // Work in a frame where wings run along +x; swap axes at the end.
    const double along_extent = vertical_wings ? spec.height : spec.width;
    const double across_extent = vertical_wings ? spec.width : spec.height;
    const double total = span_a + span_b + d;
    if (total + 2 * d >= along_extent) continue;
    const double start = d + (along_extent - total - 2 * d) * u01(rng);
    // Facing tips sit inside neighbouring cells along the wing axis.
    const double tip_a = (std::floor((start + span_a) / d) + 0.5) * d;
    const double tip_b = tip_a + d;
    const double wing_line = (std::floor((0.3 + 0.4 * u01(rng)) * across_extent / d) + 0.5) * d;

    auto build = [&](double tip_lo, double tip_hi) {
      const double span = tip_hi - tip_lo;
      const double len = span * (0.8 + 0.3 * u01(rng));
      const double frac = 0.35 + 0.2 * u01(rng);
      const double sign = u01(rng) < 0.5 ? 1.0 : -1.0;
      Point center{0.5 * (tip_lo + tip_hi), wing_line};
      Point heading{0.0, sign};
      Point wing_dir{1.0, 0.0};
      if (vertical_wings) {
        center = {center.y, center.x};
        heading = {heading.y, heading.x};
        wing_dir = {0.0, 1.0};
      }
      return make_aircraft(center, heading, wing_dir, len, span, frac, span * 0.06);
    };
    std::vector<Keypoints5> placed{build(tip_a - span_a, tip_a), build(tip_b, tip_b + span_b)};

    SceneSpec bounds = spec.extras;
    bounds.width = spec.width;
    bounds.height = spec.height;
    if (!detail::inside(placed[0], bounds) || !detail::inside(placed[1], bounds)) continue;

    std::uniform_int_distribution<int> extra_dist(0, spec.max_extra_aircraft);
    const int extras = extra_dist(rng);
    int attempts = 0;
    while (static_cast<int>(placed.size()) < 2 + extras && attempts < 2000) {
      ++attempts;
      const Keypoints5 kp = random_aircraft(rng, bounds);
      if (!detail::inside(kp, bounds)) continue;
      bool clear = true;
      for (const Keypoints5& other : placed) {
        if (detail::aircraft_distance(kp, other) < bounds.min_separation) {
          clear = false;
          break;
        }
      }
      if (clear) placed.push_back(kp);
    }
    return {image_id, {spec.height, spec.width}, std::move(placed)};
  }
}

}  // namespace xline
