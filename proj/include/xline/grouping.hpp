#pragma once

// Pairs fuselage segments with wing segments and orients the fuselage using
// the head heatmap.
//
// A fuselage l1 and wing l2 belong together when l1 (slightly extended)
// crosses l2 near l2's midpoint and the two are roughly perpendicular.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "xline/core.hpp"
#include "xline/decoder.hpp"

namespace xline {

struct GroupingConfig {
  double midpoint_tol = 0.15;   // fraction of |l2|
  double angle_min = 60.0;      // degrees
  double angle_max = 120.0;     // degrees
  double extension_tol = 0.1;   // fraction of |l1| added at each end
  double head_radius = 0.25;    // fraction of |l1|

  void validate() const {
    if (!(midpoint_tol >= 0 && midpoint_tol <= 0.5)) throw Error(ErrorKind::InvalidArgument, "grouping.midpoint_tol must lie in [0, 0.5]");
    if (!(angle_min < angle_max)) throw Error(ErrorKind::InvalidArgument, "grouping.angle_min must be below grouping.angle_max");
    if (!(extension_tol >= 0)) throw Error(ErrorKind::InvalidArgument, "grouping.extension_tol must be >= 0");
    if (!(head_radius >= 0)) throw Error(ErrorKind::InvalidArgument, "grouping.head_radius must be >= 0");
  }
};

/// Where the line through l1 meets l2: `along_l1` and `along_l2` are the
/// parameters on each segment (0 at p0, 1 at p1).
struct Crossing {
  double along_l1 = 0.0;
  double along_l2 = 0.0;
};

inline std::optional<Crossing> line_crossing(const LineSegment& l1, const LineSegment& l2) {
  const Point d1 = l1.direction();
  const Point d2 = l2.direction();
  const double denom = cross(d1, d2);
  if (std::abs(denom) <= 1e-12 * norm(d1) * norm(d2)) return std::nullopt;
  const Point w = l2.p0 - l1.p0;
  return Crossing{cross(w, d2) / denom, cross(w, d1) / denom};
}

/// Angle between the two segment directions in degrees, folded into [0, 90].
inline double acute_angle_deg(const LineSegment& a, const LineSegment& b) {
  const Point da = a.direction();
  const Point db = b.direction();
  // atan2 of |cross| and |dot| stays accurate near 0 and 90 degrees.
  return std::atan2(std::abs(cross(da, db)), std::abs(dot(da, db))) * 180.0 / kPi;
}

inline bool pair_predicate(const LineSegment& l1, const LineSegment& l2, const GroupingConfig& cfg) {
  if (!(l1.length() > 0) || !(l2.length() > 0)) return false;
  const auto hit = line_crossing(l1, l2);
  if (!hit) return false;
  if (hit->along_l1 < -cfg.extension_tol || hit->along_l1 > 1.0 + cfg.extension_tol) return false;
  if (hit->along_l2 < 0.0 || hit->along_l2 > 1.0) return false;
  if (std::abs(hit->along_l2 - 0.5) > cfg.midpoint_tol) return false;
  const double acute = acute_angle_deg(l1, l2);
  auto in_range = [&](double a) { return a >= cfg.angle_min && a <= cfg.angle_max; };
  return in_range(acute) || in_range(180.0 - acute);
}

namespace detail {

inline std::array<double, 4> canonical_key(const LineSegment& s) {
  const bool keep = !lex_less(s.p1, s.p0);
  const Point a = keep ? s.p0 : s.p1;
  const Point b = keep ? s.p1 : s.p0;
  return {a.x, a.y, b.x, b.y};
}

}  // namespace detail

/// Greedy one-to-one pairing over all admissible (fuselage, wing) pairs,
/// best combined score first. Ties fall back to segment geometry, so the
/// result does not depend on input order.
inline std::vector<AircraftDetection> pair_segments(const std::vector<LineSegment>& fuselages,
                                                    const std::vector<LineSegment>& wings,
                                                    const GroupingConfig& cfg) {
  cfg.validate();
  struct Candidate {
    double score;
    std::array<double, 4> key_a;
    std::array<double, 4> key_b;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < fuselages.size(); ++i) {
    for (std::size_t j = 0; j < wings.size(); ++j) {
      if (!pair_predicate(fuselages[i], wings[j], cfg)) continue;
      candidates.push_back({0.5 * (fuselages[i].score + wings[j].score), detail::canonical_key(fuselages[i]),
                            detail::canonical_key(wings[j]), i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::tie(x.key_a, x.key_b, x.a, x.b) < std::tie(y.key_a, y.key_b, y.a, y.b);
  });
  std::vector<bool> used_a(fuselages.size(), false);
  std::vector<bool> used_b(wings.size(), false);
  std::vector<AircraftDetection> out;
  for (const Candidate& c : candidates) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = true;
    out.push_back({fuselages[c.a], wings[c.b], c.score, false});
  }
  return out;
}

/// Orients l1 so that p0 is the endpoint closest to the nearest head-region
/// centroid. The match is accepted only within head_radius * |l1|; on an
/// exact tie between endpoints the current order is kept.
inline AircraftDetection match_head(const AircraftDetection& det, const std::vector<PixelRegion>& head_regions,
                                    int stride, const GroupingConfig& cfg = {}) {
  AircraftDetection out = det;
  out.head_resolved = false;
  double best = std::numeric_limits<double>::infinity();
  bool flip = false;
  for (const PixelRegion& r : head_regions) {
    const Point head = cell_to_pixel(r.centroid, stride);
    const double d0 = distance(head, det.l1.p0);
    const double d1 = distance(head, det.l1.p1);
    const double d = std::min(d0, d1);
    if (d < best) {
      best = d;
      flip = d1 < d0;
    }
  }
  if (best <= cfg.head_radius * det.l1.length()) {
    if (flip) out.l1 = det.l1.reversed();
    out.head_resolved = true;
  }
  return out;
}

}  // namespace xline
