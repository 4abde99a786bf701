#pragma once

// Output forms derived from a fuselage/wing pair (horizontal box, rotated
// box, pentagonal mask) and polygon overlap measures used for evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "xline/core.hpp"

namespace xline {

inline double signed_area(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += cross(poly[j], poly[i]);
  }
  return 0.5 * acc;
}

inline double polygon_area(std::span<const Point> poly) {
  return std::abs(signed_area(poly));
}

inline double polygon_area(const HorizontalBox& b) { return b.area(); }

namespace detail {

inline int orientation_sign(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y),
                                 std::abs(c.x - a.x), std::abs(c.y - a.y), 1.0});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

inline bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// Closed-segment intersection test (touching counts).
inline bool segments_intersect(Point a, Point b, Point c, Point d) {
  using detail::on_segment;
  using detail::orientation_sign;
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

/// True when no two non-adjacent edges meet and adjacent edges only share
/// their common vertex.
inline bool is_simple(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = poly[j];
      const Point d = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges fold back onto each other only when collinear and
        // pointing in opposite directions.
        const Point shared = (j == i + 1) ? b : a;
        const Point u = (j == i + 1) ? a : b;
        const Point w = (j == i + 1) ? d : c;
        if (detail::orientation_sign(u, shared, w) == 0 &&
            dot(u - shared, w - shared) > 0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

inline bool is_convex(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int s = detail::orientation_sign(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return sign != 0;
}

inline bool point_in_polygon(Point p, std::span<const Point> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

/// Sutherland-Hodgman: clips an arbitrary subject polygon by a convex clip
/// polygon. The clip polygon must have positive signed area.
inline Polygon clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
  Polygon out(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Point a = clip[e];
    const Point b = clip[(e + 1) % m];
    const Point edge = b - a;
    const Polygon in = std::move(out);
    out.clear();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point cur = in[i];
      const Point prev = in[(i + n - 1) % n];
      const double dc = cross(edge, cur - a);
      const double dp = cross(edge, prev - a);
      if (dc >= 0) {
        if (dp < 0) out.push_back(prev + (dp / (dp - dc)) * (cur - prev));
        out.push_back(cur);
      } else if (dp >= 0) {
        out.push_back(prev + (dp / (dp - dc)) * (cur - prev));
      }
    }
  }
  return out;
}

namespace detail {

inline Polygon counter_clockwise(std::span<const Point> poly) {
  Polygon p(poly.begin(), poly.end());
  if (signed_area(p) < 0) std::reverse(p.begin(), p.end());
  return p;
}

inline void require_polygon(std::span<const Point> poly, const char* name) {
  if (poly.size() < 3) throw Error(ErrorKind::DegeneratePolygon, std::string(name) + " has fewer than 3 vertices");
  for (const Point& v : poly) {
    if (!is_finite(v)) throw Error(ErrorKind::DegeneratePolygon, std::string(name) + " has a non-finite vertex");
  }
  if (!(polygon_area(poly) > 0.0)) throw Error(ErrorKind::DegeneratePolygon, std::string(name) + " has zero area");
  if (!is_simple(poly)) throw Error(ErrorKind::DegeneratePolygon, std::string(name) + " is self-intersecting");
}

// Grid-sampled IoU over the joint bounding box, used only when neither
// polygon is convex.
inline double rasterized_iou(std::span<const Point> p, std::span<const Point> q,
                             int resolution = 512) {
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (auto poly : {p, q}) {
    for (const Point& v : poly) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
  const double dx = (xmax - xmin) / resolution;
  const double dy = (ymax - ymin) / resolution;
  long in_p = 0, in_q = 0, in_both = 0;
  for (int r = 0; r < resolution; ++r) {
    for (int c = 0; c < resolution; ++c) {
      const Point s{xmin + (c + 0.5) * dx, ymin + (r + 0.5) * dy};
      const bool a = point_in_polygon(s, p);
      const bool b = point_in_polygon(s, q);
      in_p += a;
      in_q += b;
      in_both += a && b;
    }
  }
  const long uni = in_p + in_q - in_both;
  return uni == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(uni);
}

}  // namespace detail

/// Intersection over union of two simple polygons. Exact whenever at least
/// one polygon is convex; otherwise falls back to a 512x512 sampling grid.
inline double polygon_iou(std::span<const Point> p, std::span<const Point> q) {
  detail::require_polygon(p, "first polygon");
  detail::require_polygon(q, "second polygon");
  const Polygon a = detail::counter_clockwise(p);
  const Polygon b = detail::counter_clockwise(q);
  double inter = 0.0;
  if (is_convex(b)) {
    inter = polygon_area(clip_convex(a, b));
  } else if (is_convex(a)) {
    inter = polygon_area(clip_convex(b, a));
  } else {
    return detail::rasterized_iou(a, b);
  }
  const double uni = polygon_area(a) + polygon_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline double box_iou(const HorizontalBox& a, const HorizontalBox& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

inline Polygon to_polygon(const HorizontalBox& b) {
  return {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
}

inline Point box_x_axis(const RotatedBox& b) { return {std::cos(b.angle), std::sin(b.angle)}; }
inline Point box_y_axis(const RotatedBox& b) { return {-std::sin(b.angle), std::cos(b.angle)}; }

inline Polygon to_polygon(const RotatedBox& b) {
  const Point u = (0.5 * b.width) * box_x_axis(b);
  const Point v = (0.5 * b.height) * box_y_axis(b);
  return {b.center - u - v, b.center + u - v, b.center + u + v, b.center - u + v};
}

inline double polygon_area(const RotatedBox& b) { return b.width * b.height; }

inline std::array<Point, 4> endpoints(const AircraftDetection& det) {
  return {det.l1.p0, det.l1.p1, det.l2.p0, det.l2.p1};
}

inline HorizontalBox hbb_from_pair(const AircraftDetection& det) {
  const auto pts = endpoints(det);
  HorizontalBox box{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const Point& p : pts) {
    box.xmin = std::min(box.xmin, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.xmax = std::max(box.xmax, p.x);
    box.ymax = std::max(box.ymax, p.y);
  }
  if (!(box.xmin < box.xmax) || !(box.ymin < box.ymax)) {
    throw Error(ErrorKind::DegenerateBox, "segment endpoints span zero width or height");
  }
  return box;
}

/// Tightest rectangle aligned with l1 that holds all four endpoints.
inline RotatedBox rbb_from_pair(const AircraftDetection& det) {
  const double len = det.l1.length();
  if (!(len > 0)) throw Error(ErrorKind::DegenerateBox, "fuselage segment has zero length");
  Point u = (1.0 / len) * det.l1.direction();
  const Point v{-u.y, u.x};
  double umin = std::numeric_limits<double>::infinity(), vmin = umin;
  double umax = -umin, vmax = -umin;
  for (const Point& p : endpoints(det)) {
    umin = std::min(umin, dot(p, u));
    umax = std::max(umax, dot(p, u));
    vmin = std::min(vmin, dot(p, v));
    vmax = std::max(vmax, dot(p, v));
  }
  RotatedBox box;
  box.width = umax - umin;
  box.height = vmax - vmin;
  const double scale = std::max(len, det.l2.length());
  if (!(box.width > 1e-12 * scale) || !(box.height > 1e-12 * scale)) {
    throw Error(ErrorKind::DegenerateBox, "rotated box has zero extent");
  }
  box.center = (0.5 * (umin + umax)) * u + (0.5 * (vmin + vmax)) * v;
  box.angle = normalize_half_turn(std::atan2(u.y, u.x));
  return box;
}

/// Pentagonal mask: head, both wingtips, and a tail edge parallel to l2 of
/// length |l2| / 5 centered on the tail. Wings are labelled by the sign of
/// the cross product with the head-to-tail direction (positive = right).
inline PentagonMask pentagon_from_pair(const AircraftDetection& det) {
  if (!det.head_resolved) {
    throw Error(ErrorKind::HeadUnresolved, "pentagon needs a resolved head");
  }
  const Point head = det.l1.p0;
  const Point tail = det.l1.p1;
  const Point axis = tail - head;
  const double wing_len = det.l2.length();
  if (!(norm(axis) > 0) || !(wing_len > 0)) {
    throw Error(ErrorKind::DegeneratePentagon, "zero-length segment");
  }
  const double side0 = cross(axis, det.l2.p0 - tail);
  const double side1 = cross(axis, det.l2.p1 - tail);
  if (side0 == 0.0 || side1 == 0.0 || (side0 > 0) == (side1 > 0)) {
    throw Error(ErrorKind::DegeneratePentagon, "wingtips are not on opposite sides of the fuselage");
  }
  const Point right = side0 > 0 ? det.l2.p0 : det.l2.p1;
  const Point left = side0 > 0 ? det.l2.p1 : det.l2.p0;
  const Point half = (0.1) * (right - left);
  PentagonMask mask;
  mask.vertices = {head, right, tail + half, tail - half, left};
  if (!(polygon_area(mask.vertices) > 0.0) || !is_simple(mask.vertices)) {
    throw Error(ErrorKind::DegeneratePentagon, "pentagon is not a simple polygon");
  }
  return mask;
}

inline double point_segment_distance(Point p, const LineSegment& s) {
  const Point d = s.direction();
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, s.p0);
  const double t = std::clamp(dot(p - s.p0, d) / len2, 0.0, 1.0);
  return distance(p, s.p0 + t * d);
}

inline double segment_distance(const LineSegment& a, const LineSegment& b) {
  if (segments_intersect(a.p0, a.p1, b.p0, b.p1)) return 0.0;
  return std::min({point_segment_distance(a.p0, b), point_segment_distance(a.p1, b),
                   point_segment_distance(b.p0, a), point_segment_distance(b.p1, a)});
}

}  // namespace xline
