#pragma once

// Value types shared by every stage of the line-segment aircraft pipeline.
//
// Coordinates are image pixels, origin at the top-left corner, y pointing
// down. Heatmap cells are addressed as (col, row).

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xline {

enum class ErrorKind {
  MalformedRecord,
  OutOfBounds,
  DegenerateAircraft,
  ShapeMismatch,
  RegionTooSmall,
  DegenerateBox,
  HeadUnresolved,
  DegeneratePentagon,
  DegeneratePolygon,
  EmptyGroundTruth,
  InvalidArgument,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::DegenerateAircraft: return "DegenerateAircraft";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::RegionTooSmall: return "RegionTooSmall";
    case ErrorKind::DegenerateBox: return "DegenerateBox";
    case ErrorKind::HeadUnresolved: return "HeadUnresolved";
    case ErrorKind::DegeneratePentagon: return "DegeneratePentagon";
    case ErrorKind::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Library error. Parse errors carry the index of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> record = std::nullopt)
      : std::runtime_error(format(kind, what, record)),
        kind_(kind),
        record_(record) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> record() const noexcept { return record_; }

 private:
  static std::string format(ErrorKind kind, const std::string& what,
                            std::optional<std::size_t> record) {
    std::string msg = to_string(kind);
    if (record) msg += " (record " + std::to_string(*record) + ")";
    msg += ": " + what;
    return msg;
  }

  ErrorKind kind_;
  std::optional<std::size_t> record_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline Point operator*(Point p, double s) { return {s * p.x, s * p.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Lexicographic (x, then y) ordering used wherever a canonical endpoint
/// order is needed.
inline bool lex_less(Point a, Point b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct LineSegment {
  Point p0;
  Point p1;
  double score = 1.0;

  double length() const { return distance(p0, p1); }
  Point direction() const { return p1 - p0; }
  Point center() const { return midpoint(p0, p1); }
  LineSegment reversed() const { return {p1, p0, score}; }

  friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Paired fuselage (l1) and wing (l2) segments. When head_resolved is set,
/// l1.p0 is the head and l1.p1 the tail.
struct AircraftDetection {
  LineSegment l1;
  LineSegment l2;
  double score = 0.0;
  bool head_resolved = false;

  friend bool operator==(const AircraftDetection&, const AircraftDetection&) = default;
};

/// Oriented rectangle; angle is counter-clockwise from the image x-axis in
/// [0, pi), width measured along the box x-axis.
struct RotatedBox {
  Point center;
  double width = 0.0;
  double height = 0.0;
  double angle = 0.0;

  friend bool operator==(const RotatedBox&, const RotatedBox&) = default;
};

struct HorizontalBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }

  friend bool operator==(const HorizontalBox&, const HorizontalBox&) = default;
};

using Polygon = std::vector<Point>;

/// Five-vertex aircraft mask in the order
/// [head, right_wing, bottom_right, bottom_left, left_wing].
struct PentagonMask {
  Polygon vertices;

  friend bool operator==(const PentagonMask&, const PentagonMask&) = default;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Maps an angle onto [0, pi).
inline double normalize_half_turn(double angle) {
  double a = std::fmod(angle, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a = 0.0;
  return a;
}

}  // namespace xline
