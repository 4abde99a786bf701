#pragma once

// Heatmap -> geometry: thresholding, 4-connected regions, and principal-axis
// segment fitting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "xline/grid.hpp"
#include "xline/heatmap.hpp"

namespace xline {

inline constexpr double kDefaultThreshold = 0.3;

struct BinaryMask {
  Grid<std::uint8_t> bits;
  double threshold_used = kDefaultThreshold;

  std::size_t popcount() const {
    return static_cast<std::size_t>(std::count(bits.values().begin(), bits.values().end(), 1));
  }
};

/// Inclusive cell rectangle.
struct CellBox {
  int min_col = 0;
  int min_row = 0;
  int max_col = 0;
  int max_row = 0;

  int width() const { return max_col - min_col + 1; }
  int height() const { return max_row - min_row + 1; }
};

struct PixelRegion {
  std::vector<Cell> pixels;
  Point centroid;  // cell units
  std::size_t area = 0;
  CellBox bbox;
  double mean_score = 0.0;
};

inline BinaryMask binarize(const Heatmap& hm, double tau = kDefaultThreshold) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "threshold must lie in (0, 1)");
  BinaryMask mask{Grid<std::uint8_t>(hm.rows(), hm.cols(), 0), tau};
  const auto src = hm.values.values();
  auto dst = mask.bits.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= tau ? 1 : 0;
  return mask;
}

inline PixelRegion make_region(std::vector<Cell> pixels, const Heatmap& src) {
  PixelRegion region;
  region.area = pixels.size();
  region.bbox = {pixels.front().col, pixels.front().row, pixels.front().col, pixels.front().row};
  double sx = 0.0, sy = 0.0, score = 0.0;
  for (const Cell& c : pixels) {
    region.bbox.min_col = std::min(region.bbox.min_col, c.col);
    region.bbox.max_col = std::max(region.bbox.max_col, c.col);
    region.bbox.min_row = std::min(region.bbox.min_row, c.row);
    region.bbox.max_row = std::max(region.bbox.max_row, c.row);
    sx += c.col;
    sy += c.row;
    score += src.values[c];
  }
  const double n = static_cast<double>(pixels.size());
  region.centroid = {sx / n, sy / n};
  region.mean_score = std::clamp(score / n, 0.0, 1.0);
  region.pixels = std::move(pixels);
  return region;
}

/// Maximal 4-connected regions of set bits, ordered by (bbox min row,
/// bbox min col).
inline std::vector<PixelRegion> connected_components(const BinaryMask& mask, const Heatmap& src) {
  if (!mask.bits.same_shape(src.values)) {
    throw Error(ErrorKind::ShapeMismatch, "mask and source heatmap differ in shape");
  }
  std::vector<PixelRegion> regions;
  for (auto& group : label_4connected(mask.bits)) regions.push_back(make_region(std::move(group), src));
  std::stable_sort(regions.begin(), regions.end(), [](const PixelRegion& a, const PixelRegion& b) {
    if (a.bbox.min_row != b.bbox.min_row) return a.bbox.min_row < b.bbox.min_row;
    return a.bbox.min_col < b.bbox.min_col;
  });
  return regions;
}

/// Cell coordinates -> image pixels under the cell-center convention.
inline Point cell_to_pixel(Point cell, int stride) {
  return {(cell.x + 0.5) * stride, (cell.y + 0.5) * stride};
}

/// Long axis of the region's moment ellipse, clipped to the extreme cell
/// projections on that axis. Isotropic regions fall back to the grid x-axis.
inline LineSegment fit_segment(const PixelRegion& region, int stride) {
  if (region.area < 2 || region.pixels.size() < 2) {
    throw Error(ErrorKind::RegionTooSmall, "segment fitting needs at least 2 cells");
  }
  const Point c = region.centroid;
  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
  for (const Cell& p : region.pixels) {
    const double dx = p.col - c.x;
    const double dy = p.row - c.y;
    mu20 += dx * dx;
    mu02 += dy * dy;
    mu11 += dx * dy;
  }
  const double n = static_cast<double>(region.pixels.size());
  mu20 /= n;
  mu02 /= n;
  mu11 /= n;
  double theta = 0.0;
  if (std::abs(mu20 - mu02) >= 1e-9 || std::abs(mu11) >= 1e-9) {
    theta = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
  }
  const Point axis{std::cos(theta), std::sin(theta)};
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  for (const Cell& p : region.pixels) {
    const double t = dot(Point{p.col - c.x, p.row - c.y}, axis);
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  return {cell_to_pixel(c + tmin * axis, stride), cell_to_pixel(c + tmax * axis, stride), region.mean_score};
}

/// Point-like regions of an endpoint (C) or head (D) heatmap.
inline std::vector<PixelRegion> extract_points(const Heatmap& hm, double tau = kDefaultThreshold) {
  return connected_components(binarize(hm, tau), hm);
}

/// Binarize, label and fit every region of at least two cells.
inline std::vector<LineSegment> extract_segments(const Heatmap& hm, double tau = kDefaultThreshold) {
  std::vector<LineSegment> segments;
  for (const PixelRegion& region : connected_components(binarize(hm, tau), hm)) {
    if (region.area < 2) continue;
    const LineSegment s = fit_segment(region, hm.stride);
    if (s.length() > 0) segments.push_back(s);
  }
  return segments;
}

}  // namespace xline
