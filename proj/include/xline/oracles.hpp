#pragma once

// Reference implementations written independently of the main code paths.
// The self-check command and the test suites compare the library against
// them; nothing in the pipeline calls into this header.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "xline/geometry.hpp"
#include "xline/grid.hpp"
#include "xline/heatmap.hpp"

namespace xline::oracle {

namespace detail {

inline void fill(const Grid<std::uint8_t>& mask, Grid<int>& labels, int row, int col, int label) {
  if (!mask.contains(row, col) || !mask.at(row, col) || labels.at(row, col) >= 0) return;
  labels.at(row, col) = label;
  fill(mask, labels, row - 1, col, label);
  fill(mask, labels, row + 1, col, label);
  fill(mask, labels, row, col - 1, label);
  fill(mask, labels, row, col + 1, label);
}

}  // namespace detail

/// Recursive 4-neighbour flood fill. Each set cell gets the row-major index
/// of the first cell of its component; unset cells get -1.
inline Grid<int> flood_fill_labels(const Grid<std::uint8_t>& mask) {
  Grid<int> labels(mask.rows(), mask.cols(), -1);
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (mask.at(r, c) && labels.at(r, c) < 0) detail::fill(mask, labels, r, c, r * mask.cols() + c);
    }
  }
  return labels;
}

/// Cell-by-cell focal loss straight from the defining cases.
inline double focal_loss_reference(const Heatmap& pred, const Heatmap& gt, double gamma, int n_aircraft) {
  const double eps = 1e-7;
  double total = 0.0;
  for (int r = 0; r < gt.rows(); ++r) {
    for (int c = 0; c < gt.cols(); ++c) {
      double v = pred.at(r, c);
      if (v < eps) v = eps;
      if (v > 1.0 - eps) v = 1.0 - eps;
      double term;
      if (gt.at(r, c) == 1.0) {
        term = std::pow(1.0 - v, gamma) * std::log(v);
      } else {
        term = std::pow(v, gamma) * std::log(1.0 - v);
      }
      total += term;
    }
  }
  return -(1.0 / n_aircraft) * total;
}

/// Central differences of a scalar function of the prediction grid.
inline Grid<double> central_difference(const std::function<double(const Heatmap&)>& f, const Heatmap& pred, double h) {
  Grid<double> out(pred.rows(), pred.cols(), 0.0);
  Heatmap probe = pred;
  for (int r = 0; r < pred.rows(); ++r) {
    for (int c = 0; c < pred.cols(); ++c) {
      const double v = pred.at(r, c);
      probe.at(r, c) = v + h;
      const double up = f(probe);
      probe.at(r, c) = v - h;
      const double down = f(probe);
      probe.at(r, c) = v;
      out.at(r, c) = (up - down) / (2.0 * h);
    }
  }
  return out;
}

/// Winding-number containment test.
inline bool contains(std::span<const Point> poly, Point p) {
  int winding = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % n];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++winding;
    } else if (b.y <= p.y && side < 0) {
      --winding;
    }
  }
  return winding != 0;
}

/// IoU estimated from uniform samples over the joint bounding box.
inline double monte_carlo_iou(std::span<const Point> p, std::span<const Point> q, std::size_t samples,
                              std::uint64_t seed) {
  double xmin = p[0].x, xmax = p[0].x, ymin = p[0].y, ymax = p[0].y;
  for (auto poly : {p, q}) {
    for (const Point& v : poly) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(xmin, xmax), uy(ymin, ymax);
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point s{ux(rng), uy(rng)};
    const bool a = contains(p, s);
    const bool b = contains(q, s);
    both += a && b;
    either += a || b;
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

// Fixture generators shared by the self-check and the test suites.

inline Heatmap random_binary_heatmap(std::mt19937_64& rng, int rows, int cols, double density = 0.3) {
  Heatmap hm{Grid<double>(rows, cols, 0.0), 1, Channel::Fuselage};
  std::bernoulli_distribution bit(density);
  for (double& v : hm.values.values()) v = bit(rng) ? 1.0 : 0.0;
  return hm;
}

inline Heatmap random_prediction(std::mt19937_64& rng, int rows, int cols, double lo = 0.0, double hi = 1.0) {
  Heatmap hm{Grid<double>(rows, cols, 0.0), 1, Channel::Fuselage};
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : hm.values.values()) v = u(rng);
  return hm;
}

inline Grid<std::uint8_t> random_mask(std::mt19937_64& rng, int rows, int cols, double density) {
  Grid<std::uint8_t> mask(rows, cols, 0);
  std::bernoulli_distribution bit(density);
  for (auto& v : mask.values()) v = bit(rng) ? 1 : 0;
  return mask;
}

/// Convex polygon: 3-8 vertices at sorted random angles on a circle.
inline Polygon random_convex_polygon(std::mt19937_64& rng, double extent = 10.0) {
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = count(rng);
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (double& a : angles) a = 2.0 * kPi * u01(rng);
  std::sort(angles.begin(), angles.end());
  const Point center{extent * u01(rng), extent * u01(rng)};
  const double radius = extent * (0.2 + 0.4 * u01(rng));
  Polygon poly;
  for (double a : angles) poly.push_back(center + radius * Point{std::cos(a), std::sin(a)});
  return poly;
}

}  // namespace xline::oracle
