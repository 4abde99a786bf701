#pragma once

// Per-channel heatmaps: ground-truth rasterization, a blur-and-noise model
// of trained-network output, and the plain-text heatmap file format.
//
// Channel A holds fuselage segments, B wing segments, C the four segment
// endpoints of every aircraft and D the head keypoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <charconv>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "xline/annotations.hpp"
#include "xline/core.hpp"
#include "xline/grid.hpp"

namespace xline {

enum class Channel : int { Fuselage = 0, Wings = 1, Endpoints = 2, Head = 3 };

inline constexpr std::array<Channel, 4> kAllChannels = {Channel::Fuselage, Channel::Wings,
                                                        Channel::Endpoints, Channel::Head};

inline char channel_letter(Channel c) { return "ABCD"[static_cast<int>(c)]; }

inline Channel channel_from_letter(char letter) {
  switch (letter) {
    case 'A': return Channel::Fuselage;
    case 'B': return Channel::Wings;
    case 'C': return Channel::Endpoints;
    case 'D': return Channel::Head;
    default: throw Error(ErrorKind::InvalidArgument, std::string("unknown heatmap channel '") + letter + "'");
  }
}

struct Heatmap {
  Grid<double> values;
  int stride = 1;
  Channel channel = Channel::Fuselage;

  int rows() const { return values.rows(); }
  int cols() const { return values.cols(); }
  double& at(int row, int col) { return values.at(row, col); }
  double at(int row, int col) const { return values.at(row, col); }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

/// One heatmap per channel, indexed by Channel.
using HeatmapSet = std::array<Heatmap, 4>;

inline Heatmap& get(HeatmapSet& set, Channel c) { return set[static_cast<int>(c)]; }
inline const Heatmap& get(const HeatmapSet& set, Channel c) { return set[static_cast<int>(c)]; }

/// Zero heatmap of ceil(H/D) x ceil(W/D) cells.
inline Heatmap make_heatmap(ImageSize size, int stride, Channel channel) {
  if (stride < 1) throw Error(ErrorKind::InvalidArgument, "stride must be >= 1");
  const int rows = (size.height + stride - 1) / stride;
  const int cols = (size.width + stride - 1) / stride;
  if (rows <= 0 || cols <= 0) throw Error(ErrorKind::InvalidArgument, "heatmap would be empty");
  return {Grid<double>(rows, cols, 0.0), stride, channel};
}

/// Cell covering an image point: the one whose center (c + 0.5) * D is
/// nearest to it.
inline Cell cell_of(Point p, int stride) {
  return {static_cast<int>(std::floor(p.x / stride)), static_cast<int>(std::floor(p.y / stride))};
}

/// 4-connected digital line from a to b (both ends included). Steps follow
/// the order in which the ideal line crosses cell boundaries, x first on
/// ties.
inline std::vector<Cell> line_cells(Cell a, Cell b) {
  const int dx = std::abs(b.col - a.col);
  const int dy = std::abs(b.row - a.row);
  const int sx = b.col >= a.col ? 1 : -1;
  const int sy = b.row >= a.row ? 1 : -1;
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(dx + dy + 1));
  cells.push_back(a);
  long ix = 0, iy = 0;
  Cell cur = a;
  while (ix < dx || iy < dy) {
    if (iy == dy || (ix < dx && (2 * ix + 1) * static_cast<long>(dy) <= (2 * iy + 1) * static_cast<long>(dx))) {
      ++ix;
      cur.col += sx;
    } else {
      ++iy;
      cur.row += sy;
    }
    cells.push_back(cur);
  }
  return cells;
}

inline void draw_segment(Heatmap& hm, const LineSegment& seg) {
  for (const Cell& c : line_cells(cell_of(seg.p0, hm.stride), cell_of(seg.p1, hm.stride))) {
    if (hm.values.contains(c)) hm.values[c] = 1.0;
  }
}

inline void draw_point(Heatmap& hm, Point p) {
  const Cell c = cell_of(p, hm.stride);
  if (hm.values.contains(c)) hm.values[c] = 1.0;
}

/// Hard binary ground truth for one channel.
inline Heatmap render_gt(const SceneAnnotation& scene, int stride, Channel channel) {
  Heatmap hm = make_heatmap(scene.size, stride, channel);
  for (const AircraftDetection& a : ground_truth_pairs(scene)) {
    switch (channel) {
      case Channel::Fuselage: draw_segment(hm, a.l1); break;
      case Channel::Wings: draw_segment(hm, a.l2); break;
      case Channel::Endpoints:
        for (Point p : {a.l1.p0, a.l1.p1, a.l2.p0, a.l2.p1}) draw_point(hm, p);
        break;
      case Channel::Head: draw_point(hm, a.l1.p0); break;
    }
  }
  return hm;
}

inline HeatmapSet render_all(const SceneAnnotation& scene, int stride) {
  return {render_gt(scene, stride, Channel::Fuselage), render_gt(scene, stride, Channel::Wings),
          render_gt(scene, stride, Channel::Endpoints), render_gt(scene, stride, Channel::Head)};
}

struct SimulationConfig {
  double blur_sigma = 0.0;
  double noise_amp = 0.0;
  std::uint64_t rng_seed = 0;
};

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + radius)];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace detail

/// Synthetic "network output": every connected ground-truth structure is
/// blurred on its own and rescaled so its peak over the structure is 1,
/// then uniform noise in [0, noise_amp] is added and values are clamped.
inline Heatmap simulate_prediction(const Heatmap& gt, const SimulationConfig& cfg) {
  if (!(cfg.blur_sigma >= 0) || !(cfg.noise_amp >= 0) || !std::isfinite(cfg.blur_sigma) ||
      !std::isfinite(cfg.noise_amp)) {
    throw Error(ErrorKind::InvalidArgument, "blur_sigma and noise_amp must be finite and >= 0");
  }
  Heatmap out = gt;
  if (cfg.blur_sigma > 0) {
    Grid<std::uint8_t> mask(gt.rows(), gt.cols(), 0);
    for (int r = 0; r < gt.rows(); ++r)
      for (int c = 0; c < gt.cols(); ++c) mask.at(r, c) = gt.at(r, c) >= 0.5;

    const std::vector<double> kernel = detail::gaussian_kernel(cfg.blur_sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    out.values = Grid<double>(gt.rows(), gt.cols(), 0.0);

    for (const auto& structure : label_4connected(mask)) {
      int r0 = structure.front().row, r1 = r0, c0 = structure.front().col, c1 = c0;
      for (const Cell& cell : structure) {
        r0 = std::min(r0, cell.row);
        r1 = std::max(r1, cell.row);
        c0 = std::min(c0, cell.col);
        c1 = std::max(c1, cell.col);
      }
      r0 = std::max(0, r0 - radius);
      c0 = std::max(0, c0 - radius);
      r1 = std::min(gt.rows() - 1, r1 + radius);
      c1 = std::min(gt.cols() - 1, c1 + radius);
      const int h = r1 - r0 + 1, w = c1 - c0 + 1;

      Grid<double> src(h, w, 0.0), tmp(h, w, 0.0), blurred(h, w, 0.0);
      for (const Cell& cell : structure) src.at(cell.row - r0, cell.col - c0) = 1.0;
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          double acc = 0.0;
          for (int k = -radius; k <= radius; ++k) {
            if (c + k >= 0 && c + k < w) acc += kernel[static_cast<std::size_t>(k + radius)] * src.at(r, c + k);
          }
          tmp.at(r, c) = acc;
        }
      }
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          double acc = 0.0;
          for (int k = -radius; k <= radius; ++k) {
            if (r + k >= 0 && r + k < h) acc += kernel[static_cast<std::size_t>(k + radius)] * tmp.at(r + k, c);
          }
          blurred.at(r, c) = acc;
        }
      }
      double peak = 0.0;
      for (const Cell& cell : structure) peak = std::max(peak, blurred.at(cell.row - r0, cell.col - c0));
      if (peak <= 0) continue;
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r + r0, c + c0) += blurred.at(r, c) / peak;
    }
  }
  if (cfg.noise_amp > 0) {
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> noise(0.0, cfg.noise_amp);
    for (double& v : out.values.values()) v += noise(rng);
  }
  for (double& v : out.values.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

/// Simulates all four channels of one image. Channel c of image i draws
/// its noise from seed rng_seed + 4*i + c.
inline HeatmapSet simulate_set(const HeatmapSet& gt, const SimulationConfig& cfg, std::uint64_t image_index) {
  HeatmapSet out = gt;
  for (Channel c : kAllChannels) {
    SimulationConfig per = cfg;
    per.rng_seed = cfg.rng_seed + 4 * image_index + static_cast<std::uint64_t>(c);
    get(out, c) = simulate_prediction(get(gt, c), per);
  }
  return out;
}

/// Writes "XHM 1 <channel> <stride>", "<rows> <cols>", then one line per
/// row of 17-significant-digit values.
inline void write_heatmap(std::ostream& os, const Heatmap& hm) {
  os << "XHM 1 " << channel_letter(hm.channel) << ' ' << hm.stride << '\n';
  os << hm.rows() << ' ' << hm.cols() << '\n';
  char buf[64];
  for (int r = 0; r < hm.rows(); ++r) {
    for (int c = 0; c < hm.cols(); ++c) {
      auto res = std::to_chars(buf, buf + sizeof(buf), hm.at(r, c), std::chars_format::general, 17);
      if (c) os << ' ';
      os.write(buf, res.ptr - buf);
    }
    os << '\n';
  }
}

inline Heatmap read_heatmap(std::istream& is) {
  std::string magic, channel;
  int version = 0, stride = 0, rows = 0, cols = 0;
  if (!(is >> magic >> version >> channel >> stride) || magic != "XHM" || version != 1 || channel.size() != 1) {
    throw Error(ErrorKind::MalformedRecord, "bad heatmap header");
  }
  if (stride < 1) throw Error(ErrorKind::MalformedRecord, "heatmap stride must be >= 1");
  if (!(is >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw Error(ErrorKind::MalformedRecord, "bad heatmap dimensions");
  }
  Heatmap hm{Grid<double>(rows, cols, 0.0), stride, channel_from_letter(channel[0])};
  std::string token;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!(is >> token)) throw Error(ErrorKind::MalformedRecord, "heatmap ends early at row " + std::to_string(r));
      double v = 0.0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::MalformedRecord, "heatmap value '" + token + "' is not a number in [0,1]");
      }
      hm.at(r, c) = v;
    }
  }
  if (is >> token) throw Error(ErrorKind::MalformedRecord, "trailing data after heatmap grid");
  return hm;
}

inline std::string heatmap_to_string(const Heatmap& hm) {
  std::ostringstream os;
  write_heatmap(os, hm);
  return os.str();
}

}  // namespace xline
