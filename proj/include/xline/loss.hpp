#pragma once

// Modified focal loss over binary ground-truth heatmaps, its analytic
// gradient, and the weighted four-channel total.

#include <algorithm>
#include <cmath>

#include "xline/heatmap.hpp"

namespace xline {

struct LossWeights {
  double gamma = 2.0;
  double w_ep = 0.5;  // endpoint heatmap (C)
  double w_hp = 0.5;  // head heatmap (D)
};

/// Predictions are clamped to [eps, 1 - eps] before taking logarithms.
inline constexpr double kLossEpsilon = 1e-7;

namespace detail {

inline void check_loss_inputs(const Heatmap& pred, const Heatmap& gt, const LossWeights& w, int n_aircraft) {
  if (!pred.values.same_shape(gt.values)) {
    throw Error(ErrorKind::ShapeMismatch, "prediction is " + std::to_string(pred.rows()) + "x" +
                                              std::to_string(pred.cols()) + ", ground truth is " +
                                              std::to_string(gt.rows()) + "x" + std::to_string(gt.cols()));
  }
  if (n_aircraft < 1) throw Error(ErrorKind::InvalidArgument, "aircraft count must be >= 1");
  if (!std::isfinite(w.gamma) || w.gamma < 0) throw Error(ErrorKind::InvalidArgument, "gamma must be finite and >= 0");
  for (double v : gt.values.values()) {
    if (v != 0.0 && v != 1.0) throw Error(ErrorKind::InvalidArgument, "ground truth must be binary");
  }
}

inline double clamp_prediction(double v) { return std::clamp(v, kLossEpsilon, 1.0 - kLossEpsilon); }

}  // namespace detail

/// -(1/N) * sum over cells of (1-v)^g log v where gt = 1 and v^g log(1-v)
/// where gt = 0.
inline double focal_loss(const Heatmap& pred, const Heatmap& gt, const LossWeights& w, int n_aircraft) {
  detail::check_loss_inputs(pred, gt, w, n_aircraft);
  const auto p = pred.values.values();
  const auto g = gt.values.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = detail::clamp_prediction(p[i]);
    if (g[i] == 1.0) {
      sum += std::pow(1.0 - v, w.gamma) * std::log(v);
    } else {
      sum += std::pow(v, w.gamma) * std::log(1.0 - v);
    }
  }
  return -sum / n_aircraft;
}

/// Per-cell derivative of focal_loss with respect to the raw prediction:
///   gt = 1:  -(1/N) * [ (1-v)^g / v - g (1-v)^(g-1) log v ]
///   gt = 0:  -(1/N) * [ g v^(g-1) log(1-v) - v^g / (1-v) ]
/// Cells whose prediction lies outside the clamp interval get 0.
inline Grid<double> focal_loss_grad(const Heatmap& pred, const Heatmap& gt, const LossWeights& w, int n_aircraft) {
  detail::check_loss_inputs(pred, gt, w, n_aircraft);
  Grid<double> grad(pred.rows(), pred.cols(), 0.0);
  const auto p = pred.values.values();
  const auto g = gt.values.values();
  auto out = grad.values();
  const double gamma = w.gamma;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < kLossEpsilon || p[i] > 1.0 - kLossEpsilon) continue;
    const double v = p[i];
    double d = 0.0;
    if (g[i] == 1.0) {
      d = std::pow(1.0 - v, gamma) / v;
      if (gamma != 0.0) d -= gamma * std::pow(1.0 - v, gamma - 1.0) * std::log(v);
    } else {
      d = -std::pow(v, gamma) / (1.0 - v);
      if (gamma != 0.0) d += gamma * std::pow(v, gamma - 1.0) * std::log(1.0 - v);
    }
    out[i] = -d / n_aircraft;
  }
  return grad;
}

/// Segment loss over A and B (one N-normalized sum) plus the weighted
/// endpoint (C) and head (D) losses.
inline double total_loss(const HeatmapSet& preds, const HeatmapSet& gts, const LossWeights& w, int n_aircraft) {
  const double segments = focal_loss(get(preds, Channel::Fuselage), get(gts, Channel::Fuselage), w, n_aircraft) +
                          focal_loss(get(preds, Channel::Wings), get(gts, Channel::Wings), w, n_aircraft);
  const double endpoints = focal_loss(get(preds, Channel::Endpoints), get(gts, Channel::Endpoints), w, n_aircraft);
  const double head = focal_loss(get(preds, Channel::Head), get(gts, Channel::Head), w, n_aircraft);
  return segments + w.w_ep * endpoints + w.w_hp * head;
}

}  // namespace xline
