#pragma once

// Run configuration: one key=value file (optional [section] headers prefix
// the keys that follow), overridable from the command line.
//
//   stride = 4
//   [cutline]
//   area_thresh = 100     # same as cutline.area_thresh = 100

#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "xline/cutline.hpp"
#include "xline/eval.hpp"
#include "xline/grouping.hpp"
#include "xline/heatmap.hpp"
#include "xline/loss.hpp"
#include "xline/pipeline.hpp"

namespace xline {

struct RunConfig {
  int stride = 4;
  double binarize_tau = kDefaultThreshold;
  bool cutline_enabled = true;
  CutlineConfig cutline;
  GroupingConfig grouping;
  SimulationConfig sim;
  LossWeights loss;
  ApStyle ap_style = ApStyle::Continuous;
  double iou_thresh = 0.5;

  PipelineConfig pipeline() const { return {binarize_tau, cutline_enabled, cutline, grouping}; }

  void validate() const {
    if (stride < 1) throw Error(ErrorKind::InvalidArgument, "stride must be >= 1");
    if (!(binarize_tau > 0 && binarize_tau < 1)) throw Error(ErrorKind::InvalidArgument, "tau must lie in (0, 1)");
    if (!(iou_thresh > 0 && iou_thresh <= 1)) throw Error(ErrorKind::InvalidArgument, "iou_thresh must lie in (0, 1]");
    if (!(sim.blur_sigma >= 0) || !(sim.noise_amp >= 0)) throw Error(ErrorKind::InvalidArgument, "sim.blur_sigma and sim.noise_amp must be >= 0");
    if (!(loss.gamma >= 0) || !(loss.w_ep >= 0) || !(loss.w_hp >= 0)) throw Error(ErrorKind::InvalidArgument, "loss parameters must be >= 0");
    cutline.validate();
    grouping.validate();
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw Error(ErrorKind::InvalidArgument, std::string(key) + ": '" + std::string(v) + "' is not a number");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw Error(ErrorKind::InvalidArgument, std::string(key) + ": '" + std::string(v) + "' is not an integer");
  }
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorKind::InvalidArgument, std::string(key) + ": '" + std::string(v) + "' is not a boolean");
}

}  // namespace detail

/// Sets one dotted key. Unknown keys are an error.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_double;
  value = detail::trim(value);
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
  const std::string v(value);

  if (key == "stride") cfg.stride = detail::parse_int<int>(key, value);
  else if (key == "tau" || key == "binarize_tau") cfg.binarize_tau = parse_double(key, value);
  else if (key == "iou_thresh") cfg.iou_thresh = parse_double(key, value);
  else if (key == "ap_style") cfg.ap_style = ap_style_from_string(v);
  else if (key == "cutline.enabled") cfg.cutline_enabled = detail::parse_bool(key, value);
  else if (key == "cutline.area_thresh") cfg.cutline.area_thresh = parse_double(key, value);
  else if (key == "cutline.ratio_thresh") cfg.cutline.ratio_thresh = parse_double(key, value);
  else if (key == "cutline.cut_len") cfg.cutline.cut_len = detail::parse_int<int>(key, value);
  else if (key == "cutline.policy") cfg.cutline.policy = cut_policy_from_string(v);
  else if (key == "grouping.midpoint_tol") cfg.grouping.midpoint_tol = parse_double(key, value);
  else if (key == "grouping.angle_min") cfg.grouping.angle_min = parse_double(key, value);
  else if (key == "grouping.angle_max") cfg.grouping.angle_max = parse_double(key, value);
  else if (key == "grouping.extension_tol") cfg.grouping.extension_tol = parse_double(key, value);
  else if (key == "grouping.head_radius") cfg.grouping.head_radius = parse_double(key, value);
  else if (key == "sim.blur_sigma") cfg.sim.blur_sigma = parse_double(key, value);
  else if (key == "sim.noise_amp") cfg.sim.noise_amp = parse_double(key, value);
  else if (key == "sim.rng_seed") cfg.sim.rng_seed = detail::parse_int<std::uint64_t>(key, value);
  else if (key == "loss.gamma") cfg.loss.gamma = parse_double(key, value);
  else if (key == "loss.w_ep") cfg.loss.w_ep = parse_double(key, value);
  else if (key == "loss.w_hp") cfg.loss.w_hp = parse_double(key, value);
  else throw Error(ErrorKind::InvalidArgument, "unknown config key '" + std::string(key) + "'");
}

inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::InvalidArgument, "config line " + std::to_string(line_no) + ": bad section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(detail::trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    apply_setting(cfg, key, line.substr(eq + 1));
  }
  cfg.validate();
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

/// Every setting as a key = value line; parse_config(to_config_text(c))
/// reproduces c.
inline std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "stride = " << cfg.stride << '\n'
     << "tau = " << cfg.binarize_tau << '\n'
     << "iou_thresh = " << cfg.iou_thresh << '\n'
     << "ap_style = " << to_string(cfg.ap_style) << '\n'
     << "cutline.enabled = " << (cfg.cutline_enabled ? "true" : "false") << '\n'
     << "cutline.area_thresh = " << cfg.cutline.area_thresh << '\n'
     << "cutline.ratio_thresh = " << cfg.cutline.ratio_thresh << '\n'
     << "cutline.cut_len = " << cfg.cutline.cut_len << '\n'
     << "cutline.policy = " << to_string(cfg.cutline.policy) << '\n'
     << "grouping.midpoint_tol = " << cfg.grouping.midpoint_tol << '\n'
     << "grouping.angle_min = " << cfg.grouping.angle_min << '\n'
     << "grouping.angle_max = " << cfg.grouping.angle_max << '\n'
     << "grouping.extension_tol = " << cfg.grouping.extension_tol << '\n'
     << "grouping.head_radius = " << cfg.grouping.head_radius << '\n'
     << "sim.blur_sigma = " << cfg.sim.blur_sigma << '\n'
     << "sim.noise_amp = " << cfg.sim.noise_amp << '\n'
     << "sim.rng_seed = " << cfg.sim.rng_seed << '\n'
     << "loss.gamma = " << cfg.loss.gamma << '\n'
     << "loss.w_ep = " << cfg.loss.w_ep << '\n'
     << "loss.w_hp = " << cfg.loss.w_hp << '\n';
  return os.str();
}

}  // namespace xline
