// xlinenet: convert annotations, render heatmaps, decode, evaluate, self-check.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xline/xline.hpp"

namespace fs = std::filesystem;
using namespace xline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSelfcheck = 3;

struct Flags {
  std::string config_path;
  int stride = 0;
  double tau = 0;
  std::uint64_t seed = 0;
  bool simulate = false;
  double blur = 0;
  double noise = 0;
  std::string form = "hbb";
  double iou = 0;
  std::string ap_style;
  std::string cut_policy;
  bool no_cutline = false;
  bool force = false;

  CLI::Option* stride_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* blur_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* iou_opt = nullptr;
  CLI::Option* style_opt = nullptr;
  CLI::Option* policy_opt = nullptr;
};

// Config file first, then flags on top.
RunConfig resolve_config(const Flags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) apply_config_text(cfg, read_file(f.config_path));
  if (f.stride_opt->count()) cfg.stride = f.stride;
  if (f.tau_opt->count()) cfg.binarize_tau = f.tau;
  if (f.seed_opt->count()) cfg.sim.rng_seed = f.seed;
  if (f.blur_opt->count()) cfg.sim.blur_sigma = f.blur;
  if (f.noise_opt->count()) cfg.sim.noise_amp = f.noise;
  if (f.iou_opt->count()) cfg.iou_thresh = f.iou;
  if (f.style_opt->count()) cfg.ap_style = ap_style_from_string(f.ap_style);
  if (f.policy_opt->count()) cfg.cutline.policy = cut_policy_from_string(f.cut_policy);
  if (f.no_cutline) cfg.cutline_enabled = false;
  cfg.validate();
  return cfg;
}

void refuse_overwrite(const fs::path& p, bool force) {
  if (!force && fs::exists(p)) throw Error(ErrorKind::Io, p.string() + " exists (use --force to overwrite)");
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& mode, bool force) {
  refuse_overwrite(out, force);
  const std::string text = read_file(in);
  std::string result;
  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const SceneAnnotation scene = parse_scene(line, index);
    if (mode == "kp2seg" && !scene.has_keypoints()) {
      throw Error(ErrorKind::MalformedRecord, "expected aircraft_kp in kp2seg mode", index);
    }
    if (mode == "rbox2seg" && scene.has_keypoints()) {
      throw Error(ErrorKind::MalformedRecord, "expected aircraft_rbox in rbox2seg mode", index);
    }
    result += segments_record(scene);
    result += '\n';
    ++index;
  }
  write_file_atomic(out, result);
  std::cout << "converted " << index << " records\n";
  return kExitOk;
}

int cmd_render(const std::string& in, const std::string& out_dir, const RunConfig& cfg, bool simulate, bool force) {
  const std::vector<SceneAnnotation> scenes = parse_annotation_file(read_file(in));
  fs::create_directories(out_dir);
  for (const SceneAnnotation& scene : scenes) {
    for (Channel c : kAllChannels) {
      refuse_overwrite(fs::path(out_dir) / (scene.image_id + "." + channel_letter(c) + ".xhm"), force);
    }
  }
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    HeatmapSet maps = render_all(scenes[i], cfg.stride);
    if (simulate) maps = simulate_set(maps, cfg.sim, i);
    for (Channel c : kAllChannels) {
      const fs::path p = fs::path(out_dir) / (scenes[i].image_id + "." + channel_letter(c) + ".xhm");
      write_file_atomic(p, heatmap_to_string(get(maps, c)));
    }
  }
  std::cout << "rendered " << scenes.size() << " images to " << out_dir << '\n';
  return kExitOk;
}

// Groups <image_id>.<A-D>.xhm files by image id, in sorted order.
std::map<std::string, std::map<char, fs::path>> scan_heatmaps(const std::string& dir) {
  std::map<std::string, std::map<char, fs::path>> found;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 7 || name.compare(name.size() - 4, 4, ".xhm") != 0 || name[name.size() - 6] != '.') continue;
    found[name.substr(0, name.size() - 6)][name[name.size() - 5]] = entry.path();
  }
  return found;
}

HeatmapSet load_set(const std::map<char, fs::path>& files) {
  HeatmapSet maps;
  for (Channel c : kAllChannels) {
    auto it = files.find(channel_letter(c));
    if (it == files.end()) throw Error(ErrorKind::Io, std::string("missing channel ") + channel_letter(c));
    std::ifstream in(it->second);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + it->second.string());
    get(maps, c) = read_heatmap(in);
  }
  return maps;
}

int cmd_decode(const std::string& dir, const std::string& out, const std::string& overlay, const RunConfig& cfg,
               bool force) {
  refuse_overwrite(out, force);
  if (!overlay.empty()) refuse_overwrite(overlay, force);
  std::string dets;
  std::string overlays;
  int failures = 0;
  for (const auto& [image_id, files] : scan_heatmaps(dir)) {
    ImageDetections img{image_id, {}};
    try {
      const HeatmapSet maps = load_set(files);
      const PipelineOutput result = decode_scene(maps, cfg.pipeline());
      for (const DecodedAircraft& a : result.aircraft) img.detections.push_back(to_record(a));
      if (!overlay.empty()) overlays += overlay_record(image_id, result, get(maps, Channel::Fuselage).stride) + "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "image " << image_id << ": " << e.what() << '\n';
    }
    dets += detections_record(img) + "\n";
  }
  write_file_atomic(out, dets);
  if (!overlay.empty()) write_file_atomic(overlay, overlays);
  std::cout << "decoded to " << out;
  if (failures) std::cout << " (" << failures << " images failed)";
  std::cout << '\n';
  return failures ? kExitData : kExitOk;
}

int cmd_eval(const std::string& det_path, const std::string& gt_path, BoxForm form, const RunConfig& cfg,
             const std::string& report_path, bool force) {
  if (!report_path.empty()) refuse_overwrite(report_path, force);
  const std::vector<ImageDetections> images = parse_detections_file(read_file(det_path));
  std::vector<TruthShape> truths;
  for (const SceneAnnotation& scene : parse_annotation_file(read_file(gt_path))) {
    for (TruthShape& t : truth_shapes(scene, form)) truths.push_back(std::move(t));
  }
  const std::vector<RankedShape> dets = ranked_shapes(images, form);
  const EvalReport report = match_and_score(dets, truths, form, cfg.iou_thresh, cfg.ap_style);
  std::ostringstream thresh;
  thresh << cfg.iou_thresh;
  char value[32];
  std::snprintf(value, sizeof value, "%.4f", report.ap);
  std::cout << "AP@" << thresh.str() << " (" << to_string(form) << ", " << to_string(cfg.ap_style) << ") = " << value
            << '\n';
  if (!report_path.empty()) write_file_atomic(report_path, report_json(report).dump(2) + "\n");
  return kExitOk;
}

int cmd_selfcheck() {
  bool all = true;
  for (const CheckResult& r : run_selfcheck()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aircraft detection post-processing: heatmaps to boxes, and evaluation."};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_path, "key = value config file")->check(CLI::ExistingFile);
  f.stride_opt = app.add_option("--stride", f.stride, "output stride in pixels");
  f.tau_opt = app.add_option("--tau", f.tau, "binarization threshold");
  f.seed_opt = app.add_option("--seed", f.seed, "simulation seed");
  app.add_flag("--simulate", f.simulate, "blur and add noise to rendered heatmaps");
  f.blur_opt = app.add_option("--blur", f.blur, "simulation blur sigma (cells)");
  f.noise_opt = app.add_option("--noise", f.noise, "simulation noise amplitude");
  app.add_option("--form", f.form, "box form")->check(CLI::IsMember({"hbb", "rbb", "pentagon"}));
  f.iou_opt = app.add_option("--iou", f.iou, "IoU threshold");
  f.style_opt = app.add_option("--ap-style", f.ap_style, "AP style")->check(CLI::IsMember({"continuous", "eleven_point"}));
  f.policy_opt = app.add_option("--cut-policy", f.cut_policy, "adhesion rule")
                     ->check(CLI::IsMember({"prose_any_violation", "pseudocode_both_violations"}));
  app.add_flag("--no-cutline", f.no_cutline, "disable adhesion cutting");
  app.add_flag("--force", f.force, "overwrite existing outputs");

  std::string in, out, mode = "auto", out_dir, overlay, report, gt;
  auto* convert = app.add_subcommand("convert", "annotations -> segment ground truth");
  convert->add_option("input", in, "annotation file")->required()->check(CLI::ExistingFile);
  convert->add_option("output", out, "segment file")->required();
  convert->add_option("--mode", mode, "record kind")->check(CLI::IsMember({"auto", "kp2seg", "rbox2seg"}));

  auto* render = app.add_subcommand("render", "annotations -> heatmap files");
  render->add_option("input", in, "annotation file")->required()->check(CLI::ExistingFile);
  render->add_option("--out-dir", out_dir, "output directory")->required();

  auto* decode = app.add_subcommand("decode", "heatmap directory -> detections");
  decode->add_option("input", in, "heatmap directory")->required();
  decode->add_option("output", out, "detections file")->required();
  decode->add_option("--overlay", overlay, "overlay geometry file");

  auto* eval = app.add_subcommand("eval", "detections + annotations -> AP");
  eval->add_option("detections", in, "detections file")->required()->check(CLI::ExistingFile);
  eval->add_option("ground_truth", gt, "annotation file")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", report, "JSON report file");

  auto* selfcheck = app.add_subcommand("selfcheck", "run the built-in verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = resolve_config(f);
    if (convert->parsed()) return cmd_convert(in, out, mode, f.force);
    if (render->parsed()) return cmd_render(in, out_dir, cfg, f.simulate, f.force);
    if (decode->parsed()) return cmd_decode(in, out, overlay, cfg, f.force);
    if (eval->parsed()) return cmd_eval(in, gt, box_form_from_string(f.form), cfg, report, f.force);
    if (selfcheck->parsed()) return cmd_selfcheck();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
