#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "armwatch/error.hpp"
#include "armwatch/ingest.hpp"
#include "armwatch/report.hpp"
#include "armwatch/synth.hpp"

namespace armwatch::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kNoInput, "cannot write " + path);
  f << text;
}

[[noreturn]] void config_error(const YAML::Node& node, std::string_view key, std::string_view what) {
  const auto mark = node.Mark();
  if (mark.line >= 0) {
    throw Error(ErrorCode::kInvalidConfig, fmt::format("line {}: '{}': {}", mark.line + 1, key, what));
  }
  throw Error(ErrorCode::kInvalidConfig, fmt::format("'{}': {}", key, what));
}

template <typename T>
void read_key(const YAML::Node& section, const char* key, T& target) {
  const auto node = section[key];
  if (!node) return;
  if (!node.IsScalar()) config_error(node, key, "expected a scalar");
  try {
    target = node.as<T>();
  } catch (const YAML::Exception&) {
    config_error(node, key, fmt::format("cannot read '{}'", node.Scalar()));
  }
}

YAML::Node section(const YAML::Node& root, const char* name, std::initializer_list<std::string_view> known) {
  const auto node = root[name];
  if (!node) return node;
  if (!node.IsMap()) config_error(node, name, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      config_error(kv.first, key, fmt::format("unknown key in '{}'", name));
    }
  }
  return node;
}

// Flags shared by analyze, scatter and series.
struct InputFlags {
  std::string input;
  double fps = 0.0;
  std::string config;
  std::string output;
  double threshold = 0.0;
  double shoulder_min = 0.0;
  double min_duration_ms = 0.0;
  int merge_gap = 0;
  double sd_k = 0.0;
  bool sd_outliers = false;
  std::string keypoint_map;
  double min_confidence = 0.0;
  double max_displacement = 0.0;
  unsigned threads = 0;

  CLI::Option* threshold_opt = nullptr;
  CLI::Option* shoulder_min_opt = nullptr;
  CLI::Option* min_duration_opt = nullptr;
  CLI::Option* merge_gap_opt = nullptr;
  CLI::Option* sd_k_opt = nullptr;
  CLI::Option* sd_outliers_opt = nullptr;
  CLI::Option* keypoint_map_opt = nullptr;
  CLI::Option* min_confidence_opt = nullptr;
  CLI::Option* max_displacement_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "Directory of per-frame keypoint files, or a consolidated table")->required();
    app->add_option("--fps", fps, "Video frame rate (frames per second)")->required()->check(CLI::PositiveNumber);
    app->add_option("--config", config, "YAML config file (default: $ARMWATCH_CONFIG)");
    app->add_option("--output", output, "Output file (default: stdout)");
    threshold_opt = app->add_option("--threshold", threshold, "Elbow-angle threshold T in degrees");
    shoulder_min_opt = app->add_option("--shoulder-min", shoulder_min, "Minimum shoulder-neck angle in degrees");
    min_duration_opt = app->add_option("--min-duration-ms", min_duration_ms, "Minimum episode duration");
    merge_gap_opt = app->add_option("--merge-gap", merge_gap, "Frames bridged between runs");
    sd_k_opt = app->add_option("--sd-k", sd_k, "SD outlier multiplier");
    sd_outliers_opt = app->add_flag("--sd-outliers", sd_outliers, "Also report SD outlier episodes");
    keypoint_map_opt = app->add_option("--keypoint-map", keypoint_map, "viewer or body25-standard");
    min_confidence_opt = app->add_option("--min-confidence", min_confidence, "Keypoint confidence floor");
    max_displacement_opt = app->add_option("--max-displacement", max_displacement, "Tracking gate in pixels");
    app->add_option("--threads", threads, "Worker threads (0 = all cores)");
  }

  // defaults < config file < flags
  PipelineOptions resolve() const {
    PipelineOptions opt;
    std::string config_path = config;
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') config_path = env;
    }
    if (!config_path.empty()) opt = apply_config_file(config_path, opt);
    opt.fps = fps;
    opt.threads = threads;
    if (threshold_opt->count()) opt.detector.threshold_deg = threshold;
    if (shoulder_min_opt->count()) opt.detector.shoulder_min_deg = shoulder_min;
    if (min_duration_opt->count()) opt.detector.min_duration_ms = min_duration_ms;
    if (merge_gap_opt->count()) opt.detector.merge_gap_frames = merge_gap;
    if (sd_k_opt->count()) opt.detector.sd_k = sd_k;
    if (sd_outliers_opt->count()) opt.sd_outliers = sd_outliers;
    if (keypoint_map_opt->count()) opt.tracking.map = KeypointMap::from_name(keypoint_map);
    if (min_confidence_opt->count()) opt.min_confidence = min_confidence;
    if (max_displacement_opt->count()) opt.tracking.max_displacement_px = max_displacement;
    opt.validate();
    return opt;
  }
};

AnalysisResult run_pipeline(const InputFlags& flags, PipelineOptions& options) {
  options = flags.resolve();
  const auto frames = load_frames(flags.input, options.fps, options.min_confidence, options.threads);
  return analyze(frames, options);
}

}  // namespace

PipelineOptions apply_config_text(std::string_view yaml_text, PipelineOptions base) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::kInvalidConfig, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) throw Error(ErrorCode::kInvalidConfig, "config must be a mapping");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key != "detector" && key != "tracking" && key != "series" && key != "ingest") {
      config_error(kv.first, key, "unknown section");
    }
  }
  if (auto d = section(root, "detector",
                       {"threshold_deg", "shoulder_min_deg", "min_duration_ms", "merge_gap_frames", "sd_k",
                        "sd_outliers", "pair_max_wrist_px", "pair_min_overlap_ms"})) {
    read_key(d, "threshold_deg", base.detector.threshold_deg);
    read_key(d, "shoulder_min_deg", base.detector.shoulder_min_deg);
    read_key(d, "min_duration_ms", base.detector.min_duration_ms);
    read_key(d, "merge_gap_frames", base.detector.merge_gap_frames);
    read_key(d, "sd_k", base.detector.sd_k);
    read_key(d, "sd_outliers", base.sd_outliers);
    read_key(d, "pair_max_wrist_px", base.detector.pair_max_wrist_px);
    read_key(d, "pair_min_overlap_ms", base.detector.pair_min_overlap_ms);
  }
  if (auto t = section(root, "tracking", {"max_displacement_px", "grace_frames"})) {
    read_key(t, "max_displacement_px", base.tracking.max_displacement_px);
    read_key(t, "grace_frames", base.tracking.grace_frames);
  }
  if (auto s = section(root, "series", {"max_gap_frames", "smoothing_window"})) {
    read_key(s, "max_gap_frames", base.max_gap_frames);
    read_key(s, "smoothing_window", base.smoothing_window);
  }
  if (auto i = section(root, "ingest", {"min_confidence", "keypoint_map"})) {
    read_key(i, "min_confidence", base.min_confidence);
    std::string map_name;
    read_key(i, "keypoint_map", map_name);
    if (!map_name.empty()) base.tracking.map = KeypointMap::from_name(map_name);
  }
  return base;
}

PipelineOptions apply_config_file(const fs::path& path, PipelineOptions base) {
  try {
    return apply_config_text(read_text(path, ErrorCode::kInvalidConfig), base);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arm-extension episode detection on pose keypoint streams", "armwatch"};
  app.require_subcommand(1);

  InputFlags analyze_flags;
  std::string format = "report";
  auto* analyze_cmd = app.add_subcommand("analyze", "Detect extended-arm and exchange episodes");
  analyze_flags.attach(analyze_cmd);
  analyze_cmd->add_option("--format", format, "report (JSON) or table (episode CSV)")
      ->check(CLI::IsMember({"report", "table"}));

  InputFlags scatter_flags;
  std::vector<TrackId> scatter_tracks;
  std::string scatter_side;
  auto* scatter_cmd = app.add_subcommand("scatter", "Export per-frame angles with the above-threshold flag");
  scatter_flags.attach(scatter_cmd);
  scatter_cmd->add_option("--track", scatter_tracks, "Only these track ids (repeatable)");
  scatter_cmd->add_option("--side", scatter_side, "left or right (default both)")
      ->check(CLI::IsMember({"left", "right"}));

  InputFlags series_flags;
  auto* series_cmd = app.add_subcommand("series", "Export the conditioned angle series");
  series_flags.attach(series_cmd);

  std::string script_path;
  std::string synth_out;
  std::string synth_format = "frames";
  std::string prefix = "session";
  auto* synth_cmd = app.add_subcommand("synth", "Render a scripted synthetic session");
  synth_cmd->add_option("--script", script_path, "YAML scenario script")->required();
  synth_cmd->add_option("--output", synth_out, "Output directory")->required();
  synth_cmd->add_option("--format", synth_format, "frames (one JSON per frame) or table (single CSV)")
      ->check(CLI::IsMember({"frames", "table"}));
  synth_cmd->add_option("--prefix", prefix, "File name prefix for frame files");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*analyze_cmd) {
      PipelineOptions options;
      const auto result = run_pipeline(analyze_flags, options);
      write_output(analyze_flags.output,
                   format == "table" ? render_episode_table(result) : render_report(result, options), out);
      return result.episodes.empty() ? kExitOk : kExitEpisodes;
    }
    if (*scatter_cmd) {
      PipelineOptions options;
      const auto result = run_pipeline(scatter_flags, options);
      ScatterFilter filter;
      filter.tracks.insert(scatter_tracks.begin(), scatter_tracks.end());
      if (!scatter_side.empty()) filter.side = parse_side(scatter_side);
      write_output(scatter_flags.output, render_scatter_table(result, filter, options.detector.threshold_deg), out);
      return kExitOk;
    }
    if (*series_cmd) {
      PipelineOptions options;
      const auto result = run_pipeline(series_flags, options);
      write_output(series_flags.output, format_angle_table(result.series), out);
      return kExitOk;
    }
    if (*synth_cmd) {
      const auto script = synth::parse_script(read_text(script_path, ErrorCode::kInvalidScript));
      const auto generated = synth::generate(script);
      const fs::path dir(synth_out);
      fs::create_directories(dir);
      if (synth_format == "table") {
        write_output((dir / "keypoints.csv").string(), serialize_table(generated.frames), out);
      } else {
        write_frame_directory(dir, generated.frames, prefix);
      }
      write_output((dir / "ground_truth.csv").string(), synth::format_ground_truth(script, generated.truth), out);
      out << fmt::format("wrote {} frames for {} seats to {}\n", generated.frames.size(), script.seats.size(),
                         dir.string());
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "armwatch: error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "armwatch: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace armwatch::cli
