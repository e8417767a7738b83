#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "armwatch/pipeline.hpp"

namespace armwatch::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitEpisodes = 3;

// Environment variable naming a default config file.
inline constexpr const char* kConfigEnv = "ARMWATCH_CONFIG";

// Applies a YAML config file on top of `base`:
//
//   detector: {threshold_deg, shoulder_min_deg, min_duration_ms, merge_gap_frames, sd_k,
//              sd_outliers, pair_max_wrist_px, pair_min_overlap_ms}
//   tracking: {max_displacement_px, grace_frames}
//   series:   {max_gap_frames, smoothing_window}
//   ingest:   {min_confidence, keypoint_map}
//
// Every key is optional; unknown keys are kInvalidConfig.
PipelineOptions apply_config_text(std::string_view yaml_text, PipelineOptions base);
PipelineOptions apply_config_file(const std::filesystem::path& path, PipelineOptions base);

// Entry point shared by main() and the tests. `args` excludes the program
// name. Never throws; errors go to `err` and yield kExitError.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace armwatch::cli
