#pragma once

#include <optional>
#include <set>
#include <string>

#include "armwatch/pipeline.hpp"

namespace armwatch {

inline constexpr std::string_view kReportSchema = "armwatch.report/1";

// Structured JSON report: session metadata, the full configuration used,
// per-track summaries and every episode. Byte-identical for equal input.
//
//   {
//     "schema": "armwatch.report/1",
//     "session":  {"fps", "frame_count", "first_frame", "last_frame", "track_count", "keypoint_map"},
//     "config":   {"threshold_deg", "shoulder_min_deg", "min_duration_ms", "merge_gap_frames", "sd_k",
//                  "sd_outliers", "pair_max_wrist_px", "pair_min_overlap_ms", "min_confidence",
//                  "max_displacement_px", "grace_frames", "max_gap_frames", "smoothing_window"},
//     "tracks":   [{"track_id", "frames", "first_frame", "last_frame", "episode_count",
//                   "left": {"samples", "mean_elbow_deg", "sd_elbow_deg"}, "right": {...}}],
//     "episodes": [{"track_id", "side", "rule", "start_frame", "end_frame", "start_ms", "end_ms",
//                   "duration_ms", "peak_elbow_angle_deg", "mean_elbow_angle_deg",
//                   "partner_track_id", "partner_side"}]
//   }
//
// Missing statistics and partners are null.
std::string render_report(const AnalysisResult& result, const PipelineOptions& options);

// Flat CSV of the episode list.
std::string render_episode_table(const AnalysisResult& result);

struct ScatterFilter {
  std::set<TrackId> tracks;  // empty = all tracks
  std::optional<Side> side;  // nullopt = both
};

// CSV rows for plotting: track_id,side,frame,timestamp_ms,elbow_angle_deg,
// shoulder_neck_angle_deg,above_T. One row per sample with an elbow angle.
std::string render_scatter_table(const AnalysisResult& result, const ScatterFilter& filter, double threshold_deg);

}  // namespace armwatch
