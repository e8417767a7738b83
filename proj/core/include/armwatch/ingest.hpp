#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "armwatch/pose_model.hpp"

namespace armwatch {

// All people detected in one frame; identities are not yet known.
struct FrameObservation {
  std::int64_t frame = 0;
  double timestamp_ms = 0.0;
  std::vector<Skeleton> detections;

  friend bool operator==(const FrameObservation&, const FrameObservation&) = default;
};

// Parses one per-frame keypoint document:
//
//   {"version": 1.3, "people": [{"pose_keypoints_2d": [x0, y0, c0, ..., x24, y24, c24]}, ...]}
//
// Any other members are ignored. Each pose array must hold exactly 75 numbers.
// Throws kMalformedFile on structural problems, kBadTripleCount on a wrong
// array length.
FrameObservation parse_frame_file(std::string_view bytes, std::int64_t frame, double fps,
                                  double min_confidence = kDefaultMinConfidence);

// Writes the per-frame document. Missing keypoints become (0, 0, 0). Numbers
// use shortest round-trip formatting, so parse(serialize(x)) is bit-exact.
std::string serialize_frame(const FrameObservation& obs);

// Consolidated table: CSV with header `frame,person_index,slot,x,y,confidence`,
// one row per present keypoint. Frames come out ascending and people ordered
// by person_index.
inline constexpr std::string_view kTableHeader = "frame,person_index,slot,x,y,confidence";

std::vector<FrameObservation> parse_table_file(std::string_view text, double fps,
                                               double min_confidence = kDefaultMinConfidence);
std::string serialize_table(std::span<const FrameObservation> frames);

// Frame number embedded in a file name: the last run of digits in the stem,
// e.g. "cam_000000000042_keypoints.json" -> 42.
std::optional<std::int64_t> frame_number_from_filename(std::string_view filename);

// Canonical per-frame file name for `prefix` and `frame`.
std::string frame_filename(std::string_view prefix, std::int64_t frame);

// Loads every frame from `input`: either a directory of per-frame *.json
// files or a single consolidated table file. Per-frame files are parsed in
// parallel (`threads` == 0 picks the hardware concurrency) and returned in
// frame order. Throws kNoInput when nothing parseable is found; parse errors
// are rethrown with the offending file name.
std::vector<FrameObservation> load_frames(const std::filesystem::path& input, double fps,
                                          double min_confidence = kDefaultMinConfidence,
                                          unsigned threads = 0);

// Writes one file per frame into `dir` (created if needed).
void write_frame_directory(const std::filesystem::path& dir, std::span<const FrameObservation> frames,
                           std::string_view prefix = "session");

}  // namespace armwatch
