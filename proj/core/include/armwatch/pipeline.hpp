#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "armwatch/detect.hpp"
#include "armwatch/ingest.hpp"
#include "armwatch/series.hpp"
#include "armwatch/tracking.hpp"

namespace armwatch {

struct PipelineOptions {
  double fps = 0.0;  // required, no default
  double min_confidence = kDefaultMinConfidence;
  TrackerOptions tracking{};  // tracking.map is the keypoint map for every stage
  int max_gap_frames = kDefaultMaxGapFrames;
  int smoothing_window = kDefaultSmoothingWindow;
  DetectorConfig detector{};
  bool sd_outliers = false;
  unsigned threads = 0;      // 0 = hardware concurrency

  void validate() const;
};

struct TrackSummary {
  TrackId track_id = 0;
  std::size_t frames = 0;
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;
  PersonStats left;
  PersonStats right;
  std::size_t episode_count = 0;
};

struct AnalysisResult {
  double fps = 0.0;
  std::size_t frame_count = 0;
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;
  std::vector<PersonTrack> tracks;   // after gap interpolation, by id
  std::vector<AngleSeries> series;   // smoothed; left then right per track
  std::vector<TrackSummary> summaries;
  std::vector<SuspicionEpisode> episodes;  // canonical episode_order
};

// associate -> interpolate -> extract -> smooth -> detect -> pair.
// Per-track work runs in parallel; output order never depends on it.
AnalysisResult analyze(std::span<const FrameObservation> frames, const PipelineOptions& options);

}  // namespace armwatch
