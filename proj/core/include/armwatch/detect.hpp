#pragma once

#include <optional>
#include <span>
#include <vector>

#include "armwatch/pose_model.hpp"
#include "armwatch/series.hpp"

namespace armwatch {

struct DetectorConfig {
  double threshold_deg = 148.0;      // elbow angle T
  double shoulder_min_deg = 90.0;    // shoulder-neck minimum; 0 disables the check
  double min_duration_ms = 200.0;
  int merge_gap_frames = 1;
  double sd_k = 1.0;
  double pair_max_wrist_px = 120.0;
  double pair_min_overlap_ms = 120.0;

  // Throws kInvalidConfig when a field is out of range.
  void validate() const;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

// Minimum number of present samples before SD outliers are considered.
inline constexpr std::size_t kMinSdSamples = 10;

// The extended-arm rule: elbow >= T and shoulder-neck >= shoulder_min.
// A missing angle never qualifies.
bool extended_arm(std::optional<double> elbow_deg, std::optional<double> shoulder_neck_deg,
                  const DetectorConfig& cfg);

// Sustained extended-arm episodes of one series.
//
// Qualifying frames form runs of consecutive frame numbers; runs separated by
// at most merge_gap_frames non-qualifying (or absent) frames are merged, and a
// merged run is kept when end_ms - start_ms + one frame period reaches
// min_duration_ms. Peak and mean are taken over the present elbow angles
// inside the span.
std::vector<SuspicionEpisode> detect_episodes(const AngleSeries& series, const DetectorConfig& cfg);

// Frames whose elbow angle exceeds mean + sd_k * sd, coalesced into runs of
// consecutive frames. Nothing is flagged when sd is 0 or fewer than
// kMinSdSamples angles are present.
std::vector<SuspicionEpisode> sd_outliers(const AngleSeries& series, const DetectorConfig& cfg);

// Pairs of extended-arm episodes on different tracks that overlap in time by
// at least pair_min_overlap_ms (inclusive of one frame period) and whose
// episode-side wrists come within pair_max_wrist_px in some frame of the
// overlap. Each qualifying pair yields one candidate spanning the overlap;
// track_id is the lower track of the pair and partner_track_id the other.
// The candidate's peak is the larger of the two episode peaks and its mean
// the average of the two episode means. `tracks` supplies wrist positions.
std::vector<SuspicionEpisode> exchange_candidates(std::span<const SuspicionEpisode> episodes,
                                                  std::span<const PersonTrack> tracks, double fps,
                                                  const DetectorConfig& cfg, const KeypointMap& map = {});

}  // namespace armwatch
