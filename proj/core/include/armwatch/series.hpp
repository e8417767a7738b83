#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "armwatch/pose_model.hpp"

namespace armwatch {

inline constexpr int kDefaultMaxGapFrames = 10;
inline constexpr int kDefaultSmoothingWindow = 5;

struct AngleSeries {
  TrackId track_id = 0;
  Side side = Side::kRight;
  std::vector<ArmAngleSample> samples;  // strictly increasing frames
  double fps = 25.0;
};

// Fills short keypoint gaps by per-coordinate linear interpolation in frame
// index. A run of missing frames is filled only when it is bounded by present
// values on both sides and spans at most `max_gap_frames` frames. Filled
// keypoints take the lower confidence of the two endpoints. Leading and
// trailing gaps are left alone. Frames the track has no skeleton for are not
// synthesized. Idempotent.
PersonTrack interpolate_gaps(const PersonTrack& track, int max_gap_frames = kDefaultMaxGapFrames);

// Centered moving median over a sequence with holes. Missing entries stay
// missing and never feed a neighbour's window; windows are truncated at the
// ends, and an even number of values takes the mean of the middle two.
// Throws kBadWindow unless window is odd and >= 1.
std::vector<std::optional<double>> moving_median(std::span<const std::optional<double>> values, int window);

// Applies moving_median to both angle channels of the series.
AngleSeries smooth_angles(const AngleSeries& series, int window = kDefaultSmoothingWindow);

// One sample per skeleton of the track.
AngleSeries extract_angle_series(const PersonTrack& track, Side side, double fps, const KeypointMap& map = {});

struct PersonStats {
  std::optional<double> mean;
  std::optional<double> sd;  // population standard deviation
  std::size_t n = 0;
};

// Statistics of the present elbow angles.
PersonStats person_stats(const AngleSeries& series);

// CSV: track_id,side,frame,timestamp_ms,elbow_angle_deg,shoulder_neck_angle_deg.
// Missing angles are empty cells.
std::string format_angle_table(std::span<const AngleSeries> series);

}  // namespace armwatch
