#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "armwatch/ingest.hpp"
#include "armwatch/pose_model.hpp"

namespace armwatch {

// Reference position used to follow one person between frames: the neck, or
// the centroid of whatever analysis landmarks are present when the neck is
// missing. nullopt when none of them are present.
std::optional<Point2> anchor_point(const Skeleton& s, const KeypointMap& map = {});

// Row-major m x n matrix of Euclidean distances, D(i, j) = |a[i] - b[j]|.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DistanceMatrix build_distance_matrix(std::span<const Point2> a, std::span<const Point2> b);

struct Assignment {
  std::size_t row = 0;
  std::size_t col = 0;
  double distance = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Greedy global-minimum matching: repeatedly takes the smallest remaining
// entry <= gate whose row and column are both unused. Ties go to the lower
// column, then the lower row. Result is sorted by row.
std::vector<Assignment> greedy_assign(const DistanceMatrix& d, double gate);

struct TrackerOptions {
  double max_displacement_px = 80.0;
  // A track unmatched for more than this many frames is closed.
  std::int64_t grace_frames = 15;
  KeypointMap map{};
};

// Sequential fold of frame observations into identity-stable tracks.
//
// Each frame, detections (rows) are matched to live tracks (columns, in
// track-id order) by greedy_assign on anchor distances. Unmatched detections
// open new tracks; unmatched tracks stay dormant until the grace period runs
// out. Detections without any analysis landmark have no anchor and are
// skipped.
class TrackAssociator {
 public:
  explicit TrackAssociator(TrackerOptions options = {});

  // Frames must arrive in strictly increasing order (kMalformedFile otherwise).
  void update(const FrameObservation& obs);

  // Every track seen so far, live or closed, ordered by track id.
  std::vector<PersonTrack> tracks() const;

  std::size_t live_count() const { return live_.size(); }
  std::size_t skipped_detections() const { return skipped_; }

 private:
  struct LiveTrack {
    PersonTrack track;
    Point2 last_anchor;
    std::int64_t last_frame = 0;
  };

  TrackerOptions options_;
  std::vector<LiveTrack> live_;
  std::vector<PersonTrack> closed_;
  TrackId next_id_ = 0;
  std::optional<std::int64_t> last_frame_;
  std::size_t skipped_ = 0;
};

// One association step on plain tracks: extends `prev_tracks` with `obs`,
// treating every given track as live.
std::vector<PersonTrack> associate_tracks(std::vector<PersonTrack> prev_tracks, const FrameObservation& obs,
                                          double max_displacement_px, const KeypointMap& map = {});

// Runs the associator across a whole session.
std::vector<PersonTrack> associate_all(std::span<const FrameObservation> frames, const TrackerOptions& options = {});

}  // namespace armwatch
