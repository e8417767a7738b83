#include "armwatch/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "armwatch/error.hpp"

namespace armwatch {

std::optional<Point2> anchor_point(const Skeleton& s, const KeypointMap& map) {
  if (auto neck = s.position(map.neck())) return neck;
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (std::size_t slot : map.analysis_slots()) {
    if (auto p = s.position(slot)) {
      sx += p->x;
      sy += p->y;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return Point2{sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

DistanceMatrix build_distance_matrix(std::span<const Point2> a, std::span<const Point2> b) {
  DistanceMatrix d(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      d(i, j) = std::hypot(a[i].x - b[j].x, a[i].y - b[j].y);
    }
  }
  return d;
}

std::vector<Assignment> greedy_assign(const DistanceMatrix& d, double gate) {
  std::vector<Assignment> candidates;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (d(i, j) <= gate) candidates.push_back({i, j, d(i, j)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Assignment& a, const Assignment& b) {
    return std::tie(a.distance, a.col, a.row) < std::tie(b.distance, b.col, b.row);
  });

  std::vector<bool> row_used(d.rows(), false);
  std::vector<bool> col_used(d.cols(), false);
  std::vector<Assignment> out;
  for (const auto& c : candidates) {
    if (row_used[c.row] || col_used[c.col]) continue;
    row_used[c.row] = true;
    col_used[c.col] = true;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) { return a.row < b.row; });
  return out;
}

TrackAssociator::TrackAssociator(TrackerOptions options) : options_(std::move(options)) {
  if (!(options_.max_displacement_px > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "max_displacement_px must be positive");
  }
  if (options_.grace_frames < 0) throw Error(ErrorCode::kInvalidConfig, "grace_frames must be >= 0");
}

void TrackAssociator::update(const FrameObservation& obs) {
  if (last_frame_ && obs.frame <= *last_frame_) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("frame {} arrived after frame {}", obs.frame, *last_frame_));
  }
  last_frame_ = obs.frame;

  // Close tracks whose dormancy exceeded the grace period.
  auto expired = std::stable_partition(live_.begin(), live_.end(), [&](const LiveTrack& t) {
    return obs.frame - t.last_frame <= options_.grace_frames;
  });
  for (auto it = expired; it != live_.end(); ++it) closed_.push_back(std::move(it->track));
  live_.erase(expired, live_.end());

  std::vector<Point2> det_anchors;
  std::vector<std::size_t> det_index;
  for (std::size_t i = 0; i < obs.detections.size(); ++i) {
    if (auto a = anchor_point(obs.detections[i], options_.map)) {
      det_anchors.push_back(*a);
      det_index.push_back(i);
    } else {
      ++skipped_;
    }
  }
  std::vector<Point2> track_anchors;
  track_anchors.reserve(live_.size());
  for (const auto& t : live_) track_anchors.push_back(t.last_anchor);

  const auto matches = greedy_assign(build_distance_matrix(det_anchors, track_anchors), options_.max_displacement_px);

  std::vector<bool> det_matched(det_anchors.size(), false);
  for (const auto& m : matches) {
    auto& t = live_[m.col];
    t.track.skeletons.push_back(obs.detections[det_index[m.row]]);
    t.last_anchor = det_anchors[m.row];
    t.last_frame = obs.frame;
    det_matched[m.row] = true;
  }
  for (std::size_t r = 0; r < det_anchors.size(); ++r) {
    if (det_matched[r]) continue;
    LiveTrack t;
    t.track.track_id = next_id_++;
    t.track.skeletons.push_back(obs.detections[det_index[r]]);
    t.last_anchor = det_anchors[r];
    t.last_frame = obs.frame;
    live_.push_back(std::move(t));
  }
  // live_ stays sorted by id: new ids are always larger.
}

std::vector<PersonTrack> TrackAssociator::tracks() const {
  std::vector<PersonTrack> out = closed_;
  for (const auto& t : live_) out.push_back(t.track);
  std::sort(out.begin(), out.end(), [](const PersonTrack& a, const PersonTrack& b) { return a.track_id < b.track_id; });
  return out;
}

std::vector<PersonTrack> associate_tracks(std::vector<PersonTrack> prev_tracks, const FrameObservation& obs,
                                          double max_displacement_px, const KeypointMap& map) {
  if (!(max_displacement_px > 0.0)) throw Error(ErrorCode::kInvalidConfig, "max_displacement_px must be positive");
  std::sort(prev_tracks.begin(), prev_tracks.end(),
            [](const PersonTrack& a, const PersonTrack& b) { return a.track_id < b.track_id; });

  TrackId next_id = prev_tracks.empty() ? 0 : prev_tracks.back().track_id + 1;
  // Column j of the matrix refers to prev_tracks[track_cols[j]].
  std::vector<Point2> track_anchors;
  std::vector<std::size_t> track_cols;
  for (std::size_t k = 0; k < prev_tracks.size(); ++k) {
    const auto& sk = prev_tracks[k].skeletons;
    for (auto it = sk.rbegin(); it != sk.rend(); ++it) {
      if (auto a = anchor_point(*it, map)) {
        track_anchors.push_back(*a);
        track_cols.push_back(k);
        break;
      }
    }
  }
  std::vector<Point2> det_anchors;
  std::vector<std::size_t> det_index;
  for (std::size_t i = 0; i < obs.detections.size(); ++i) {
    if (auto a = anchor_point(obs.detections[i], map)) {
      det_anchors.push_back(*a);
      det_index.push_back(i);
    }
  }
  const auto matches = greedy_assign(build_distance_matrix(det_anchors, track_anchors), max_displacement_px);
  std::vector<bool> det_matched(det_anchors.size(), false);
  for (const auto& m : matches) {
    auto& sk = prev_tracks[track_cols[m.col]].skeletons;
    if (sk.back().frame >= obs.frame) {
      throw Error(ErrorCode::kMalformedFile,
                  fmt::format("frame {} does not follow track frame {}", obs.frame, sk.back().frame));
    }
    sk.push_back(obs.detections[det_index[m.row]]);
    det_matched[m.row] = true;
  }
  for (std::size_t r = 0; r < det_anchors.size(); ++r) {
    if (det_matched[r]) continue;
    PersonTrack t;
    t.track_id = next_id++;
    t.skeletons.push_back(obs.detections[det_index[r]]);
    prev_tracks.push_back(std::move(t));
  }
  return prev_tracks;
}

std::vector<PersonTrack> associate_all(std::span<const FrameObservation> frames, const TrackerOptions& options) {
  TrackAssociator associator(options);
  for (const auto& obs : frames) associator.update(obs);
  return associator.tracks();
}

}  // namespace armwatch
