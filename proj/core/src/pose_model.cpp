#include "armwatch/pose_model.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "armwatch/error.hpp"

namespace armwatch {

std::string_view to_string(Side side) { return side == Side::kLeft ? "left" : "right"; }

std::optional<Side> parse_side(std::string_view text) {
  if (text == "left" || text == "Left" || text == "L") return Side::kLeft;
  if (text == "right" || text == "Right" || text == "R") return Side::kRight;
  return std::nullopt;
}

std::string_view to_string(EpisodeRule rule) {
  switch (rule) {
    case EpisodeRule::kExtendedArm: return "extended_arm";
    case EpisodeRule::kSdOutlier: return "sd_outlier";
    case EpisodeRule::kExchangeCandidate: return "exchange_candidate";
  }
  return "unknown";
}

KeypointMap::KeypointMap(Preset preset) : preset_(preset) {
  const std::array<std::size_t, 3> low = {2, 3, 4};
  const std::array<std::size_t, 3> high = {5, 6, 7};
  if (preset == Preset::kViewer) {
    left_ = low;
    right_ = high;
  } else {
    right_ = low;
    left_ = high;
  }
}

KeypointMap KeypointMap::from_name(std::string_view name) {
  if (name == "viewer") return KeypointMap(Preset::kViewer);
  if (name == "body25-standard") return KeypointMap(Preset::kBody25Standard);
  throw Error(ErrorCode::kInvalidConfig,
              "unknown keypoint map '" + std::string(name) + "' (expected viewer or body25-standard)");
}

std::string_view KeypointMap::name() const {
  return preset_ == Preset::kViewer ? "viewer" : "body25-standard";
}

std::array<std::size_t, 7> KeypointMap::analysis_slots() const {
  return {neck_, left_[0], left_[1], left_[2], right_[0], right_[1], right_[2]};
}

std::optional<Point2> Skeleton::position(std::size_t slot) const {
  const auto& kp = keypoints.at(slot);
  if (!kp) return std::nullopt;
  return kp->position();
}

std::size_t Skeleton::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(keypoints.begin(), keypoints.end(), [](const auto& kp) { return kp.has_value(); }));
}

const Skeleton* PersonTrack::find(std::int64_t frame) const {
  auto it = std::lower_bound(skeletons.begin(), skeletons.end(), frame,
                             [](const Skeleton& s, std::int64_t f) { return s.frame < f; });
  if (it == skeletons.end() || it->frame != frame) return nullptr;
  return &*it;
}

bool episode_order(const SuspicionEpisode& a, const SuspicionEpisode& b) {
  return std::tuple(a.track_id, a.start_frame, a.rule, a.side, a.end_frame, a.partner_track_id) <
         std::tuple(b.track_id, b.start_frame, b.rule, b.side, b.end_frame, b.partner_track_id);
}

bool passes_confidence(const MaybeKeypoint& kp, double min_confidence) {
  return kp.has_value() && kp->confidence > 0.0 && kp->confidence >= min_confidence;
}

Skeleton validate_skeleton(std::span<const MaybeKeypoint> raw, std::int64_t frame,
                           double timestamp_ms, double min_confidence) {
  if (raw.size() != kSlotCount) {
    throw Error(ErrorCode::kLengthMismatch,
                "skeleton has " + std::to_string(raw.size()) + " slots, expected 25");
  }
  if (timestamp_ms < 0.0 || frame < 0) {
    throw Error(ErrorCode::kNegativeTime, "frame " + std::to_string(frame) + " at " +
                                              std::to_string(timestamp_ms) + " ms");
  }
  Skeleton s;
  s.frame = frame;
  s.timestamp_ms = timestamp_ms;
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    const auto& kp = raw[i];
    if (!passes_confidence(kp, min_confidence)) continue;
    if (!std::isfinite(kp->x) || !std::isfinite(kp->y) || !std::isfinite(kp->confidence)) continue;
    Keypoint2D k = *kp;
    k.confidence = std::min(k.confidence, 1.0);
    s.keypoints[i] = k;
  }
  return s;
}

double frame_timestamp_ms(std::int64_t frame, double fps) {
  return static_cast<double>(frame) * 1000.0 / fps;
}

}  // namespace armwatch
