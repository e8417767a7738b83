#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace armwatch {

// Number of body slots in the 25-point layout.
inline constexpr std::size_t kSlotCount = 25;

// Keypoints below this detector confidence are treated as missing.
inline constexpr double kDefaultMinConfidence = 0.1;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// One detected body landmark in pixel coordinates.
struct Keypoint2D {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  Point2 position() const { return {x, y}; }

  friend bool operator==(const Keypoint2D&, const Keypoint2D&) = default;
};

// An absent entry means the landmark was not detected (or was gated out).
using MaybeKeypoint = std::optional<Keypoint2D>;
using KeypointSlots = std::array<MaybeKeypoint, kSlotCount>;

enum class Side { kLeft, kRight };

inline constexpr std::array<Side, 2> kBothSides = {Side::kLeft, Side::kRight};

std::string_view to_string(Side side);
std::optional<Side> parse_side(std::string_view text);
inline Side opposite(Side side) { return side == Side::kLeft ? Side::kRight : Side::kLeft; }

// Maps the seven analysis landmarks onto slots of the 25-point layout.
//
// Two presets exist because layouts in circulation disagree on which side owns
// slots 2-4: the "viewer" preset puts the left arm there (Neck=1, Left
// shoulder/elbow/wrist=2/3/4, Right=5/6/7), "body25-standard" puts the right
// arm there. Every other slot is passed through untouched.
class KeypointMap {
 public:
  enum class Preset { kViewer, kBody25Standard };

  KeypointMap() : KeypointMap(Preset::kViewer) {}
  explicit KeypointMap(Preset preset);

  static KeypointMap from_name(std::string_view name);  // throws kInvalidConfig

  Preset preset() const { return preset_; }
  std::string_view name() const;

  std::size_t neck() const { return neck_; }
  std::size_t shoulder(Side side) const { return arm(side)[0]; }
  std::size_t elbow(Side side) const { return arm(side)[1]; }
  std::size_t wrist(Side side) const { return arm(side)[2]; }

  // Neck, then left shoulder/elbow/wrist, then right shoulder/elbow/wrist.
  std::array<std::size_t, 7> analysis_slots() const;

  friend bool operator==(const KeypointMap& a, const KeypointMap& b) { return a.preset_ == b.preset_; }

 private:
  const std::array<std::size_t, 3>& arm(Side side) const {
    return side == Side::kLeft ? left_ : right_;
  }

  Preset preset_;
  std::size_t neck_ = 1;
  std::array<std::size_t, 3> left_{};
  std::array<std::size_t, 3> right_{};
};

// One person in one frame. Always exactly kSlotCount slots.
struct Skeleton {
  KeypointSlots keypoints{};
  std::int64_t frame = 0;
  double timestamp_ms = 0.0;

  const MaybeKeypoint& operator[](std::size_t slot) const { return keypoints.at(slot); }
  MaybeKeypoint& operator[](std::size_t slot) { return keypoints.at(slot); }

  std::optional<Point2> position(std::size_t slot) const;
  std::size_t present_count() const;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

using TrackId = std::int64_t;

// Identity-stable sequence of skeletons for one person; frames strictly increase.
struct PersonTrack {
  TrackId track_id = 0;
  std::vector<Skeleton> skeletons;
  std::optional<std::string> seat_hint;

  // Skeleton at `frame`, or nullptr when the track has no detection there.
  const Skeleton* find(std::int64_t frame) const;
};

// Per-frame arm geometry for one side of one track. Angles are in degrees,
// within [0, 180], and absent whenever a contributing keypoint is missing.
struct ArmAngleSample {
  std::int64_t frame = 0;
  double timestamp_ms = 0.0;
  Side side = Side::kRight;
  std::optional<double> elbow_angle_deg;
  std::optional<double> shoulder_neck_angle_deg;

  friend bool operator==(const ArmAngleSample&, const ArmAngleSample&) = default;
};

enum class EpisodeRule { kExtendedArm, kSdOutlier, kExchangeCandidate };

std::string_view to_string(EpisodeRule rule);

struct SuspicionEpisode {
  TrackId track_id = 0;
  Side side = Side::kRight;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  double peak_elbow_angle_deg = 0.0;
  double mean_elbow_angle_deg = 0.0;
  EpisodeRule rule = EpisodeRule::kExtendedArm;
  // Set only for exchange candidates.
  std::optional<TrackId> partner_track_id;
  std::optional<Side> partner_side;

  // Inclusive span: both end frames count as one full frame period.
  double duration_ms(double fps) const { return end_ms - start_ms + 1000.0 / fps; }

  friend bool operator==(const SuspicionEpisode&, const SuspicionEpisode&) = default;
};

// Canonical output order: track, start frame, rule, side.
bool episode_order(const SuspicionEpisode& a, const SuspicionEpisode& b);

// True when `kp` exists and passes the confidence gate. Zero confidence is
// always undetected.
bool passes_confidence(const MaybeKeypoint& kp, double min_confidence);

// Builds a skeleton from raw slots, dropping keypoints that fail the
// confidence gate or carry non-finite values.
// Throws kLengthMismatch unless raw has kSlotCount entries, kNegativeTime for
// a negative timestamp or frame.
Skeleton validate_skeleton(std::span<const MaybeKeypoint> raw, std::int64_t frame,
                           double timestamp_ms,
                           double min_confidence = kDefaultMinConfidence);

// Frame index to milliseconds from session start.
double frame_timestamp_ms(std::int64_t frame, double fps);

}  // namespace armwatch
