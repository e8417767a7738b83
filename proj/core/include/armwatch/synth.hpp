#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "armwatch/ingest.hpp"
#include "armwatch/pose_model.hpp"

namespace armwatch::synth {

enum class ActionKind { kShakeHands, kExchangeObject, kUsePhone, kThrowObject, kIdle, kRaiseSide };

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view text);

// Paired actions need a partner seat.
bool needs_partner(ActionKind kind);

struct Seat {
  int row = 0;
  int col = 0;
  Point2 base;  // neck position in pixels

  std::string label() const;  // "r<row>c<col>"
};

struct Action {
  std::size_t actor = 0;  // index into ScenarioScript::seats
  ActionKind kind = ActionKind::kIdle;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;  // inclusive
  std::optional<std::size_t> partner;
  // Arm used by the actor. Paired actions default to the arm facing the
  // partner, everything else to the right arm.
  std::optional<Side> side;
};

struct ScenarioScript {
  std::uint64_t seed = 1;
  double fps = 25.0;
  std::int64_t duration_frames = 0;
  double jitter_px = 1.5;
  // Per-keypoint dropout applied after generation (see degrade()).
  double dropout = 0.0;
  KeypointMap map{};
  std::vector<Seat> seats;
  std::vector<Action> actions;

  // Throws kInvalidScript on any constraint violation.
  void validate() const;
};

// Rows x cols seats on a regular grid, row-major.
std::vector<Seat> grid_seats(int rows, int cols, Point2 origin = {180.0, 160.0}, Point2 spacing = {220.0, 200.0});

// Parses the YAML scenario format:
//
//   seed: 7
//   fps: 25
//   duration_frames: 300
//   jitter_px: 1.5          # optional
//   dropout: 0.05           # optional
//   keypoint_map: viewer    # optional, or body25-standard
//   grid: {rows: 4, cols: 4, origin: [180, 160], spacing: [220, 200]}
//   seats:                  # alternative to grid, or additional seats
//     - {row: 4, col: 0, x: 180, y: 960}
//   actions:
//     - {kind: Exchange_Object, actor: r1c1, partner: r1c2, start: 100, end: 200}
//     - {kind: Use_Phone, actor: r2c0, start: 40, end: 160, side: right}
//
// Errors are kInvalidScript and name the line and field at fault.
ScenarioScript parse_script(std::string_view yaml_text);

struct GroundTruthInterval {
  TrackId track_id = 0;  // seat index
  Side side = Side::kRight;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  ActionKind kind = ActionKind::kIdle;

  friend bool operator==(const GroundTruthInterval&, const GroundTruthInterval&) = default;
};

struct GroundTruth {
  std::vector<GroundTruthInterval> intervals;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SynthOutput {
  std::vector<FrameObservation> frames;
  GroundTruth truth;
};

// Noise-free target angles for one arm of one seat at one frame: the
// elbow angle and the shoulder-neck angle the kinematic model poses.
struct ArmPose {
  double elbow_deg = 0.0;
  double shoulder_neck_deg = 0.0;
};
ArmPose kinematic_pose(const ScenarioScript& script, std::size_t seat, Side side, std::int64_t frame);

// Renders the scenario: one detection per seat per frame (in seat order),
// seated idle pose plus scripted arm animation, Gaussian jitter, then
// dropout. Coordinates are rounded to 1e-3 px and confidences to 1e-4 so
// the in-memory frames equal what the file formats carry. Deterministic for
// a given script.
SynthOutput generate(const ScenarioScript& script);

// Sets each present keypoint missing with probability drop_rate and maps the
// confidence c of the survivors to conf_floor + (1 - conf_floor) * c.
// drop_rate 0 with conf_floor 0 is the identity.
std::vector<FrameObservation> degrade(std::span<const FrameObservation> frames, double drop_rate, double conf_floor,
                                      std::uint64_t seed);

// CSV: track_id,seat,side,start_frame,end_frame,action.
std::string format_ground_truth(const ScenarioScript& script, const GroundTruth& truth);

// Index of the seat whose base is nearest to `p`.
std::size_t nearest_seat(const ScenarioScript& script, Point2 p);

}  // namespace armwatch::synth
