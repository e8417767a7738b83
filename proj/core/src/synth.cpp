#include "armwatch/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <limits>
#include <tuple>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "armwatch/error.hpp"

namespace armwatch::synth {

namespace {

constexpr double kShoulderHalfWidth = 40.0;
constexpr double kUpperArm = 60.0;
constexpr double kForearm = 55.0;
constexpr double kRampFrames = 8.0;
constexpr double kSwayDeg = 2.0;
constexpr double kSwayPeriodS = 4.0;

struct Target {
  double elbow_deg;
  double shoulder_neck_deg;
};

Target action_target(ActionKind kind) {
  switch (kind) {
    case ActionKind::kExchangeObject: return {172.0, 122.0};
    case ActionKind::kShakeHands: return {165.0, 112.0};
    case ActionKind::kThrowObject: return {174.0, 150.0};
    case ActionKind::kRaiseSide: return {176.0, 165.0};
    // Bent-arm hold: must stay well below any extension threshold.
    case ActionKind::kUsePhone: return {68.0, 100.0};
    case ActionKind::kIdle: break;
  }
  return {0.0, 0.0};
}

// Slot offsets from the neck for everything the arm model does not move.
struct FixedPoint {
  std::size_t slot;
  double dx;
  double dy;
};
constexpr std::array<FixedPoint, 18> kFixedBody = {{
    {0, 0, -45},     // nose
    {8, 0, 140},     // mid hip
    {9, -25, 140},   {10, -30, 200}, {11, -30, 260},
    {12, 25, 140},   {13, 30, 200},  {14, 30, 260},
    {15, -10, -55},  {16, 10, -55},  {17, -22, -50}, {18, 22, -50},
    {19, 35, 275},   {20, 45, 272},  {21, 28, 268},
    {22, -35, 275},  {23, -45, 272}, {24, -28, 268},
}};

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

struct IdleArm {
  double elbow_deg;
  double shoulder_neck_deg;
  double sway_phase;
};

IdleArm idle_arm(const ScenarioScript& script, std::size_t seat, Side side) {
  std::seed_seq seq{static_cast<std::uint32_t>(script.seed), static_cast<std::uint32_t>(script.seed >> 32),
                    static_cast<std::uint32_t>(seat), static_cast<std::uint32_t>(side == Side::kLeft ? 1 : 2)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  IdleArm arm{};
  arm.elbow_deg = 100.0 + (u(rng) - 0.5) * 12.0;
  arm.shoulder_neck_deg = 95.0 + (u(rng) * 6.0 - 2.0);
  arm.sway_phase = u(rng) * 2.0 * std::numbers::pi;
  return arm;
}

Side actor_side(const ScenarioScript& script, const Action& a) {
  if (a.side) return *a.side;
  if (a.partner) {
    const double dx = script.seats[*a.partner].base.x - script.seats[a.actor].base.x;
    // Left arm sits at image +x for a person facing the camera.
    return dx > 0.0 ? Side::kLeft : Side::kRight;
  }
  return Side::kRight;
}

Side partner_side(const ScenarioScript& script, const Action& a) {
  const double dx = script.seats[*a.partner].base.x - script.seats[a.actor].base.x;
  if (dx == 0.0) return opposite(actor_side(script, a));
  return dx > 0.0 ? Side::kRight : Side::kLeft;
}

Point2 rotate(Point2 v, double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  const double c = std::cos(r);
  const double s = std::sin(r);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

void place_arm(Skeleton& s, const KeypointMap& map, Point2 neck, Side side, const ArmPose& pose) {
  const double sign = side == Side::kRight ? 1.0 : -1.0;
  const Point2 shoulder{neck.x - sign * kShoulderHalfWidth, neck.y};
  const double y = pose.shoulder_neck_deg * std::numbers::pi / 180.0;
  const Point2 upper{sign * std::cos(y), std::sin(y)};
  const Point2 elbow{shoulder.x + kUpperArm * upper.x, shoulder.y + kUpperArm * upper.y};
  const Point2 fore = rotate({-upper.x, -upper.y}, sign * pose.elbow_deg);
  const Point2 wrist{elbow.x + kForearm * fore.x, elbow.y + kForearm * fore.y};
  s[map.shoulder(side)] = Keypoint2D{shoulder.x, shoulder.y, 1.0};
  s[map.elbow(side)] = Keypoint2D{elbow.x, elbow.y, 1.0};
  s[map.wrist(side)] = Keypoint2D{wrist.x, wrist.y, 1.0};
}

[[noreturn]] void script_error(const YAML::Node& node, std::string_view field, std::string_view what) {
  const auto mark = node.Mark();
  if (mark.line >= 0) {
    throw Error(ErrorCode::kInvalidScript, fmt::format("line {}: field '{}': {}", mark.line + 1, field, what));
  }
  throw Error(ErrorCode::kInvalidScript, fmt::format("field '{}': {}", field, what));
}

template <typename T>
T read_as(const YAML::Node& node, std::string_view field) {
  if (!node.IsScalar()) script_error(node, field, "expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    script_error(node, field, fmt::format("cannot read '{}'", node.Scalar()));
  }
}

Point2 read_pair(const YAML::Node& node, std::string_view field) {
  if (!node.IsSequence() || node.size() != 2) script_error(node, field, "expected [x, y]");
  return {read_as<double>(node[0], field), read_as<double>(node[1], field)};
}

void reject_unknown(const YAML::Node& map, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      script_error(kv.first, key, fmt::format("unknown key in {}", where));
    }
  }
}

std::size_t resolve_seat(const ScenarioScript& script, const YAML::Node& node, std::string_view field) {
  const auto text = read_as<std::string>(node, field);
  for (std::size_t i = 0; i < script.seats.size(); ++i) {
    if (script.seats[i].label() == text) return i;
  }
  script_error(node, field, fmt::format("no seat labelled '{}'", text));
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kShakeHands: return "Shake_Hands";
    case ActionKind::kExchangeObject: return "Exchange_Object";
    case ActionKind::kUsePhone: return "Use_Phone";
    case ActionKind::kThrowObject: return "Throw_Object";
    case ActionKind::kIdle: return "Idle";
    case ActionKind::kRaiseSide: return "Raise_Side";
  }
  return "Unknown";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
  for (auto k : {ActionKind::kShakeHands, ActionKind::kExchangeObject, ActionKind::kUsePhone,
                 ActionKind::kThrowObject, ActionKind::kIdle, ActionKind::kRaiseSide}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

bool needs_partner(ActionKind kind) {
  return kind == ActionKind::kShakeHands || kind == ActionKind::kExchangeObject;
}

std::string Seat::label() const { return fmt::format("r{}c{}", row, col); }

void ScenarioScript::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidScript, what); };
  if (!(fps > 0.0) || !std::isfinite(fps)) fail("fps must be positive");
  if (duration_frames <= 0) fail("duration_frames must be positive");
  if (!(jitter_px >= 0.0) || !std::isfinite(jitter_px)) fail("jitter_px must be >= 0");
  if (!(dropout >= 0.0 && dropout <= 1.0)) fail("dropout must lie in [0, 1]");
  if (seats.empty()) fail("scenario has no seats");
  std::set<std::pair<int, int>> labels;
  for (const auto& s : seats) {
    if (!labels.emplace(s.row, s.col).second) fail("duplicate seat " + s.label());
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    const auto where = fmt::format("action {} ({})", i, to_string(a.kind));
    if (a.actor >= seats.size()) fail(where + ": actor seat out of range");
    if (a.start_frame < 0 || a.end_frame < a.start_frame || a.end_frame >= duration_frames) {
      fail(fmt::format("{}: frames {}..{} outside 0..{}", where, a.start_frame, a.end_frame, duration_frames - 1));
    }
    if (needs_partner(a.kind) && !a.partner) fail(where + ": partner required");
    if (a.partner && *a.partner >= seats.size()) fail(where + ": partner seat out of range");
    if (a.partner && *a.partner == a.actor) fail(where + ": partner must differ from actor");
  }
}

std::vector<Seat> grid_seats(int rows, int cols, Point2 origin, Point2 spacing) {
  std::vector<Seat> seats;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      seats.push_back({r, c, {origin.x + spacing.x * c, origin.y + spacing.y * r}});
    }
  }
  return seats;
}

ScenarioScript parse_script(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::kInvalidScript, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw Error(ErrorCode::kInvalidScript, "scenario must be a mapping");
  reject_unknown(root,
                 {"seed", "fps", "duration_frames", "jitter_px", "dropout", "keypoint_map", "grid", "seats", "actions"},
                 "scenario");

  auto require = [&](const char* key) {
    if (!root[key]) throw Error(ErrorCode::kInvalidScript, fmt::format("missing required field '{}'", key));
    return root[key];
  };

  ScenarioScript script;
  script.seed = read_as<std::uint64_t>(require("seed"), "seed");
  script.fps = read_as<double>(require("fps"), "fps");
  script.duration_frames = read_as<std::int64_t>(require("duration_frames"), "duration_frames");
  if (root["jitter_px"]) script.jitter_px = read_as<double>(root["jitter_px"], "jitter_px");
  if (root["dropout"]) script.dropout = read_as<double>(root["dropout"], "dropout");
  if (root["keypoint_map"]) {
    const auto node = root["keypoint_map"];
    try {
      script.map = KeypointMap::from_name(read_as<std::string>(node, "keypoint_map"));
    } catch (const Error& e) {
      script_error(node, "keypoint_map", e.detail());
    }
  }

  if (auto grid = root["grid"]) {
    if (!grid.IsMap()) script_error(grid, "grid", "expected a mapping");
    reject_unknown(grid, {"rows", "cols", "origin", "spacing"}, "grid");
    if (!grid["rows"] || !grid["cols"]) script_error(grid, "grid", "rows and cols are required");
    const int rows = read_as<int>(grid["rows"], "grid.rows");
    const int cols = read_as<int>(grid["cols"], "grid.cols");
    if (rows <= 0 || cols <= 0) script_error(grid, "grid", "rows and cols must be positive");
    Point2 origin{180.0, 160.0};
    Point2 spacing{220.0, 200.0};
    if (grid["origin"]) origin = read_pair(grid["origin"], "grid.origin");
    if (grid["spacing"]) spacing = read_pair(grid["spacing"], "grid.spacing");
    script.seats = grid_seats(rows, cols, origin, spacing);
  }
  if (auto seats = root["seats"]) {
    if (!seats.IsSequence()) script_error(seats, "seats", "expected a list");
    for (const auto& node : seats) {
      if (!node.IsMap()) script_error(node, "seats", "each seat must be a mapping");
      reject_unknown(node, {"row", "col", "x", "y"}, "seat");
      for (const char* key : {"row", "col", "x", "y"}) {
        if (!node[key]) script_error(node, key, "missing in seat");
      }
      script.seats.push_back({read_as<int>(node["row"], "row"), read_as<int>(node["col"], "col"),
                              {read_as<double>(node["x"], "x"), read_as<double>(node["y"], "y")}});
    }
  }

  if (auto actions = root["actions"]) {
    if (!actions.IsSequence()) script_error(actions, "actions", "expected a list");
    for (const auto& node : actions) {
      if (!node.IsMap()) script_error(node, "actions", "each action must be a mapping");
      reject_unknown(node, {"kind", "actor", "partner", "start", "end", "side"}, "action");
      for (const char* key : {"kind", "actor", "start", "end"}) {
        if (!node[key]) script_error(node, key, "missing in action");
      }
      Action a;
      const auto kind_text = read_as<std::string>(node["kind"], "kind");
      const auto kind = parse_action_kind(kind_text);
      if (!kind) script_error(node["kind"], "kind", fmt::format("unknown action '{}'", kind_text));
      a.kind = *kind;
      a.actor = resolve_seat(script, node["actor"], "actor");
      a.start_frame = read_as<std::int64_t>(node["start"], "start");
      a.end_frame = read_as<std::int64_t>(node["end"], "end");
      if (node["partner"]) a.partner = resolve_seat(script, node["partner"], "partner");
      if (node["side"]) {
        const auto side_text = read_as<std::string>(node["side"], "side");
        a.side = parse_side(side_text);
        if (!a.side) script_error(node["side"], "side", fmt::format("unknown side '{}'", side_text));
      }
      if (needs_partner(a.kind) && !a.partner) {
        script_error(node, "partner", fmt::format("required for {}", kind_text));
      }
      if (a.start_frame < 0 || a.end_frame < a.start_frame || a.end_frame >= script.duration_frames) {
        script_error(node, "start/end",
                     fmt::format("frames {}..{} outside 0..{}", a.start_frame, a.end_frame, script.duration_frames - 1));
      }
      script.actions.push_back(a);
    }
  }
  script.validate();
  return script;
}

ArmPose kinematic_pose(const ScenarioScript& script, std::size_t seat, Side side, std::int64_t frame) {
  const IdleArm idle = idle_arm(script, seat, side);
  const double t_s = static_cast<double>(frame) / script.fps;
  const double sway = kSwayDeg * std::sin(2.0 * std::numbers::pi * t_s / kSwayPeriodS + idle.sway_phase);
  ArmPose pose{idle.elbow_deg + sway, idle.shoulder_neck_deg};

  // Later actions override earlier ones on the same arm.
  for (const auto& a : script.actions) {
    if (a.kind == ActionKind::kIdle || frame < a.start_frame || frame > a.end_frame) continue;
    const bool as_actor = a.actor == seat && actor_side(script, a) == side;
    const bool as_partner =
        needs_partner(a.kind) && a.partner && *a.partner == seat && partner_side(script, a) == side;
    if (!as_actor && !as_partner) continue;
    const double length = static_cast<double>(a.end_frame - a.start_frame + 1);
    const double ramp = std::max(1.0, std::min(kRampFrames, length / 8.0));
    const double w = smoothstep(static_cast<double>(frame - a.start_frame) / ramp) *
                     smoothstep(static_cast<double>(a.end_frame - frame) / ramp);
    const Target target = action_target(a.kind);
    pose.elbow_deg = idle.elbow_deg + sway + w * (target.elbow_deg - idle.elbow_deg - sway);
    pose.shoulder_neck_deg = idle.shoulder_neck_deg + w * (target.shoulder_neck_deg - idle.shoulder_neck_deg);
  }
  return pose;
}

SynthOutput generate(const ScenarioScript& script) {
  script.validate();
  SynthOutput out;
  out.frames.reserve(static_cast<std::size_t>(script.duration_frames));

  std::mt19937_64 rng(script.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> conf(0.80, 0.95);

  for (std::int64_t f = 0; f < script.duration_frames; ++f) {
    FrameObservation obs;
    obs.frame = f;
    obs.timestamp_ms = frame_timestamp_ms(f, script.fps);
    for (std::size_t seat = 0; seat < script.seats.size(); ++seat) {
      const Point2 neck = script.seats[seat].base;
      Skeleton s;
      s.frame = f;
      s.timestamp_ms = obs.timestamp_ms;
      s[script.map.neck()] = Keypoint2D{neck.x, neck.y, 1.0};
      for (const auto& p : kFixedBody) s[p.slot] = Keypoint2D{neck.x + p.dx, neck.y + p.dy, 1.0};
      for (Side side : kBothSides) place_arm(s, script.map, neck, side, kinematic_pose(script, seat, side, f));
      for (auto& kp : s.keypoints) {
        const double jx = jitter(rng) * script.jitter_px;
        const double jy = jitter(rng) * script.jitter_px;
        const double c = conf(rng);
        kp->x = round_to(kp->x + jx, 1e3);
        kp->y = round_to(kp->y + jy, 1e3);
        kp->confidence = round_to(c, 1e4);
      }
      obs.detections.push_back(std::move(s));
    }
    out.frames.push_back(std::move(obs));
  }
  if (script.dropout > 0.0) out.frames = degrade(out.frames, script.dropout, 0.0, script.seed ^ 0x9e3779b97f4a7c15ULL);

  for (const auto& a : script.actions) {
    const auto actor = static_cast<TrackId>(a.actor);
    if (a.kind == ActionKind::kIdle) {
      for (Side side : kBothSides) out.truth.intervals.push_back({actor, side, a.start_frame, a.end_frame, a.kind});
      continue;
    }
    out.truth.intervals.push_back({actor, actor_side(script, a), a.start_frame, a.end_frame, a.kind});
    if (needs_partner(a.kind)) {
      out.truth.intervals.push_back(
          {static_cast<TrackId>(*a.partner), partner_side(script, a), a.start_frame, a.end_frame, a.kind});
    }
  }
  std::stable_sort(out.truth.intervals.begin(), out.truth.intervals.end(), [](const auto& x, const auto& y) {
    return std::tie(x.track_id, x.start_frame, x.side) < std::tie(y.track_id, y.start_frame, y.side);
  });
  return out;
}

std::vector<FrameObservation> degrade(std::span<const FrameObservation> frames, double drop_rate, double conf_floor,
                                      std::uint64_t seed) {
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "drop_rate must lie in [0, 1]");
  if (!(conf_floor >= 0.0 && conf_floor <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "conf_floor must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drop(drop_rate);
  std::vector<FrameObservation> out(frames.begin(), frames.end());
  for (auto& obs : out) {
    for (auto& s : obs.detections) {
      for (auto& kp : s.keypoints) {
        // One draw per slot keeps the stream aligned regardless of presence.
        const bool dropped = drop(rng);
        if (!kp) continue;
        if (dropped) {
          kp.reset();
        } else if (conf_floor > 0.0) {
          kp->confidence = conf_floor + (1.0 - conf_floor) * kp->confidence;
        }
      }
    }
  }
  return out;
}

std::string format_ground_truth(const ScenarioScript& script, const GroundTruth& truth) {
  std::string out = "track_id,seat,side,start_frame,end_frame,action\n";
  for (const auto& g : truth.intervals) {
    out += fmt::format("{},{},{},{},{},{}\n", g.track_id, script.seats.at(static_cast<std::size_t>(g.track_id)).label(),
                       to_string(g.side), g.start_frame, g.end_frame, to_string(g.kind));
  }
  return out;
}

std::size_t nearest_seat(const ScenarioScript& script, Point2 p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < script.seats.size(); ++i) {
    const double d = std::hypot(script.seats[i].base.x - p.x, script.seats[i].base.y - p.y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace armwatch::synth
