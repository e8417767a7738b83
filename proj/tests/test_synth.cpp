#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "armwatch/error.hpp"
#include "armwatch/geometry.hpp"
#include "armwatch/ingest.hpp"
#include "armwatch/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace armwatch;
using namespace armwatch::synth;

namespace {

ScenarioScript hall(std::int64_t frames, double jitter = 1.5, double dropout = 0.0) {
  ScenarioScript s;
  s.seed = 7;
  s.duration_frames = frames;
  s.jitter_px = jitter;
  s.dropout = dropout;
  s.seats = grid_seats(4, 4);
  return s;
}

// Elbow angle of `side` for seat `seat` in every frame (seat order = person order).
std::vector<std::optional<double>> elbows(const SynthOutput& out, std::size_t seat, Side side) {
  std::vector<std::optional<double>> v;
  for (const auto& f : out.frames) v.push_back(elbow_angle(f.detections.at(seat), side));
  return v;
}

std::string code_and_message(std::string_view yaml) {
  try {
    parse_script(yaml);
  } catch (const Error& e) {
    return std::string(to_string(e.code())) + " " + e.detail();
  }
  return "no error";
}

}  // namespace

TEST(Synth, IdleHallStaysBelowThreshold) {
  const auto out = generate(hall(100));
  ASSERT_EQ(out.frames.size(), 100u);
  for (std::size_t seat = 0; seat < 16; ++seat) {
    for (auto side : kBothSides) {
      for (const auto& e : elbows(out, seat, side)) {
        ASSERT_TRUE(e);
        EXPECT_LT(*e, 148.0);
      }
    }
  }
  EXPECT_TRUE(out.truth.intervals.empty());
}

TEST(Synth, ExchangeArmIsExtendedThroughTheAction) {
  auto script = hall(300);
  script.actions.push_back({5, ActionKind::kExchangeObject, 100, 200, 6, std::nullopt});
  const auto out = generate(script);
  // seat 6 sits to the actor's image +x, which is the actor's left arm
  const auto e = elbows(out, 5, Side::kLeft);
  int above = 0;
  for (int f = 120; f <= 180; ++f) above += *e[f] >= 148.0;
  EXPECT_GE(above, static_cast<int>(0.8 * 61));
  const auto p = elbows(out, 6, Side::kRight);
  above = 0;
  for (int f = 120; f <= 180; ++f) above += *p[f] >= 148.0;
  EXPECT_GE(above, static_cast<int>(0.8 * 61));

  ASSERT_EQ(out.truth.intervals.size(), 2u);
  EXPECT_EQ(out.truth.intervals[0], (GroundTruthInterval{5, Side::kLeft, 100, 200, ActionKind::kExchangeObject}));
  EXPECT_EQ(out.truth.intervals[1], (GroundTruthInterval{6, Side::kRight, 100, 200, ActionKind::kExchangeObject}));
}

TEST(Synth, DeterministicForAFixedSeed) {
  auto script = hall(120, 1.5, 0.05);
  script.actions.push_back({2, ActionKind::kThrowObject, 30, 60, std::nullopt, Side::kLeft});
  const auto a = generate(script), b = generate(script);
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.truth, b.truth);
  for (std::size_t i = 0; i < a.frames.size(); ++i) EXPECT_EQ(serialize_frame(a.frames[i]), serialize_frame(b.frames[i]));
  script.seed = 8;
  EXPECT_NE(generate(script).frames, a.frames);
}

TEST(Synth, OutputRoundTripsThroughTheFileFormats) {
  auto script = hall(40, 1.5, 0.1);
  const auto out = generate(script);
  for (const auto& f : out.frames) {
    EXPECT_EQ(parse_frame_file(serialize_frame(f), f.frame, script.fps), f);
  }
  EXPECT_EQ(parse_table_file(serialize_table(out.frames), script.fps), out.frames);
}

// The frames where the noise-free kinematics put the elbow above 148 must
// agree with each arm action's ground-truth interval.
TEST(Synth, GroundTruthAgreesWithKinematics) {
  auto script = hall(400);
  script.actions = {
      {0, ActionKind::kRaiseSide, 20, 80, std::nullopt, std::nullopt},
      {1, ActionKind::kThrowObject, 100, 130, std::nullopt, Side::kLeft},
      {5, ActionKind::kShakeHands, 150, 210, 9, std::nullopt},
      {10, ActionKind::kExchangeObject, 250, 390, 11, std::nullopt},
      {12, ActionKind::kUsePhone, 50, 300, std::nullopt, std::nullopt},
  };
  const auto out = generate(script);
  for (const auto& gt : out.truth.intervals) {
    std::optional<std::int64_t> lo, hi;
    for (std::int64_t f = 0; f < script.duration_frames; ++f) {
      if (kinematic_pose(script, static_cast<std::size_t>(gt.track_id), gt.side, f).elbow_deg >= 148.0) {
        if (!lo) lo = f;
        hi = f;
      }
    }
    if (gt.kind == ActionKind::kUsePhone) {
      EXPECT_FALSE(lo);
      continue;
    }
    ASSERT_TRUE(lo) << to_string(gt.kind);
    EXPECT_GE(oracle::iou(*lo, *hi, gt.start_frame, gt.end_frame), 0.8) << to_string(gt.kind);
  }
}

TEST(Synth, RightArmOfAFrontFacingPersonIsOnImageLeft) {
  auto script = hall(10, 0.0);
  const auto out = generate(script);
  const auto& s = out.frames[0].detections[0];
  const KeypointMap map;
  EXPECT_LT(s[map.shoulder(Side::kRight)]->x, s[map.neck()]->x);
  EXPECT_GT(s[map.shoulder(Side::kLeft)]->x, s[map.neck()]->x);
}

TEST(Degrade, RateZeroIsIdentity) {
  const auto out = generate(hall(20));
  EXPECT_EQ(degrade(out.frames, 0.0, 0.0, 1), out.frames);
}

TEST(Degrade, RateOneDropsEverything) {
  for (const auto& f : degrade(generate(hall(5)).frames, 1.0, 0.0, 1)) {
    for (const auto& s : f.detections) EXPECT_EQ(s.present_count(), 0u);
  }
}

TEST(Degrade, DropFractionMatchesRate) {
  // 16 people x 25 slots x 25 frames = 10000 keypoints
  const auto frames = generate(hall(25)).frames;
  const auto out = degrade(frames, 0.1, 0.0, 99);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (std::size_t p = 0; p < frames[i].detections.size(); ++p) {
      dropped += frames[i].detections[p].present_count() - out[i].detections[p].present_count();
    }
  }
  EXPECT_NEAR(static_cast<double>(dropped), 1000.0, 100.0);
}

TEST(Degrade, ConfidenceFloor) {
  const auto frames = generate(hall(3)).frames;
  const auto out = degrade(frames, 0.0, 0.5, 1);
  const auto& a = *frames[0].detections[0][1];
  const auto& b = *out[0].detections[0][1];
  EXPECT_EQ(b.x, a.x);
  EXPECT_DOUBLE_EQ(b.confidence, 0.5 + 0.5 * a.confidence);
}

TEST(ParseScript, DemoScenario) {
  const auto text = testutil::read_file(std::filesystem::path(ARMWATCH_SOURCE_DIR) / "tools/scenarios/demo.yaml");
  const auto s = parse_script(text);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.seats.size(), 16u);
  ASSERT_EQ(s.actions.size(), 3u);
  EXPECT_EQ(s.actions[0].actor, 5u);
  EXPECT_EQ(s.actions[0].partner, 6u);
  EXPECT_EQ(s.actions[1].side, Side::kRight);
  EXPECT_EQ(s.dropout, 0.05);
}

TEST(ParseScript, Errors) {
  const std::string head = "seed: 1\nfps: 25\nduration_frames: 100\ngrid: {rows: 2, cols: 2}\nactions:\n";
  const auto missing_partner = code_and_message(head + "  - {kind: Exchange_Object, actor: r0c0, start: 1, end: 5}\n");
  EXPECT_EQ(missing_partner.rfind("INVALID_SCRIPT line 6: field 'partner'", 0), 0u) << missing_partner;

  EXPECT_EQ(code_and_message(head + "  - {kind: Dance, actor: r0c0, start: 1, end: 5}\n").rfind("INVALID_SCRIPT line 6", 0), 0u);
  EXPECT_NE(code_and_message(head + "  - {kind: Idle, actor: r9c9, start: 1, end: 5}\n").find("actor"), std::string::npos);
  EXPECT_NE(code_and_message(head + "  - {kind: Idle, actor: r0c0, start: 50, end: 100}\n").find("start/end"),
            std::string::npos);
  EXPECT_NE(code_and_message(head + "  - {kind: Idle, actor: r0c0, start: 1, end: 5, colour: red}\n").find("colour"),
            std::string::npos);
  EXPECT_NE(code_and_message("seed: 1\nfps: 25\ngrid: {rows: 1, cols: 1}\n").find("duration_frames"), std::string::npos);
  EXPECT_EQ(code_and_message("seed: [1\n").rfind("INVALID_SCRIPT", 0), 0u);
  EXPECT_EQ(code_and_message("seed: 1\nfps: -5\nduration_frames: 10\ngrid: {rows: 1, cols: 1}\n").rfind("INVALID_SCRIPT", 0),
            0u);
}

TEST(ParseScript, ExplicitSeatsAndPartnerSide) {
  const auto s = parse_script(
      "seed: 2\nfps: 30\nduration_frames: 50\nkeypoint_map: body25-standard\n"
      "seats:\n  - {row: 0, col: 0, x: 100, y: 100}\n  - {row: 0, col: 1, x: 300, y: 100}\n"
      "actions:\n  - {kind: Shake_Hands, actor: r0c1, partner: r0c0, start: 5, end: 30}\n");
  EXPECT_EQ(s.map.name(), "body25-standard");
  const auto out = generate(s);
  // partner is at image -x of the actor, so the actor uses the right arm
  ASSERT_EQ(out.truth.intervals.size(), 2u);
  EXPECT_EQ(out.truth.intervals[0].side, Side::kLeft);
  EXPECT_EQ(out.truth.intervals[1].side, Side::kRight);
  EXPECT_EQ(out.truth.intervals[1].track_id, 1);
}

TEST(GroundTruthTable, Format) {
  auto script = hall(300);
  script.actions.push_back({5, ActionKind::kExchangeObject, 100, 200, 6, std::nullopt});
  const auto text = format_ground_truth(script, generate(script).truth);
  EXPECT_EQ(text,
            "track_id,seat,side,start_frame,end_frame,action\n"
            "5,r1c1,left,100,200,Exchange_Object\n"
            "6,r1c2,right,100,200,Exchange_Object\n");
}

TEST(NearestSeat, PicksClosestBase) {
  const auto script = hall(1);
  EXPECT_EQ(nearest_seat(script, {180, 160}), 0u);
  EXPECT_EQ(nearest_seat(script, {400 + 90, 360 - 10}), 5u);
  EXPECT_EQ(nearest_seat(script, {10000, 10000}), 15u);
}
