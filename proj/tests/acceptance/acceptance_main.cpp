// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "armwatch/detect.hpp"
#include "armwatch/geometry.hpp"
#include "armwatch/ingest.hpp"
#include "armwatch/pipeline.hpp"
#include "armwatch/series.hpp"
#include "armwatch/synth.hpp"
#include "armwatch/tracking.hpp"
#include "cli.hpp"
#include "exchange_oracle.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace armwatch;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Verdict geometry_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vector2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
    if (norm(p) < 1e-6 || norm(q) < 1e-6) {
      --i;
      continue;
    }
    const double err = std::abs(angle_between(p, q) - oracle::angle_deg(p.dx, p.dy, q.dx, q.dy));
    worst = std::max(worst, err);
  }
  const double elapsed = seconds_since(t0);
  v.require(worst <= 1e-9, fmt::format("max error {:.3e} deg", worst));
  v.require(angle_between({1, 0}, {1, 0}) == 0.0 && angle_between({3, 4}, {6, 8}) == 0.0, "0 deg not exact");
  v.require(angle_between({1, 0}, {0, 1}) == 90.0 && angle_between({2, 3}, {-3, 2}) == 90.0, "90 deg not exact");
  v.require(angle_between({1, 0}, {-1, 0}) == 180.0 && angle_between({2, 3}, {-4, -6}) == 180.0, "180 deg not exact");
  v.require(elapsed < 1.0, fmt::format("took {:.3f} s", elapsed));
  if (v.pass) v.detail = fmt::format("max error {:.2e} deg, {:.3f} s (includes oracle)", worst, elapsed);
  return v;
}

Verdict invariance() {
  Verdict v;
  std::mt19937_64 rng(20240602);
  std::uniform_real_distribution<double> u(-300.0, 300.0), ang(0.0, 2 * std::numbers::pi), sc(0.05, 20.0);
  const DetectorConfig cfg;
  double worst = 0.0;
  int decisions = 0;
  for (int i = 0; i < 1000; ++i) {
    Skeleton s;
    for (std::size_t slot : {1u, 2u, 3u, 4u, 5u, 6u, 7u}) s[slot] = Keypoint2D{u(rng), u(rng), 0.9};
    const double th = ang(rng), k = sc(rng), tx = u(rng), ty = u(rng);
    Skeleton moved = s, scaled = s;
    for (std::size_t slot : {1u, 2u, 3u, 4u, 5u, 6u, 7u}) {
      const auto& p = *s[slot];
      moved[slot] = Keypoint2D{k * (std::cos(th) * p.x - std::sin(th) * p.y) + tx,
                               k * (std::sin(th) * p.x + std::cos(th) * p.y) + ty, 0.9};
      scaled[slot] = Keypoint2D{k * p.x, k * p.y, 0.9};
    }
    for (auto side : kBothSides) {
      const auto e0 = elbow_angle(s, side), e1 = elbow_angle(moved, side);
      const auto s0 = shoulder_neck_angle(s, side), s1 = shoulder_neck_angle(moved, side);
      worst = std::max({worst, std::abs(*e0 - *e1), std::abs(*s0 - *s1)});
      const auto e2 = elbow_angle(scaled, side), s2 = shoulder_neck_angle(scaled, side);
      if (std::abs(*e0 - cfg.threshold_deg) > 1e-9 && std::abs(*s0 - cfg.shoulder_min_deg) > 1e-9) {
        v.require(extended_arm(e0, s0, cfg) == extended_arm(e2, s2, cfg), fmt::format("decision flipped, trial {}", i));
        ++decisions;
      }
    }
  }
  v.require(worst <= 1e-6, fmt::format("max deviation {:.3e} deg", worst));
  if (v.pass) v.detail = fmt::format("max deviation {:.2e} deg, {} scaled decisions unchanged", worst, decisions);
  return v;
}

Verdict episode_equivalence() {
  Verdict v;
  std::mt19937_64 rng(20240603);
  const auto t0 = Clock::now();
  std::size_t episodes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 10000);
    std::bernoulli_distribution on(0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0);
    AngleSeries s;
    s.fps = trial % 2 ? 25.0 : 30.0;
    std::vector<bool> flags(n);
    const auto first = static_cast<std::int64_t>(rng() % 5000);
    for (std::size_t i = 0; i < n; ++i) {
      flags[i] = on(rng);
      ArmAngleSample a;
      a.frame = first + static_cast<std::int64_t>(i);
      a.timestamp_ms = frame_timestamp_ms(a.frame, s.fps);
      a.elbow_angle_deg = flags[i] ? 180.0 : 90.0;
      a.shoulder_neck_angle_deg = 120.0;
      s.samples.push_back(a);
    }
    DetectorConfig cfg;
    cfg.merge_gap_frames = static_cast<int>(rng() % 4);
    cfg.min_duration_ms = static_cast<double>(rng() % 400);
    const auto got = detect_episodes(s, cfg);
    const auto want = oracle::scan_episodes(flags, first, cfg.merge_gap_frames, cfg.min_duration_ms, s.fps);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].start_frame == want[i].start && got[i].end_frame == want[i].end;
    }
    v.require(same, fmt::format("mismatch on series {}", trial));
    episodes += want.size();
  }
  const double elapsed = seconds_since(t0);
  v.require(elapsed < 10.0, fmt::format("took {:.2f} s", elapsed));
  if (v.pass) v.detail = fmt::format("1000 series, {} episodes, {:.2f} s", episodes, elapsed);
  return v;
}

Verdict rule_fidelity() {
  Verdict v;
  const DetectorConfig cfg;
  v.require(cfg.threshold_deg == 148.0 && cfg.shoulder_min_deg == 90.0, "defaults differ from T=148, y=90");
  struct Row {
    std::optional<double> x, y;
    bool expect;
  };
  const std::vector<Row> table{{150.0, 95.0, true},  {147.9, 95.0, false},        {150.0, 89.9, false},
                               {180.0, 180.0, true}, {std::nullopt, 120.0, false}, {148.0, 90.0, true}};
  for (const auto& r : table) {
    v.require(extended_arm(r.x, r.y, cfg) == r.expect,
              fmt::format("x={} y={}", r.x ? fmt::format("{}", *r.x) : "missing", r.y ? fmt::format("{}", *r.y) : "missing"));
  }
  if (v.pass) v.detail = fmt::format("{} rows", table.size());
  return v;
}

// The exchange scenario shared by criteria 5 and 6.
struct Scenario {
  synth::ScenarioScript script;
  synth::SynthOutput output;
  AnalysisResult result;
  PipelineOptions options;
  std::map<TrackId, std::size_t> seat_of;
  double seconds = 0.0;
};

Scenario run_scenario() {
  Scenario sc;
  auto& s = sc.script;
  s.seed = 2024;
  s.fps = 25.0;
  s.duration_frames = 300;
  s.jitter_px = 1.5;
  s.dropout = 0.05;
  s.seats = synth::grid_seats(4, 4);
  s.actions = {{5, synth::ActionKind::kExchangeObject, 100, 200, 6, std::nullopt},
               {8, synth::ActionKind::kUsePhone, 40, 220, std::nullopt, Side::kRight},
               {15, synth::ActionKind::kUsePhone, 150, 280, std::nullopt, std::nullopt}};
  const auto t0 = Clock::now();
  sc.output = synth::generate(s);
  sc.options.fps = s.fps;
  sc.result = analyze(sc.output.frames, sc.options);
  sc.seconds = seconds_since(t0);
  for (const auto& t : sc.result.tracks) {
    double x = 0, y = 0, n = 0;
    for (const auto& sk : t.skeletons) {
      if (auto a = anchor_point(sk)) {
        x += a->x;
        y += a->y;
        ++n;
      }
    }
    sc.seat_of[t.track_id] = synth::nearest_seat(s, {x / n, y / n});
  }
  return sc;
}

Verdict end_to_end(const Scenario& sc) {
  Verdict v;
  std::set<std::size_t> busy;
  for (const auto& a : sc.script.actions) {
    busy.insert(a.actor);
    if (a.partner) busy.insert(*a.partner);
  }
  const auto& actor_truth = sc.output.truth.intervals.at(0);  // seat 5 sorts first
  v.require(actor_truth.track_id == 5, "unexpected ground-truth order");

  double best_iou = 0.0;
  std::size_t idle_episodes = 0, phone_episodes = 0;
  for (const auto& e : sc.result.episodes) {
    const auto seat = sc.seat_of.at(e.track_id);
    if (!busy.count(seat)) ++idle_episodes;
    if ((seat == 8 || seat == 15) && e.rule == EpisodeRule::kExtendedArm) ++phone_episodes;
    if (seat == 5 && e.rule == EpisodeRule::kExtendedArm && e.side == actor_truth.side) {
      best_iou = std::max(best_iou, oracle::iou(e.start_frame, e.end_frame, actor_truth.start_frame, actor_truth.end_frame));
    }
  }
  v.require(sc.result.tracks.size() == 16, fmt::format("{} tracks, expected 16", sc.result.tracks.size()));
  v.require(best_iou >= 0.8, fmt::format("best actor IoU {:.3f}", best_iou));
  v.require(idle_episodes == 0, fmt::format("{} episodes on idle tracks", idle_episodes));
  v.require(phone_episodes == 0, fmt::format("{} extended-arm episodes on phone tracks", phone_episodes));
  v.require(sc.seconds < 30.0, fmt::format("took {:.2f} s", sc.seconds));
  if (v.pass) v.detail = fmt::format("actor IoU {:.3f}, idle 0, phone 0, {:.2f} s", best_iou, sc.seconds);
  return v;
}

Verdict exchange_pairing(const Scenario& sc) {
  Verdict v;
  std::vector<oracle::Pair> got;
  for (const auto& e : sc.result.episodes) {
    if (e.rule != EpisodeRule::kExchangeCandidate) continue;
    got.emplace_back(e.track_id, e.side, *e.partner_track_id, *e.partner_side, e.start_frame, e.end_frame);
  }
  const auto want = oracle::exchange_pairs(sc.result.episodes, sc.result.tracks, sc.result.fps, sc.options.detector);
  v.require(got.size() == 1, fmt::format("{} exchange candidates", got.size()));
  v.require(got == want, "differs from brute-force pairing");
  if (!got.empty()) {
    const std::set<std::size_t> seats{sc.seat_of.at(std::get<0>(got[0])), sc.seat_of.at(std::get<2>(got[0]))};
    v.require(seats == std::set<std::size_t>{5, 6}, "candidate does not pair actor and partner");
    if (v.pass) v.detail = fmt::format("tracks {}/{} frames {}..{}", std::get<0>(got[0]), std::get<2>(got[0]),
                                       std::get<4>(got[0]), std::get<5>(got[0]));
  }
  return v;
}

Verdict statistics() {
  Verdict v;
  auto series = [](std::vector<double> xs) {
    AngleSeries s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ArmAngleSample a;
      a.frame = static_cast<std::int64_t>(i);
      a.timestamp_ms = frame_timestamp_ms(a.frame, 25.0);
      a.elbow_angle_deg = xs[i];
      a.shoulder_neck_angle_deg = 120.0;
      s.samples.push_back(a);
    }
    return s;
  };
  std::vector<double> worked(9, 100.0);
  worked.push_back(160.0);
  const auto st = person_stats(series(worked));
  v.require(st.mean == 106.0 && st.sd == 18.0 && st.n == 10,
            fmt::format("mean {} sd {}", st.mean.value_or(NAN), st.sd.value_or(NAN)));
  for (double c : {0.0, 33.3, 120.0, 147.99, 179.5}) {
    const auto s = series(std::vector<double>(250, c));
    const auto cs = person_stats(s);
    v.require(cs.sd == 0.0, fmt::format("constant {} gives sd {}", c, cs.sd.value_or(NAN)));
    v.require(sd_outliers(s, {}).empty(), fmt::format("constant {} flagged", c));
  }
  if (v.pass) v.detail = "mean 106, sd 18; constant series sd 0, no flags";
  return v;
}

Verdict determinism() {
  Verdict v;
  testutil::TempDir a, b;
  const auto script = std::string(ARMWATCH_SOURCE_DIR) + "/tools/scenarios/demo.yaml";
  std::ostringstream sink, err;
  v.require(cli::run({"synth", "--script", script, "--output", a.path().string()}, sink, err) == cli::kExitOk, err.str());
  v.require(cli::run({"synth", "--script", script, "--output", b.path().string()}, sink, err) == cli::kExitOk, err.str());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    ++files;
    v.require(testutil::read_file(entry.path()) == testutil::read_file(b.path() / entry.path().filename()),
              "synth output differs: " + entry.path().filename().string());
  }
  std::ostringstream r1, r2, r3;
  const int c1 = cli::run({"analyze", "--input", a.path().string(), "--fps", "25"}, r1, err);
  const int c2 = cli::run({"analyze", "--input", a.path().string(), "--fps", "25"}, r2, err);
  const int c3 = cli::run({"analyze", "--input", b.path().string(), "--fps", "25", "--threads", "1"}, r3, err);
  v.require(c1 == c2 && c1 == c3 && c1 != cli::kExitError, "analyze exit codes differ or failed: " + err.str());
  v.require(r1.str() == r2.str() && r1.str() == r3.str(), "reports differ");
  if (v.pass) v.detail = fmt::format("{} synth files and {}-byte report identical", files, r1.str().size());
  return v;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 geometry oracle", geometry_oracle},
      {"2 invariance", invariance},
      {"3 episode oracle equivalence", episode_equivalence},
      {"4 rule fidelity", rule_fidelity},
  };
  Scenario sc;
  bool scenario_ok = true;
  std::string scenario_error;
  try {
    sc = run_scenario();
  } catch (const std::exception& e) {
    scenario_ok = false;
    scenario_error = e.what();
  }
  auto needs_scenario = [&](std::function<Verdict(const Scenario&)> fn) {
    return [&, fn] {
      if (!scenario_ok) return Verdict{false, "scenario failed: " + scenario_error};
      return fn(sc);
    };
  };
  criteria.emplace_back("5 end-to-end synthetic detection", needs_scenario(end_to_end));
  criteria.emplace_back("6 exchange pairing", needs_scenario(exchange_pairing));
  criteria.emplace_back("7 statistics", statistics);
  criteria.emplace_back("8 determinism", determinism);

  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
