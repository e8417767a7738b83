#include "armwatch/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "armwatch/error.hpp"

namespace armwatch {

void DetectorConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(threshold_deg > 0.0 && threshold_deg <= 180.0)) fail(fmt::format("threshold {} outside (0, 180]", threshold_deg));
  if (!(shoulder_min_deg >= 0.0 && shoulder_min_deg <= 180.0)) {
    fail(fmt::format("shoulder minimum {} outside [0, 180]", shoulder_min_deg));
  }
  if (!(min_duration_ms >= 0.0)) fail("min_duration_ms must be >= 0");
  if (merge_gap_frames < 0) fail("merge_gap_frames must be >= 0");
  if (!(sd_k >= 0.0)) fail("sd_k must be >= 0");
  if (!(pair_max_wrist_px >= 0.0)) fail("pair_max_wrist_px must be >= 0");
  if (!(pair_min_overlap_ms >= 0.0)) fail("pair_min_overlap_ms must be >= 0");
}

bool extended_arm(std::optional<double> elbow_deg, std::optional<double> shoulder_neck_deg,
                  const DetectorConfig& cfg) {
  if (!elbow_deg || !shoulder_neck_deg) return false;
  return *elbow_deg >= cfg.threshold_deg && *shoulder_neck_deg >= cfg.shoulder_min_deg;
}

namespace {

// Half-open range of sample indices.
struct Run {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Runs of flagged samples with consecutive frame numbers, then merged across
// gaps of at most `merge_gap` frames.
std::vector<Run> flagged_runs(const AngleSeries& series, const std::vector<bool>& flags, int merge_gap) {
  const auto& s = series.samples;
  std::vector<Run> runs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!flags[i]) continue;
    if (!runs.empty() && runs.back().end == i && s[i - 1].frame + 1 == s[i].frame) {
      runs.back().end = i + 1;
    } else {
      runs.push_back({i, i + 1});
    }
  }
  std::vector<Run> merged;
  for (const auto& r : runs) {
    if (!merged.empty()) {
      const std::int64_t gap = s[r.begin].frame - s[merged.back().end - 1].frame - 1;
      if (gap <= merge_gap) {
        merged.back().end = r.end;
        continue;
      }
    }
    merged.push_back(r);
  }
  return merged;
}

SuspicionEpisode make_episode(const AngleSeries& series, const Run& r, EpisodeRule rule) {
  const auto& s = series.samples;
  SuspicionEpisode ep;
  ep.track_id = series.track_id;
  ep.side = series.side;
  ep.rule = rule;
  ep.start_frame = s[r.begin].frame;
  ep.end_frame = s[r.end - 1].frame;
  ep.start_ms = s[r.begin].timestamp_ms;
  ep.end_ms = s[r.end - 1].timestamp_ms;
  double peak = 0.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (!s[i].elbow_angle_deg) continue;
    peak = n == 0 ? *s[i].elbow_angle_deg : std::max(peak, *s[i].elbow_angle_deg);
    sum += *s[i].elbow_angle_deg;
    ++n;
  }
  ep.peak_elbow_angle_deg = peak;
  ep.mean_elbow_angle_deg = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return ep;
}

}  // namespace

std::vector<SuspicionEpisode> detect_episodes(const AngleSeries& series, const DetectorConfig& cfg) {
  if (!(series.fps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "series fps must be positive");
  std::vector<bool> flags(series.samples.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const auto& s = series.samples[i];
    flags[i] = extended_arm(s.elbow_angle_deg, s.shoulder_neck_angle_deg, cfg);
  }
  const double period = 1000.0 / series.fps;
  std::vector<SuspicionEpisode> out;
  for (const auto& r : flagged_runs(series, flags, cfg.merge_gap_frames)) {
    const auto& s = series.samples;
    const double duration = s[r.end - 1].timestamp_ms - s[r.begin].timestamp_ms + period;
    if (duration < cfg.min_duration_ms) continue;
    out.push_back(make_episode(series, r, EpisodeRule::kExtendedArm));
  }
  return out;
}

std::vector<SuspicionEpisode> sd_outliers(const AngleSeries& series, const DetectorConfig& cfg) {
  const PersonStats stats = person_stats(series);
  if (stats.n < kMinSdSamples || !stats.sd || *stats.sd == 0.0) return {};
  const double limit = *stats.mean + cfg.sd_k * *stats.sd;
  std::vector<bool> flags(series.samples.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const auto& a = series.samples[i].elbow_angle_deg;
    flags[i] = a && *a > limit;
  }
  std::vector<SuspicionEpisode> out;
  for (const auto& r : flagged_runs(series, flags, 0)) out.push_back(make_episode(series, r, EpisodeRule::kSdOutlier));
  return out;
}

std::vector<SuspicionEpisode> exchange_candidates(std::span<const SuspicionEpisode> episodes,
                                                  std::span<const PersonTrack> tracks, double fps,
                                                  const DetectorConfig& cfg, const KeypointMap& map) {
  if (!(fps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "fps must be positive");
  std::vector<SuspicionEpisode> eps;
  for (const auto& e : episodes) {
    if (e.rule == EpisodeRule::kExtendedArm) eps.push_back(e);
  }
  std::sort(eps.begin(), eps.end(), episode_order);

  std::map<TrackId, const PersonTrack*> by_id;
  for (const auto& t : tracks) by_id[t.track_id] = &t;

  const double period = 1000.0 / fps;
  std::vector<SuspicionEpisode> out;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    for (std::size_t j = i + 1; j < eps.size(); ++j) {
      const auto& a = eps[i];
      const auto& b = eps[j];
      if (a.track_id == b.track_id) continue;
      const std::int64_t first = std::max(a.start_frame, b.start_frame);
      const std::int64_t last = std::min(a.end_frame, b.end_frame);
      if (last < first) continue;
      const double start_ms = std::max(a.start_ms, b.start_ms);
      const double end_ms = std::min(a.end_ms, b.end_ms);
      if (end_ms - start_ms + period < cfg.pair_min_overlap_ms) continue;

      auto ta = by_id.find(a.track_id);
      auto tb = by_id.find(b.track_id);
      if (ta == by_id.end() || tb == by_id.end()) continue;

      bool close = false;
      for (const auto& sa : ta->second->skeletons) {
        if (sa.frame < first) continue;
        if (sa.frame > last) break;
        const Skeleton* sb = tb->second->find(sa.frame);
        if (sb == nullptr) continue;
        auto wa = sa.position(map.wrist(a.side));
        auto wb = sb->position(map.wrist(b.side));
        if (wa && wb && std::hypot(wa->x - wb->x, wa->y - wb->y) <= cfg.pair_max_wrist_px) {
          close = true;
          break;
        }
      }
      if (!close) continue;

      SuspicionEpisode c;
      c.rule = EpisodeRule::kExchangeCandidate;
      c.track_id = a.track_id;
      c.side = a.side;
      c.partner_track_id = b.track_id;
      c.partner_side = b.side;
      c.start_frame = first;
      c.end_frame = last;
      c.start_ms = start_ms;
      c.end_ms = end_ms;
      c.peak_elbow_angle_deg = std::max(a.peak_elbow_angle_deg, b.peak_elbow_angle_deg);
      c.mean_elbow_angle_deg = (a.mean_elbow_angle_deg + b.mean_elbow_angle_deg) / 2.0;
      out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), episode_order);
  return out;
}

}  // namespace armwatch
