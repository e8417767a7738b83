#include "armwatch/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "armwatch/error.hpp"

namespace armwatch {

void PipelineOptions::validate() const {
  if (!(fps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "fps must be positive");
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "min_confidence must lie in [0, 1]");
  }
  if (!(tracking.max_displacement_px > 0.0)) throw Error(ErrorCode::kInvalidConfig, "max_displacement_px must be positive");
  if (tracking.grace_frames < 0) throw Error(ErrorCode::kInvalidConfig, "grace_frames must be >= 0");
  if (max_gap_frames < 0) throw Error(ErrorCode::kInvalidConfig, "max_gap_frames must be >= 0");
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw Error(ErrorCode::kBadWindow, "smoothing_window must be odd and >= 1");
  }
  detector.validate();
}

namespace {

struct TrackWork {
  PersonTrack track;
  std::vector<AngleSeries> series;
  std::vector<SuspicionEpisode> episodes;
  TrackSummary summary;
};

void analyze_track(TrackWork& w, const PipelineOptions& opt) {
  w.track = interpolate_gaps(w.track, opt.max_gap_frames);
  w.summary.track_id = w.track.track_id;
  w.summary.frames = w.track.skeletons.size();
  if (!w.track.skeletons.empty()) {
    w.summary.first_frame = w.track.skeletons.front().frame;
    w.summary.last_frame = w.track.skeletons.back().frame;
  }
  for (Side side : kBothSides) {
    auto series = smooth_angles(extract_angle_series(w.track, side, opt.fps, opt.tracking.map), opt.smoothing_window);
    (side == Side::kLeft ? w.summary.left : w.summary.right) = person_stats(series);
    for (auto& e : detect_episodes(series, opt.detector)) w.episodes.push_back(e);
    if (opt.sd_outliers) {
      for (auto& e : sd_outliers(series, opt.detector)) w.episodes.push_back(e);
    }
    w.series.push_back(std::move(series));
  }
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

AnalysisResult analyze(std::span<const FrameObservation> frames, const PipelineOptions& options) {
  options.validate();
  AnalysisResult result;
  result.fps = options.fps;
  result.frame_count = frames.size();
  if (!frames.empty()) {
    result.first_frame = frames.front().frame;
    result.last_frame = frames.back().frame;
  }

  std::vector<TrackWork> work;
  for (auto& t : associate_all(frames, options.tracking)) work.push_back({std::move(t), {}, {}, {}});
  parallel_for(work.size(), options.threads, [&](std::size_t i) { analyze_track(work[i], options); });

  std::vector<SuspicionEpisode> per_track;
  for (auto& w : work) {
    per_track.insert(per_track.end(), w.episodes.begin(), w.episodes.end());
    result.tracks.push_back(std::move(w.track));
    for (auto& s : w.series) result.series.push_back(std::move(s));
    result.summaries.push_back(w.summary);
  }
  std::sort(per_track.begin(), per_track.end(), episode_order);

  auto pairs = exchange_candidates(per_track, result.tracks, options.fps, options.detector, options.tracking.map);
  result.episodes = std::move(per_track);
  result.episodes.insert(result.episodes.end(), pairs.begin(), pairs.end());
  std::sort(result.episodes.begin(), result.episodes.end(), episode_order);

  for (auto& summary : result.summaries) {
    summary.episode_count = static_cast<std::size_t>(
        std::count_if(result.episodes.begin(), result.episodes.end(), [&](const SuspicionEpisode& e) {
          return e.track_id == summary.track_id || e.partner_track_id == summary.track_id;
        }));
  }
  return result;
}

}  // namespace armwatch
