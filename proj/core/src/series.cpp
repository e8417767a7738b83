#include "armwatch/series.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "armwatch/error.hpp"
#include "armwatch/geometry.hpp"

namespace armwatch {

PersonTrack interpolate_gaps(const PersonTrack& track, int max_gap_frames) {
  if (max_gap_frames < 0) throw Error(ErrorCode::kInvalidConfig, "max_gap_frames must be >= 0");
  PersonTrack out = track;
  auto& sk = out.skeletons;
  for (std::size_t slot = 0; slot < kSlotCount; ++slot) {
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < sk.size(); ++i) {
      if (!sk[i][slot]) continue;
      if (prev && i > *prev + 1) {
        const auto& a = *sk[*prev][slot];
        const auto& b = *sk[i][slot];
        const std::int64_t f0 = sk[*prev].frame;
        const std::int64_t f1 = sk[i].frame;
        if (f1 - f0 - 1 <= max_gap_frames) {
          const double span = static_cast<double>(f1 - f0);
          for (std::size_t k = *prev + 1; k < i; ++k) {
            const double t = static_cast<double>(sk[k].frame - f0) / span;
            sk[k][slot] = Keypoint2D{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t,
                                     std::min(a.confidence, b.confidence)};
          }
        }
      }
      prev = i;
    }
  }
  return out;
}

std::vector<std::optional<double>> moving_median(std::span<const std::optional<double>> values, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kBadWindow, fmt::format("window must be odd and >= 1, got {}", window));
  }
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  std::vector<std::optional<double>> out(values.size());
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!values[i]) continue;
    buf.clear();
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, i - half); k <= std::min(n - 1, i + half); ++k) {
      if (values[k]) buf.push_back(*values[k]);
    }
    std::sort(buf.begin(), buf.end());
    const std::size_t m = buf.size();
    out[i] = m % 2 == 1 ? buf[m / 2] : (buf[m / 2 - 1] + buf[m / 2]) / 2.0;
  }
  return out;
}

AngleSeries smooth_angles(const AngleSeries& series, int window) {
  std::vector<std::optional<double>> elbow;
  std::vector<std::optional<double>> shoulder;
  elbow.reserve(series.samples.size());
  shoulder.reserve(series.samples.size());
  for (const auto& s : series.samples) {
    elbow.push_back(s.elbow_angle_deg);
    shoulder.push_back(s.shoulder_neck_angle_deg);
  }
  const auto elbow_s = moving_median(elbow, window);
  const auto shoulder_s = moving_median(shoulder, window);
  AngleSeries out = series;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i].elbow_angle_deg = elbow_s[i];
    out.samples[i].shoulder_neck_angle_deg = shoulder_s[i];
  }
  return out;
}

AngleSeries extract_angle_series(const PersonTrack& track, Side side, double fps, const KeypointMap& map) {
  if (!(fps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "fps must be positive");
  AngleSeries series;
  series.track_id = track.track_id;
  series.side = side;
  series.fps = fps;
  series.samples.reserve(track.skeletons.size());
  for (const auto& s : track.skeletons) {
    series.samples.push_back(ArmAngleSample{
        .frame = s.frame,
        .timestamp_ms = s.timestamp_ms,
        .side = side,
        .elbow_angle_deg = elbow_angle(s, side, map),
        .shoulder_neck_angle_deg = shoulder_neck_angle(s, side, map),
    });
  }
  return series;
}

PersonStats person_stats(const AngleSeries& series) {
  std::vector<double> xs;
  for (const auto& s : series.samples) {
    if (s.elbow_angle_deg) xs.push_back(*s.elbow_angle_deg);
  }
  PersonStats stats;
  stats.n = xs.size();
  if (xs.empty()) return stats;
  // Shifting by the first value keeps a constant series exactly at sd 0.
  const double origin = xs.front();
  double shifted_sum = 0.0;
  for (double x : xs) shifted_sum += x - origin;
  const double n = static_cast<double>(xs.size());
  const double mean = origin + shifted_sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  stats.mean = mean;
  stats.sd = std::sqrt(ss / n);
  return stats;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

}  // namespace

std::string format_angle_table(std::span<const AngleSeries> series) {
  std::string out = "track_id,side,frame,timestamp_ms,elbow_angle_deg,shoulder_neck_angle_deg\n";
  for (const auto& s : series) {
    for (const auto& sample : s.samples) {
      out += fmt::format("{},{},{},{},{},{}\n", s.track_id, to_string(s.side), sample.frame, sample.timestamp_ms,
                         cell(sample.elbow_angle_deg), cell(sample.shoulder_neck_angle_deg));
    }
  }
  return out;
}

}  // namespace armwatch
