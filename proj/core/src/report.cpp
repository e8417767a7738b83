#include "armwatch/report.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace armwatch {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json stats_json(const PersonStats& s) {
  ordered_json j;
  j["samples"] = s.n;
  j["mean_elbow_deg"] = optional_number(s.mean);
  j["sd_elbow_deg"] = optional_number(s.sd);
  return j;
}

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

}  // namespace

std::string render_report(const AnalysisResult& result, const PipelineOptions& options) {
  ordered_json doc;
  doc["schema"] = kReportSchema;

  auto& session = doc["session"];
  session["fps"] = result.fps;
  session["frame_count"] = result.frame_count;
  session["first_frame"] = result.first_frame;
  session["last_frame"] = result.last_frame;
  session["track_count"] = result.tracks.size();
  session["keypoint_map"] = options.tracking.map.name();

  const auto& d = options.detector;
  auto& config = doc["config"];
  config["threshold_deg"] = d.threshold_deg;
  config["shoulder_min_deg"] = d.shoulder_min_deg;
  config["min_duration_ms"] = d.min_duration_ms;
  config["merge_gap_frames"] = d.merge_gap_frames;
  config["sd_k"] = d.sd_k;
  config["sd_outliers"] = options.sd_outliers;
  config["pair_max_wrist_px"] = d.pair_max_wrist_px;
  config["pair_min_overlap_ms"] = d.pair_min_overlap_ms;
  config["min_confidence"] = options.min_confidence;
  config["max_displacement_px"] = options.tracking.max_displacement_px;
  config["grace_frames"] = options.tracking.grace_frames;
  config["max_gap_frames"] = options.max_gap_frames;
  config["smoothing_window"] = options.smoothing_window;

  auto tracks = ordered_json::array();
  for (const auto& s : result.summaries) {
    ordered_json t;
    t["track_id"] = s.track_id;
    t["frames"] = s.frames;
    t["first_frame"] = s.first_frame;
    t["last_frame"] = s.last_frame;
    t["episode_count"] = s.episode_count;
    t["left"] = stats_json(s.left);
    t["right"] = stats_json(s.right);
    tracks.push_back(std::move(t));
  }
  doc["tracks"] = std::move(tracks);

  auto episodes = ordered_json::array();
  for (const auto& e : result.episodes) {
    ordered_json j;
    j["track_id"] = e.track_id;
    j["side"] = to_string(e.side);
    j["rule"] = to_string(e.rule);
    j["start_frame"] = e.start_frame;
    j["end_frame"] = e.end_frame;
    j["start_ms"] = e.start_ms;
    j["end_ms"] = e.end_ms;
    j["duration_ms"] = e.duration_ms(result.fps);
    j["peak_elbow_angle_deg"] = e.peak_elbow_angle_deg;
    j["mean_elbow_angle_deg"] = e.mean_elbow_angle_deg;
    j["partner_track_id"] = e.partner_track_id ? ordered_json(*e.partner_track_id) : ordered_json(nullptr);
    j["partner_side"] = e.partner_side ? ordered_json(to_string(*e.partner_side)) : ordered_json(nullptr);
    episodes.push_back(std::move(j));
  }
  doc["episodes"] = std::move(episodes);
  return doc.dump(2) + "\n";
}

std::string render_episode_table(const AnalysisResult& result) {
  std::string out =
      "track_id,side,rule,start_frame,end_frame,start_ms,end_ms,peak_elbow_angle_deg,mean_elbow_angle_deg,"
      "partner_track_id,partner_side\n";
  for (const auto& e : result.episodes) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", e.track_id, to_string(e.side), to_string(e.rule),
                       e.start_frame, e.end_frame, e.start_ms, e.end_ms, e.peak_elbow_angle_deg,
                       e.mean_elbow_angle_deg, e.partner_track_id ? fmt::format("{}", *e.partner_track_id) : "",
                       e.partner_side ? to_string(*e.partner_side) : "");
  }
  return out;
}

std::string render_scatter_table(const AnalysisResult& result, const ScatterFilter& filter, double threshold_deg) {
  std::string out = "track_id,side,frame,timestamp_ms,elbow_angle_deg,shoulder_neck_angle_deg,above_T\n";
  for (const auto& s : result.series) {
    if (!filter.tracks.empty() && !filter.tracks.contains(s.track_id)) continue;
    if (filter.side && *filter.side != s.side) continue;
    for (const auto& sample : s.samples) {
      if (!sample.elbow_angle_deg) continue;
      out += fmt::format("{},{},{},{},{},{},{}\n", s.track_id, to_string(s.side), sample.frame, sample.timestamp_ms,
                         *sample.elbow_angle_deg, cell(sample.shoulder_neck_angle_deg),
                         *sample.elbow_angle_deg >= threshold_deg ? "true" : "false");
    }
  }
  return out;
}

}  // namespace armwatch
