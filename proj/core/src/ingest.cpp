#include "armwatch/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "armwatch/error.hpp"

namespace armwatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kTripleValues = kSlotCount * 3;

void require_fps(double fps) {
  if (!(fps > 0.0)) throw Error(ErrorCode::kInvalidConfig, fmt::format("fps must be positive, got {}", fps));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMalformedFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

FrameObservation parse_frame_file(std::string_view bytes, std::int64_t frame, double fps, double min_confidence) {
  require_fps(fps);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kMalformedFile, "top level is not an object");
  auto people_it = doc.find("people");
  if (people_it == doc.end() || !people_it->is_array()) {
    throw Error(ErrorCode::kMalformedFile, "missing \"people\" list");
  }

  FrameObservation obs;
  obs.frame = frame;
  obs.timestamp_ms = frame_timestamp_ms(frame, fps);
  obs.detections.reserve(people_it->size());

  std::size_t person_index = 0;
  for (const auto& person : *people_it) {
    if (!person.is_object()) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("person {} is not an object", person_index));
    }
    auto kp_it = person.find("pose_keypoints_2d");
    if (kp_it == person.end() || !kp_it->is_array()) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("person {} has no pose_keypoints_2d list", person_index));
    }
    const auto& values = *kp_it;
    if (values.size() != kTripleValues) {
      throw Error(ErrorCode::kBadTripleCount,
                  fmt::format("person {} has {} keypoint values, expected {}", person_index, values.size(),
                              kTripleValues));
    }
    KeypointSlots raw{};
    for (std::size_t slot = 0; slot < kSlotCount; ++slot) {
      double triple[3];
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& v = values[slot * 3 + k];
        if (!v.is_number()) {
          throw Error(ErrorCode::kMalformedFile,
                      fmt::format("person {} slot {} has a non-numeric value", person_index, slot));
        }
        triple[k] = v.get<double>();
      }
      raw[slot] = Keypoint2D{triple[0], triple[1], triple[2]};
    }
    obs.detections.push_back(validate_skeleton(raw, frame, obs.timestamp_ms, min_confidence));
    ++person_index;
  }
  return obs;
}

std::string serialize_frame(const FrameObservation& obs) {
  json people = json::array();
  for (const auto& s : obs.detections) {
    json values = json::array();
    for (const auto& kp : s.keypoints) {
      if (kp) {
        values.push_back(kp->x);
        values.push_back(kp->y);
        values.push_back(kp->confidence);
      } else {
        values.push_back(0.0);
        values.push_back(0.0);
        values.push_back(0.0);
      }
    }
    json person = json::object();
    person["person_id"] = json::array({-1});
    person["pose_keypoints_2d"] = std::move(values);
    people.push_back(std::move(person));
  }
  json doc = json::object();
  doc["version"] = 1.3;
  doc["people"] = std::move(people);
  return doc.dump() + "\n";
}

std::vector<FrameObservation> parse_table_file(std::string_view text, double fps, double min_confidence) {
  require_fps(fps);
  // frame -> person_index -> raw slots
  std::map<std::int64_t, std::map<std::int64_t, KeypointSlots>> frames;

  std::size_t line_no = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kTableHeader) {
        throw Error(ErrorCode::kMalformedFile,
                    fmt::format("line {}: expected header '{}'", line_no, kTableHeader));
      }
      saw_header = true;
      continue;
    }
    std::string_view fields[6];
    std::size_t count = 0;
    std::string_view rest = line;
    while (count < 6) {
      const auto comma = rest.find(',');
      fields[count++] = rest.substr(0, comma);
      if (comma == std::string_view::npos) {
        rest = {};
        break;
      }
      rest = rest.substr(comma + 1);
    }
    if (count != 6 || !rest.empty()) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("line {}: expected 6 columns", line_no));
    }
    std::int64_t frame = 0, person = 0, slot = 0;
    double x = 0, y = 0, c = 0;
    if (!parse_number(fields[0], frame) || !parse_number(fields[1], person) || !parse_number(fields[2], slot) ||
        !parse_number(fields[3], x) || !parse_number(fields[4], y) || !parse_number(fields[5], c)) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("line {}: non-numeric field", line_no));
    }
    if (frame < 0 || person < 0) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("line {}: negative frame or person index", line_no));
    }
    if (slot < 0 || slot >= static_cast<std::int64_t>(kSlotCount)) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("line {}: slot {} outside 0..24", line_no, slot));
    }
    auto& kp = frames[frame][person][static_cast<std::size_t>(slot)];
    if (kp) {
      throw Error(ErrorCode::kMalformedFile,
                  fmt::format("line {}: duplicate keypoint for frame {} person {} slot {}", line_no, frame, person,
                              slot));
    }
    kp = Keypoint2D{x, y, c};
  }
  if (!saw_header) throw Error(ErrorCode::kMalformedFile, "table has no header");

  std::vector<FrameObservation> out;
  out.reserve(frames.size());
  for (const auto& [frame, people] : frames) {
    FrameObservation obs;
    obs.frame = frame;
    obs.timestamp_ms = frame_timestamp_ms(frame, fps);
    for (const auto& [person, raw] : people) {
      obs.detections.push_back(validate_skeleton(raw, frame, obs.timestamp_ms, min_confidence));
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::string serialize_table(std::span<const FrameObservation> frames) {
  std::string out(kTableHeader);
  out += '\n';
  for (const auto& obs : frames) {
    for (std::size_t person = 0; person < obs.detections.size(); ++person) {
      const auto& s = obs.detections[person];
      for (std::size_t slot = 0; slot < kSlotCount; ++slot) {
        const auto& kp = s.keypoints[slot];
        if (!kp) continue;
        out += fmt::format("{},{},{},{},{},{}\n", obs.frame, person, slot, kp->x, kp->y, kp->confidence);
      }
    }
  }
  return out;
}

std::optional<std::int64_t> frame_number_from_filename(std::string_view filename) {
  const auto slash = filename.find_last_of("/\\");
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  const auto dot = filename.rfind('.');
  if (dot != std::string_view::npos && dot > 0) filename = filename.substr(0, dot);

  std::size_t end = filename.size();
  while (end > 0 && !(filename[end - 1] >= '0' && filename[end - 1] <= '9')) --end;
  if (end == 0) return std::nullopt;
  std::size_t begin = end;
  while (begin > 0 && filename[begin - 1] >= '0' && filename[begin - 1] <= '9') --begin;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(filename.data() + begin, filename.data() + end, value);
  if (ec != std::errc()) return std::nullopt;
  return value;
}

std::string frame_filename(std::string_view prefix, std::int64_t frame) {
  return fmt::format("{}_{:012d}_keypoints.json", prefix, frame);
}

std::vector<FrameObservation> load_frames(const fs::path& input, double fps, double min_confidence,
                                          unsigned threads) {
  require_fps(fps);
  std::error_code ec;
  if (fs::is_regular_file(input, ec)) {
    auto frames = parse_table_file(read_file(input), fps, min_confidence);
    if (frames.empty()) throw Error(ErrorCode::kNoInput, input.string() + " contains no keypoint rows");
    return frames;
  }
  if (!fs::is_directory(input, ec)) throw Error(ErrorCode::kNoInput, input.string() + " does not exist");

  std::vector<std::pair<std::int64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    auto number = frame_number_from_filename(entry.path().filename().string());
    if (!number) continue;
    files.emplace_back(*number, entry.path());
  }
  if (files.empty()) throw Error(ErrorCode::kNoInput, "no per-frame keypoint files in " + input.string());
  std::sort(files.begin(), files.end());
  for (std::size_t i = 1; i < files.size(); ++i) {
    if (files[i].first == files[i - 1].first) {
      throw Error(ErrorCode::kMalformedFile, fmt::format("{} and {} share frame number {}",
                                                         files[i - 1].second.filename().string(),
                                                         files[i].second.filename().string(), files[i].first));
    }
  }

  std::vector<FrameObservation> out(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        out[i] = parse_frame_file(read_file(files[i].second), files[i].first, fps, min_confidence);
      } catch (const Error& e) {
        errors[i] = std::make_exception_ptr(
            Error(e.code(), files[i].second.filename().string() + ": " + e.detail()));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, files.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

void write_frame_directory(const fs::path& dir, std::span<const FrameObservation> frames, std::string_view prefix) {
  fs::create_directories(dir);
  for (const auto& obs : frames) {
    std::ofstream out(dir / frame_filename(prefix, obs.frame), std::ios::binary);
    if (!out) throw Error(ErrorCode::kMalformedFile, "cannot write into " + dir.string());
    out << serialize_frame(obs);
  }
}

}  // namespace armwatch
