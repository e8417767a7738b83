#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "armwatch/pose_model.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("armwatch_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline armwatch::Keypoint2D kp(double x, double y, double c = 0.9) { return {x, y, c}; }

// Skeleton with only the given arm landmarks set (viewer map slots).
inline armwatch::Skeleton arm_skeleton(armwatch::Point2 neck, armwatch::Point2 shoulder, armwatch::Point2 elbow,
                                       armwatch::Point2 wrist, armwatch::Side side = armwatch::Side::kRight,
                                       std::int64_t frame = 0) {
  armwatch::KeypointMap map;
  armwatch::Skeleton s;
  s.frame = frame;
  s.timestamp_ms = static_cast<double>(frame) * 40.0;
  s[map.neck()] = kp(neck.x, neck.y);
  s[map.shoulder(side)] = kp(shoulder.x, shoulder.y);
  s[map.elbow(side)] = kp(elbow.x, elbow.y);
  s[map.wrist(side)] = kp(wrist.x, wrist.y);
  return s;
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace testutil
