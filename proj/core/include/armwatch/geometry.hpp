#pragma once

#include <optional>

#include "armwatch/pose_model.hpp"

namespace armwatch {

struct Vector2 {
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(const Vector2&, const Vector2&) = default;
};

// Magnitudes below this are treated as a zero vector.
inline constexpr double kZeroVectorEpsilon = 1e-9;

Vector2 vector_between(Point2 from, Point2 to);
double dot(Vector2 p, Vector2 q);
double norm(Vector2 v);

// Angle between two vectors in degrees, [0, 180]. The cosine is clamped to
// [-1, 1] before arccos so parallel inputs never leave the domain.
// Throws Error(kZeroVector) if either vector is shorter than kZeroVectorEpsilon.
double angle_between(Vector2 p, Vector2 q);

// Same as angle_between but reports degenerate input as nullopt.
std::optional<double> try_angle_between(Vector2 p, Vector2 q);

// Interior angle at the elbow between forearm (elbow->wrist) and upper arm
// (elbow->shoulder). A straight arm is 180.
std::optional<double> elbow_angle(const Skeleton& s, Side side, const KeypointMap& map = {});

// Interior angle at the shoulder between the upper arm (shoulder->elbow) and
// the shoulder->neck direction. An arm hanging at the side is about 90, a
// horizontal sideways raise approaches 180.
std::optional<double> shoulder_neck_angle(const Skeleton& s, Side side, const KeypointMap& map = {});

}  // namespace armwatch
