#include "armwatch/geometry.hpp"

#include <cmath>
#include <numbers>

#include "armwatch/error.hpp"

namespace armwatch {

Vector2 vector_between(Point2 from, Point2 to) { return {to.x - from.x, to.y - from.y}; }

double dot(Vector2 p, Vector2 q) { return p.dx * q.dx + p.dy * q.dy; }

double norm(Vector2 v) { return std::hypot(v.dx, v.dy); }

std::optional<double> try_angle_between(Vector2 p, Vector2 q) {
  const double np = norm(p);
  const double nq = norm(q);
  if (!(np >= kZeroVectorEpsilon) || !(nq >= kZeroVectorEpsilon)) return std::nullopt;
  // Same angle as acos(dot / (|p| |q|)), without its loss of precision near 0 and 180.
  const double cross = p.dx * q.dy - p.dy * q.dx;
  return std::atan2(std::abs(cross), dot(p, q)) * 180.0 / std::numbers::pi;
}

double angle_between(Vector2 p, Vector2 q) {
  auto angle = try_angle_between(p, q);
  if (!angle) throw Error(ErrorCode::kZeroVector, "angle undefined for a zero-length vector");
  return *angle;
}

namespace {

// Angle at `vertex` between rays towards `a` and `b`.
std::optional<double> joint_angle(const Skeleton& s, std::size_t vertex, std::size_t a, std::size_t b) {
  const auto v = s.position(vertex);
  const auto pa = s.position(a);
  const auto pb = s.position(b);
  if (!v || !pa || !pb) return std::nullopt;
  return try_angle_between(vector_between(*v, *pa), vector_between(*v, *pb));
}

}  // namespace

std::optional<double> elbow_angle(const Skeleton& s, Side side, const KeypointMap& map) {
  return joint_angle(s, map.elbow(side), map.wrist(side), map.shoulder(side));
}

std::optional<double> shoulder_neck_angle(const Skeleton& s, Side side, const KeypointMap& map) {
  return joint_angle(s, map.shoulder(side), map.elbow(side), map.neck());
}

}  // namespace armwatch
