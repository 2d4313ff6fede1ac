#include "tanksim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace tanksim::geometry {

double length(Vec2 v) { return std::hypot(v.x, v.y); }

double distance(Vec2 a, Vec2 b) { return length(a - b); }

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

double normalize_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  double r = std::remainder(a, kTwoPi);  // [-pi, pi], ties to even
  if (r <= -kPi) {
    r = kPi;
  }
  return r;
}

double radar_sweep_back(double radar_heading, double heading, double bearing) {
  return normalize_angle(radar_heading - heading + bearing);
}

std::optional<double> arc_radius(double arc_length, double central_angle) {
  if (arc_length < 0.0) {
    throw std::invalid_argument("arc_radius: negative arc length");
  }
  const double a = std::fabs(central_angle);
  if (a <= kStraightEpsilon) {
    return std::nullopt;
  }
  return arc_length / a;
}

Vec2 predict_point(double radius, double angle) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("predict_point: radius must be positive");
  }
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

MotionPath fit_arc(const Pose& prev, const Pose& now, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("fit_arc: dt must be positive");
  }
  const double central = normalize_angle(now.heading - prev.heading);
  const Vec2 chord = now.position - prev.position;
  if (std::fabs(central) <= kStraightEpsilon) {
    return LinearPath{{chord.x / dt, chord.y / dt}};
  }
  // Chord of a circular arc: |chord| = 2 R sin(|central| / 2).
  const double radius = length(chord) / (2.0 * std::sin(std::fabs(central) / 2.0));
  const double rate = central / dt;
  // Center sits perpendicular to the current heading, on the turning side.
  const double side = rate > 0.0 ? 1.0 : -1.0;
  const Vec2 perp{-std::sin(now.heading) * side, std::cos(now.heading) * side};
  return ArcPath{radius, rate, now.position + radius * perp};
}

Pose advance_along(const MotionPath& path, const Pose& start, double ticks) {
  if (const auto* line = std::get_if<LinearPath>(&path)) {
    return {start.position + ticks * line->velocity, start.heading};
  }
  const auto& arc = std::get<ArcPath>(path);
  const Vec2 offset = start.position - arc.center;
  const double phase = std::atan2(offset.y, offset.x);
  const double r = length(offset);  // honour the actual start radius
  const double swept = arc.angular_rate * ticks;
  Vec2 pos = arc.center + r * unit(phase + swept);
  return {pos, start.heading + swept};
}

std::optional<Intercept> solve_intercept(Vec2 shooter, const Pose& target,
                                         double target_speed, const MotionPath& path,
                                         double bullet_speed) {
  if (!(bullet_speed > 0.0)) {
    throw std::invalid_argument("solve_intercept: bullet_speed must be positive");
  }
  if (target_speed < 0.0) {
    throw std::invalid_argument("solve_intercept: negative target_speed");
  }
  MotionPath effective = path;
  if (const auto* line = std::get_if<LinearPath>(&effective)) {
    if (length(line->velocity) == 0.0 && target_speed > 0.0) {
      effective = LinearPath{target_speed * unit(target.heading)};
    }
  }

  double t = distance(shooter, target.position) / bullet_speed;
  for (int i = 0; i < kInterceptMaxIterations; ++i) {
    const Pose at = advance_along(effective, target, t);
    const double d = distance(shooter, at.position);
    if (std::fabs(d - bullet_speed * t) < kInterceptTolerance) {
      const Vec2 to_impact = at.position - shooter;
      return Intercept{std::atan2(to_impact.y, to_impact.x), t};
    }
    t = d / bullet_speed;
    if (!std::isfinite(t) || t > 1e6) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace tanksim::geometry
