#pragma once

#include <optional>
#include <variant>

namespace tanksim::geometry {

// Angles are radians, counterclockwise positive, zero along +x.
// Bearings and per-tick turn requests handed to bots use the opposite sign
// (negative to the left); see bot_api.hpp.

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Central angles at or below this are treated as straight-line motion.
inline constexpr double kStraightEpsilon = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

double length(Vec2 v);
double distance(Vec2 a, Vec2 b);
Vec2 unit(double angle);

// Reduces an angle to (-pi, pi]. Throws std::invalid_argument on non-finite
// input. Idempotent.
double normalize_angle(double a);

// The turn the radar must make to sweep back onto a previously scanned
// target: normalize(radar_heading - heading + bearing). The result is in the
// bot-facing sign convention (positive turns clockwise), so feeding it
// straight into a radar turn request re-points the radar at the scan
// position. `bearing` is negative when the target is left of the heading.
double radar_sweep_back(double radar_heading, double heading, double bearing);

// R = arc / |central_angle|. Returns nullopt when |central_angle| is below
// kStraightEpsilon, signalling that the motion should be treated as straight.
std::optional<double> arc_radius(double arc_length, double central_angle);

// Point on a circle of the given radius in the circle-centered frame:
// (R cos a, R sin a). Throws std::invalid_argument when radius <= 0.
Vec2 predict_point(double radius, double angle);

// Constant-speed motion along a line.
struct LinearPath {
  Vec2 velocity;  // units/tick
};

// Constant-rate motion around a fixed center. Tangential speed is
// radius * |angular_rate|.
struct ArcPath {
  double radius = 0.0;        // > 0
  double angular_rate = 0.0;  // radians/tick, counterclockwise positive
  Vec2 center;
};

using MotionPath = std::variant<LinearPath, ArcPath>;

struct Pose {
  Vec2 position;
  double heading = 0.0;  // counterclockwise radians
};

// Recovers the motion hypothesis from two consecutive poses dt ticks apart.
// The central angle is the heading change; the radius is the chord-consistent
// value, so poses sampled from a true arc round-trip exactly. Heading changes
// below kStraightEpsilon yield a LinearPath. Throws std::invalid_argument when
// dt <= 0. Assumes the swept angle is below pi (scans are ticks apart, never
// half a revolution).
MotionPath fit_arc(const Pose& prev, const Pose& now, double dt);

// Pose after travelling `ticks` along the path starting from `start`. For an
// ArcPath the phase is taken from the start position relative to the center.
Pose advance_along(const MotionPath& path, const Pose& start, double ticks);

struct Intercept {
  double fire_angle = 0.0;  // absolute direction shooter -> impact, ccw radians
  double time_to_hit = 0.0;  // ticks
};

inline constexpr int kInterceptMaxIterations = 50;
inline constexpr double kInterceptTolerance = 1e-6;  // arena units

// Solves bullet_speed * t = dist(shooter, target(t)) by fixed-point
// iteration. Returns nullopt when the iteration does not converge within
// kInterceptMaxIterations (e.g. the target outruns the bullet); callers fall
// back to firing at the current position.
std::optional<Intercept> solve_intercept(Vec2 shooter, const Pose& target,
                                         double target_speed, const MotionPath& path,
                                         double bullet_speed);

}  // namespace tanksim::geometry
