#include "tanksim/bots.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "tanksim/gametree.hpp"
#include "tanksim/geometry.hpp"

namespace tanksim {

using engine::BattleConfig;
using engine::Command;
using engine::PhysicsConstants;
using geometry::normalize_angle;
using geometry::unit;
using geometry::Vec2;

namespace {

constexpr double kDeg = geometry::kPi / 180.0;

// Cruise speed at which an arc of the given radius is drivable: the body turn
// budget shrinks with speed, so v must satisfy v/r <= max_body_turn(v).
double arc_cruise_speed(const PhysicsConstants& phys, double radius) {
  const double k = kDeg;  // deg/tick -> rad/tick
  const double v =
      radius * k * phys.max_body_turn_base / (1.0 + radius * k * phys.velocity_penalty);
  return std::min(phys.max_velocity, v);
}

double clamp_body_turn(const PhysicsConstants& phys, double velocity, double want) {
  const double limit = phys.max_body_turn(velocity);
  return std::clamp(want, -limit, limit);
}

double clamp_gun_turn(const PhysicsConstants& phys, double want) {
  const double limit = phys.max_gun_turn_rad();
  return std::clamp(want, -limit, limit);
}

double clamp_radar_turn(const PhysicsConstants& phys, double want) {
  const double limit = phys.max_radar_turn_rad();
  return std::clamp(want, -limit, limit);
}

// Bearing of an absolute direction in the bot command convention
// (negative to the left).
double bearing_to(double heading, double absolute_dir) {
  return normalize_angle(heading - absolute_dir);
}

// Steers the body onto the absolute direction, full turn rate.
double steer_toward(const PhysicsConstants& phys, const engine::TankState& self,
                    double absolute_dir) {
  return clamp_body_turn(phys, self.velocity,
                         bearing_to(self.pose.heading, absolute_dir));
}

Vec2 arena_center(const BattleConfig& cfg) {
  return {cfg.arena_width / 2.0, cfg.arena_height / 2.0};
}

double wall_clearance(const BattleConfig& cfg, Vec2 p) {
  return std::min(std::min(p.x, cfg.arena_width - p.x),
                  std::min(p.y, cfg.arena_height - p.y));
}

// Remembered enemy sighting with everything needed for prediction.
struct Sighting {
  std::int64_t tick = 0;
  int target = -1;
  double bearing = 0.0;
  double distance = 0.0;
  Vec2 position;        // absolute, derived from the scan
  double heading = 0.0;
  double velocity = 0.0;
};

Sighting make_sighting(const Observation& obs, const ScanInfo& scan) {
  Sighting s;
  s.tick = obs.tick;
  s.target = scan.target;
  s.bearing = scan.bearing;
  s.distance = scan.distance;
  const double dir = obs.self.pose.heading - scan.bearing;
  s.position = obs.self.pose.position + scan.distance * unit(dir);
  s.heading = scan.heading;
  s.velocity = scan.velocity;
  return s;
}

// Picks the closest scan from this tick, if any.
const ScanInfo* closest_scan(const Observation& obs) {
  const ScanInfo* best = nullptr;
  for (const auto& s : obs.scans) {
    if (!best || s.distance < best->distance) {
      best = &s;
    }
  }
  return best;
}

}  // namespace

// ---- TestRobot --------------------------------------------------------------

struct TestRobot::Impl {
  BattleConfig config;
  GameCircle circle;
  std::optional<Sighting> last;
  std::optional<Sighting> prev;  // earlier sighting of the same target
  bool planned_once = false;
};

TestRobot::TestRobot() : impl_(std::make_unique<Impl>()) {}
TestRobot::~TestRobot() = default;

void TestRobot::on_round_start(const BattleConfig& config) {
  impl_ = std::make_unique<Impl>();
  impl_->config = config;
  impl_->circle.candidate_radii = gametree::path_radii();
}

const GameCircle& TestRobot::circle() const { return impl_->circle; }

double TestRobot::plan_radius(const std::function<double(double)>& payoff) {
  return gametree::choose_radius(gametree::path_radii(), payoff, 3,
                                 gametree::LayerKind::Min);
}

engine::Command TestRobot::decide(const Observation& obs) {
  Impl& m = *impl_;
  const PhysicsConstants& phys = m.config.physics;
  Command cmd;

  // Radar: re-sweep the tracked target, otherwise spin.
  if (const ScanInfo* scan = closest_scan(obs)) {
    if (m.last && m.last->target == scan->target && m.last->tick < obs.tick) {
      m.prev = m.last;
    }
    m.last = make_sighting(obs, *scan);
  }
  const std::int64_t stale = m.last ? obs.tick - m.last->tick : -1;
  if (m.last && stale <= 2) {
    double bearing = m.last->bearing;
    if (stale > 0) {  // re-derive the bearing from the remembered position
      bearing = bearing_to(obs.self.pose.heading,
                           std::atan2(m.last->position.y - obs.self.pose.position.y,
                                      m.last->position.x - obs.self.pose.position.x));
    }
    cmd.radar_turn = clamp_radar_turn(
        phys, geometry::radar_sweep_back(obs.self.radar_heading, obs.self.pose.heading,
                                         bearing));
  } else {
    cmd.radar_turn = phys.max_radar_turn_rad();
  }

  // Movement: replan the approach arc at ring boundaries, then hold the arc.
  if (!m.planned_once || obs.tick - m.circle.epoch_start >= kEpochTicks) {
    if (m.planned_once) {
      m.circle.index++;
    }
    m.circle.epoch_start = obs.tick;
    m.planned_once = true;
    if (m.last) {
      const Vec2 target_now = m.last->position;
      const Observation* obs_ptr = &obs;
      auto payoff = [this, target_now, obs_ptr, &phys](double radius) {
        // Predicted separation after driving one epoch along this arc,
        // rounded to 10-unit bands.
        const double v = arc_cruise_speed(phys, radius);
        double heading = obs_ptr->self.pose.heading;
        Vec2 pos = obs_ptr->self.pose.position;
        const double side =
            bearing_to(heading, std::atan2(target_now.y - pos.y, target_now.x - pos.x)) >=
                    0.0
                ? 1.0
                : -1.0;
        for (int t = 0; t < kEpochTicks; ++t) {
          heading = normalize_angle(heading - side * v / radius);
          pos = pos + v * unit(heading);
        }
        return std::round(geometry::distance(pos, target_now) / 10.0) * 10.0;
      };
      m.circle.chosen_radius = plan_radius(payoff);
    } else if (m.circle.chosen_radius == 0.0) {
      m.circle.chosen_radius = gametree::path_radii()[4];  // mid radius until contact
    }
  }

  const double radius = m.circle.chosen_radius;
  const double cruise = arc_cruise_speed(phys, radius);
  cmd.target_velocity = cruise;
  if (m.last) {
    const Vec2 to_target = m.last->position - obs.self.pose.position;
    const double target_dir = std::atan2(to_target.y, to_target.x);
    const double rel = bearing_to(obs.self.pose.heading, target_dir);
    const double side = rel >= 0.0 ? 1.0 : -1.0;
    const double spacing = geometry::length(to_target);
    if (spacing < 1.5 * radius && std::fabs(rel) < 60.0 * kDeg) {
      // Close enough: swing across rather than spiral into the target.
      cmd.body_turn = clamp_body_turn(
          phys, obs.self.velocity,
          side * std::min(std::fabs(obs.self.velocity) / radius,
                          phys.max_body_turn(obs.self.velocity)));
    } else {
      cmd.body_turn = clamp_body_turn(
          phys, obs.self.velocity,
          side * std::max(std::fabs(obs.self.velocity), 1.0) / radius);
    }
  }
  // Wall guard: when the arc would run off the field, bend back to center.
  const Vec2 ahead =
      obs.self.pose.position + 25.0 * unit(obs.self.pose.heading);
  if (wall_clearance(m.config, ahead) < 40.0) {
    const Vec2 c = arena_center(m.config);
    cmd.body_turn = steer_toward(phys, obs.self,
                                 std::atan2(c.y - obs.self.pose.position.y,
                                            c.x - obs.self.pose.position.x));
  }

  // Gun: fit the target's arc from the last two sightings and lead the shot.
  if (m.last && stale <= 12) {
    const double power = m.last->distance < 150.0 ? 3.0
                         : m.last->distance < 400.0 ? 2.0
                                                    : 1.0;
    const double bullet_speed = phys.bullet_speed(power);
    geometry::Pose target_pose{m.last->position, m.last->heading};
    geometry::MotionPath path = geometry::LinearPath{{0.0, 0.0}};
    if (m.prev && m.prev->target == m.last->target && m.prev->tick < m.last->tick &&
        m.last->tick - m.prev->tick <= 16) {
      path = geometry::fit_arc({m.prev->position, m.prev->heading}, target_pose,
                               static_cast<double>(m.last->tick - m.prev->tick));
    }
    // Roll the hypothesis forward to now before solving.
    geometry::Pose now_pose =
        geometry::advance_along(path, target_pose, static_cast<double>(stale));
    double fire_dir;
    const auto hit = geometry::solve_intercept(obs.self.pose.position, now_pose,
                                               std::fabs(m.last->velocity), path,
                                               bullet_speed);
    if (hit) {
      fire_dir = hit->fire_angle;
    } else {
      const Vec2 to = now_pose.position - obs.self.pose.position;
      fire_dir = std::atan2(to.y, to.x);
    }
    const double gun_error = bearing_to(obs.self.gun_heading, fire_dir);
    cmd.gun_turn = clamp_gun_turn(phys, gun_error);
    if (std::fabs(gun_error) <= 2.0 * kDeg && obs.self.gun_heat == 0.0 &&
        obs.self.energy > power + 0.1) {
      cmd.fire_power = power;
    }
  }
  return cmd;
}

// ---- sample opponents -------------------------------------------------------
//
// Crazy, Fire, SpinBot and Walls follow the classic sample behaviours. The
// My-Robot and V-Robot entries in the roster have no published sources, so the
// implementations below are documented approximations: simple seek-and-shoot
// drivers that aim at the last sighting without leading it.

namespace {

class BaselineBot : public Bot {
 public:
  void on_round_start(const BattleConfig& config) override {
    config_ = config;
    last_.reset();
    ticks_ = 0;
  }

  engine::Command decide(const Observation& obs) override {
    if (const ScanInfo* scan = closest_scan(obs)) {
      last_ = make_sighting(obs, *scan);
    }
    Command cmd;
    cmd.radar_turn = config_.physics.max_radar_turn_rad();
    act(obs, cmd);
    ++ticks_;
    return cmd;
  }

 protected:
  virtual void act(const Observation& obs, Command& cmd) = 0;

  bool fresh_scan(const Observation& obs, std::int64_t max_age) const {
    return last_ && obs.tick - last_->tick <= max_age;
  }

  // Aims at the last sighting; returns the residual gun error.
  double aim_gun(const Observation& obs, Command& cmd) {
    if (!last_) {
      return geometry::kPi;
    }
    const Vec2 to = last_->position - obs.self.pose.position;
    const double err = bearing_to(obs.self.gun_heading, std::atan2(to.y, to.x));
    cmd.gun_turn = clamp_gun_turn(config_.physics, err);
    return err;
  }

  void fire_if_ready(const Observation& obs, Command& cmd, double err, double align,
                     double power) {
    if (std::fabs(err) <= align && obs.self.gun_heat == 0.0 &&
        obs.self.energy > power + 0.1) {
      cmd.fire_power = power;
    }
  }

  bool near_wall(const Observation& obs, double margin) const {
    const Vec2 ahead = obs.self.pose.position + 30.0 * unit(obs.self.pose.heading);
    return wall_clearance(config_, ahead) < margin;
  }

  double toward_center(const Observation& obs) const {
    const Vec2 c = arena_center(config_);
    return std::atan2(c.y - obs.self.pose.position.y, c.x - obs.self.pose.position.x);
  }

  BattleConfig config_;
  std::optional<Sighting> last_;
  std::int64_t ticks_ = 0;
};

class CrazyBot : public BaselineBot {
 public:
  std::string_view name() const override { return "Crazy"; }

 private:
  void act(const Observation& obs, Command& cmd) override {
    const PhysicsConstants& phys = config_.physics;
    cmd.target_velocity = phys.max_velocity;
    // Wobble: reversing full-rate arcs, no relation to where the enemy is.
    const auto phase = ticks_ % 160;
    const double limit = phys.max_body_turn(obs.self.velocity);
    cmd.body_turn = phase < 40 ? limit : phase < 120 ? -limit : limit;
    if (near_wall(obs, 60.0)) {
      cmd.body_turn = steer_toward(phys, obs.self, toward_center(obs));
    }
    if (fresh_scan(obs, 0) && obs.self.gun_heat == 0.0 && obs.self.energy > 1.1) {
      cmd.fire_power = 1.0;  // fires blind, wherever the gun happens to point
    }
  }
};

class FireBot : public BaselineBot {
 public:
  std::string_view name() const override { return "Fire"; }

 private:
  void act(const Observation& obs, Command& cmd) override {
    cmd.target_velocity = 0.0;  // sits still
    if (fresh_scan(obs, 8)) {
      const double err = aim_gun(obs, cmd);
      const double power = last_->distance < 120.0 ? 3.0 : 1.0;
      fire_if_ready(obs, cmd, err, 4.0 * kDeg, power);
    }
  }
};

class SpinBot : public BaselineBot {
 public:
  std::string_view name() const override { return "SpinBot"; }

 private:
  void act(const Observation& obs, Command& cmd) override {
    const PhysicsConstants& phys = config_.physics;
    cmd.target_velocity = phys.max_velocity;
    cmd.body_turn = phys.max_body_turn(obs.self.velocity);  // constant tight circle
    if (fresh_scan(obs, 0) && obs.self.gun_heat == 0.0 && obs.self.energy > 3.1) {
      cmd.fire_power = 3.0;
    }
  }
};

class WallsBot : public BaselineBot {
 public:
  std::string_view name() const override { return "Walls"; }

  void on_round_start(const BattleConfig& config) override {
    BaselineBot::on_round_start(config);
    corner_ = -1;
  }

 private:
  static constexpr double kInset = 30.0;

  Vec2 corner_point(int corner) const {
    const double w = config_.arena_width, h = config_.arena_height;
    switch (corner & 3) {
      case 0: return {kInset, kInset};
      case 1: return {w - kInset, kInset};
      case 2: return {w - kInset, h - kInset};
      default: return {kInset, h - kInset};
    }
  }

  void act(const Observation& obs, Command& cmd) override {
    const PhysicsConstants& phys = config_.physics;
    const Vec2 pos = obs.self.pose.position;
    if (corner_ < 0) {
      // Head for the nearest corner first.
      double best = 1e18;
      for (int c = 0; c < 4; ++c) {
        const double d = geometry::distance(pos, corner_point(c));
        if (d < best) {
          best = d;
          corner_ = c;
        }
      }
    }
    if (geometry::distance(pos, corner_point(corner_)) < 25.0) {
      corner_ = (corner_ + 1) & 3;  // 90-degree turn onto the next wall
    }
    const Vec2 goal = corner_point(corner_);
    const double goal_dir = std::atan2(goal.y - pos.y, goal.x - pos.x);
    const double err = bearing_to(obs.self.pose.heading, goal_dir);
    cmd.body_turn = clamp_body_turn(phys, obs.self.velocity, err);
    cmd.target_velocity =
        std::fabs(err) > 30.0 * kDeg ? 2.0 : phys.max_velocity;
    if (fresh_scan(obs, 8)) {
      const double gun_err = aim_gun(obs, cmd);
      fire_if_ready(obs, cmd, gun_err, 3.0 * kDeg, 2.0);
    }
  }

  int corner_ = -1;
};

class MyRobotBot : public BaselineBot {
 public:
  std::string_view name() const override { return "My-Robot"; }

 private:
  void act(const Observation& obs, Command& cmd) override {
    const PhysicsConstants& phys = config_.physics;
    // Shuttles back and forth, shooting at whatever it sees.
    cmd.target_velocity = (ticks_ / 25) % 2 == 0 ? phys.max_velocity : -phys.max_velocity;
    if (near_wall(obs, 60.0)) {
      cmd.body_turn = steer_toward(phys, obs.self, toward_center(obs));
      cmd.target_velocity = phys.max_velocity;
    }
    if (fresh_scan(obs, 8)) {
      const double err = aim_gun(obs, cmd);
      fire_if_ready(obs, cmd, err, 5.0 * kDeg, 1.0);
    }
  }
};

class VRobotBot : public BaselineBot {
 public:
  std::string_view name() const override { return "V-Robot"; }

 private:
  void act(const Observation& obs, Command& cmd) override {
    const PhysicsConstants& phys = config_.physics;
    cmd.target_velocity = phys.max_velocity;
    if (last_) {
      // Zig-zag legs offset 45 degrees either side of the direct line.
      const Vec2 to = last_->position - obs.self.pose.position;
      const double direct = std::atan2(to.y, to.x);
      const double offset = ((ticks_ / 20) % 2 == 0 ? 1.0 : -1.0) * 45.0 * kDeg;
      cmd.body_turn = steer_toward(phys, obs.self, direct + offset);
    }
    if (near_wall(obs, 60.0)) {
      cmd.body_turn = steer_toward(phys, obs.self, toward_center(obs));
    }
    if (fresh_scan(obs, 8)) {
      const double err = aim_gun(obs, cmd);
      fire_if_ready(obs, cmd, err, 4.0 * kDeg, 2.0);
    }
  }
};

std::string canonical_name(std::string name) {
  std::string out;
  for (char ch : name) {
    if (ch != '-' && ch != '_') {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& bot_names() {
  static const std::vector<std::string> names{"TestRobot", "Crazy",   "Fire", "My-Robot",
                                              "V-Robot",   "SpinBot", "Walls"};
  return names;
}

std::unique_ptr<Bot> make_bot(const std::string& name) {
  const std::string key = canonical_name(name);
  if (key == "testrobot") return std::make_unique<TestRobot>();
  if (key == "crazy") return std::make_unique<CrazyBot>();
  if (key == "fire") return std::make_unique<FireBot>();
  if (key == "myrobot") return std::make_unique<MyRobotBot>();
  if (key == "vrobot") return std::make_unique<VRobotBot>();
  if (key == "spinbot") return std::make_unique<SpinBot>();
  if (key == "walls") return std::make_unique<WallsBot>();
  throw std::invalid_argument("unknown bot '" + name + "'");
}

}  // namespace tanksim
