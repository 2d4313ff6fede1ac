#include "tanksim/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tanksim::engine {

using geometry::normalize_angle;
using geometry::unit;
using geometry::Vec2;

namespace {

// Shortest round-trip decimal form; stable across runs of the same build,
// which is what the byte-identical log contract needs.
void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, ptr);
}

void append_field(std::string& out, double v) {
  out.push_back(' ');
  append_double(out, v);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Scan: return "scan";
    case EventKind::Fire: return "fire";
    case EventKind::BulletHit: return "bullet_hit";
    case EventKind::BulletMiss: return "bullet_miss";
    case EventKind::WallHit: return "wall_hit";
    case EventKind::RobotDeath: return "robot_death";
    case EventKind::RoundEnd: return "round_end";
    case EventKind::Fault: return "fault";
  }
  return "unknown";
}

std::string event_to_line(int round, const BattleEvent& e) {
  std::string line = std::to_string(round);
  line.push_back(' ');
  line += std::to_string(e.tick);
  line.push_back(' ');
  line += to_string(e.kind);
  switch (e.kind) {
    case EventKind::Scan:
      line += ' ' + std::to_string(e.actor) + ' ' + std::to_string(e.target);
      append_field(line, e.bearing);
      append_field(line, e.distance);
      append_field(line, e.heading);
      append_field(line, e.velocity);
      break;
    case EventKind::Fire:
      line += ' ' + std::to_string(e.actor) + ' ' + std::to_string(e.bullet_id);
      append_field(line, e.power);
      append_field(line, e.x);
      append_field(line, e.y);
      append_field(line, e.heading);
      break;
    case EventKind::BulletHit:
      line += ' ' + std::to_string(e.bullet_id) + ' ' + std::to_string(e.actor) + ' ' +
              std::to_string(e.target);
      append_field(line, e.damage);
      append_field(line, e.x);
      append_field(line, e.y);
      break;
    case EventKind::BulletMiss:
      line += ' ' + std::to_string(e.bullet_id) + ' ' + std::to_string(e.actor);
      append_field(line, e.x);
      append_field(line, e.y);
      break;
    case EventKind::WallHit:
      line += ' ' + std::to_string(e.actor);
      append_field(line, e.damage);
      append_field(line, e.x);
      append_field(line, e.y);
      break;
    case EventKind::RobotDeath:
      line += ' ' + std::to_string(e.actor) + ' ' + std::to_string(e.target);
      break;
    case EventKind::RoundEnd:
      for (int p : e.placements) {
        line += ' ' + std::to_string(p);
      }
      break;
    case EventKind::Fault:
      line += ' ' + std::to_string(e.actor);
      break;
  }
  return line;
}

int BattleState::alive_count() const {
  int n = 0;
  for (const auto& t : tanks) {
    n += t.alive ? 1 : 0;
  }
  return n;
}

double& BattleState::pair_damage(int from, int onto) {
  return damage_by_pair[static_cast<std::size_t>(from) * tanks.size() +
                        static_cast<std::size_t>(onto)];
}

// ---- config file ----------------------------------------------------------

std::map<std::string, std::string> parse_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

namespace {

double parse_number(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    return fallback;
  }
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' is not numeric: " + it->second);
  }
}

}  // namespace

BattleConfig config_from_map(const std::map<std::string, std::string>& kv) {
  BattleConfig c;
  c.arena_width = parse_number(kv, "arena_width", c.arena_width);
  c.arena_height = parse_number(kv, "arena_height", c.arena_height);
  c.rounds = static_cast<int>(parse_number(kv, "rounds", c.rounds));
  c.gun_cooling_rate = parse_number(kv, "gun_cooling_rate", c.gun_cooling_rate);
  c.inactivity_time =
      static_cast<std::int64_t>(parse_number(kv, "inactivity_time", double(c.inactivity_time)));
  c.initial_energy = parse_number(kv, "initial_energy", c.initial_energy);
  c.sentry_border_size = parse_number(kv, "sentry_border_size", c.sentry_border_size);
  c.seed = static_cast<std::uint64_t>(parse_number(kv, "seed", double(c.seed)));
  PhysicsConstants& p = c.physics;
  p.max_velocity = parse_number(kv, "physics.max_velocity", p.max_velocity);
  p.acceleration = parse_number(kv, "physics.acceleration", p.acceleration);
  p.deceleration = parse_number(kv, "physics.deceleration", p.deceleration);
  p.max_body_turn_base = parse_number(kv, "physics.max_body_turn_base", p.max_body_turn_base);
  p.velocity_penalty = parse_number(kv, "physics.velocity_penalty", p.velocity_penalty);
  p.max_gun_turn = parse_number(kv, "physics.max_gun_turn", p.max_gun_turn);
  p.max_radar_turn = parse_number(kv, "physics.max_radar_turn", p.max_radar_turn);
  p.bullet_speed_base = parse_number(kv, "physics.bullet_speed_base", p.bullet_speed_base);
  p.bullet_speed_slope = parse_number(kv, "physics.bullet_speed_slope", p.bullet_speed_slope);
  p.min_power = parse_number(kv, "physics.min_power", p.min_power);
  p.max_power = parse_number(kv, "physics.max_power", p.max_power);
  p.inactivity_decay = parse_number(kv, "physics.inactivity_decay", p.inactivity_decay);
  if (c.rounds < 1 || c.arena_width <= 0 || c.arena_height <= 0 ||
      c.gun_cooling_rate <= 0 || c.initial_energy <= 0) {
    throw std::runtime_error("config values must be positive");
  }
  return c;
}

std::string config_to_text(const BattleConfig& c) {
  std::string out;
  auto emit = [&out](const char* key, double v) {
    out += key;
    out.push_back('=');
    append_double(out, v);
    out.push_back('\n');
  };
  emit("arena_width", c.arena_width);
  emit("arena_height", c.arena_height);
  emit("rounds", c.rounds);
  emit("gun_cooling_rate", c.gun_cooling_rate);
  emit("inactivity_time", static_cast<double>(c.inactivity_time));
  emit("initial_energy", c.initial_energy);
  emit("sentry_border_size", c.sentry_border_size);
  emit("seed", static_cast<double>(c.seed));
  const PhysicsConstants& p = c.physics;
  emit("physics.max_velocity", p.max_velocity);
  emit("physics.acceleration", p.acceleration);
  emit("physics.deceleration", p.deceleration);
  emit("physics.max_body_turn_base", p.max_body_turn_base);
  emit("physics.velocity_penalty", p.velocity_penalty);
  emit("physics.max_gun_turn", p.max_gun_turn);
  emit("physics.max_radar_turn", p.max_radar_turn);
  emit("physics.bullet_speed_base", p.bullet_speed_base);
  emit("physics.bullet_speed_slope", p.bullet_speed_slope);
  emit("physics.min_power", p.min_power);
  emit("physics.max_power", p.max_power);
  emit("physics.inactivity_decay", p.inactivity_decay);
  return out;
}

// ---- battle setup ----------------------------------------------------------

BattleState new_battle(const BattleConfig& config, const std::vector<std::string>& roster) {
  if (roster.size() < 2) {
    throw std::invalid_argument("battle needs at least two bots");
  }
  const double margin = kHitTolerance;
  if (config.arena_width <= 2 * margin || config.arena_height <= 2 * margin) {
    throw std::runtime_error("arena too small for a tank");
  }
  BattleState state;
  state.config = config;
  state.roster = roster;
  state.tanks.resize(roster.size());
  state.damage_dealt.assign(roster.size(), 0.0);
  state.pending_killer.assign(roster.size(), -1);
  state.damage_by_pair.assign(roster.size() * roster.size(), 0.0);

  Rng rng(config.seed);
  for (std::size_t i = 0; i < roster.size(); ++i) {
    TankState& tank = state.tanks[i];
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double x = rng.next_double(margin, config.arena_width - margin);
      const double y = rng.next_double(margin, config.arena_height - margin);
      placed = true;
      for (std::size_t j = 0; j < i; ++j) {
        const auto& other = state.tanks[j].pose.position;
        if (std::fabs(other.x - x) < kTankSize && std::fabs(other.y - y) < kTankSize) {
          placed = false;
          break;
        }
      }
      if (placed) {
        tank.pose.position = {x, y};
      }
    }
    if (!placed) {
      throw std::runtime_error("arena too small for non-overlapping placement");
    }
    tank.pose.heading = normalize_angle(rng.next_double(0.0, geometry::kTwoPi));
    tank.gun_heading = tank.pose.heading;
    tank.radar_heading = tank.pose.heading;
    tank.velocity = 0.0;
    tank.energy = config.initial_energy;
    tank.gun_heat = 3.0;
    tank.alive = true;
  }
  return state;
}

// ---- tick ------------------------------------------------------------------

namespace {

bool finite_command(const Command& c) {
  return std::isfinite(c.target_velocity) && std::isfinite(c.body_turn) &&
         std::isfinite(c.gun_turn) && std::isfinite(c.radar_turn) &&
         (!c.fire_power || std::isfinite(*c.fire_power));
}

// First parameter along p -> p+d hitting the tank's 36x36 box, if any.
std::optional<double> segment_box_hit(Vec2 p, Vec2 d, Vec2 center) {
  const double lo_x = center.x - kHitTolerance, hi_x = center.x + kHitTolerance;
  const double lo_y = center.y - kHitTolerance, hi_y = center.y + kHitTolerance;
  double t0 = 0.0, t1 = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double origin = axis == 0 ? p.x : p.y;
    const double delta = axis == 0 ? d.x : d.y;
    const double lo = axis == 0 ? lo_x : lo_y;
    const double hi = axis == 0 ? hi_x : hi_y;
    if (std::fabs(delta) < 1e-12) {
      if (origin < lo || origin > hi) {
        return std::nullopt;
      }
      continue;
    }
    double a = (lo - origin) / delta;
    double b = (hi - origin) / delta;
    if (a > b) {
      std::swap(a, b);
    }
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) {
      return std::nullopt;
    }
  }
  return t0;
}

// True when the target's angular extent [seen from `from`] intersects the
// sector the radar swept this tick (from `old_dir`, turning `delta` ccw).
bool sector_covers_tank(Vec2 from, double old_dir, double delta, Vec2 target_center) {
  // Angular interval of the 36x36 box, from its corners.
  const double cx = target_center.x - from.x;
  const double cy = target_center.y - from.y;
  const double center_ang = std::atan2(cy, cx);
  double half_width = 0.0;
  for (int sx = -1; sx <= 1; sx += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      const double ang =
          std::atan2(cy + sy * kHitTolerance, cx + sx * kHitTolerance);
      half_width = std::max(half_width, std::fabs(normalize_angle(ang - center_ang)));
    }
  }
  // Offset of the box center from the sweep start, measured along the sweep
  // direction. The sector is [0, delta] (or [delta, 0]).
  const double off = normalize_angle(center_ang - old_dir);
  const double lo = std::min(0.0, delta) - half_width;
  const double hi = std::max(0.0, delta) + half_width;
  return off >= lo && off <= hi;
}

double approach(double value, double desired, double rate) {
  if (value < desired) {
    return std::min(value + rate, desired);
  }
  return std::max(value - rate, desired);
}

}  // namespace

void tick(BattleState& state, const std::vector<std::optional<Command>>& commands,
          std::vector<BattleEvent>& events) {
  const BattleConfig& cfg = state.config;
  const PhysicsConstants& phys = cfg.physics;
  const std::size_t n = state.tanks.size();
  if (commands.size() != n) {
    throw std::invalid_argument("tick: one command slot per bot required");
  }
  state.tick_index++;
  const std::int64_t now = state.tick_index;

  auto emit = [&events, now](BattleEvent e) {
    e.tick = now;
    events.push_back(std::move(e));
  };

  // Command intake: reject bad input, keep a sanitized copy.
  std::vector<Command> cmd(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!commands[i]) {
      continue;
    }
    if (!state.tanks[i].alive || !finite_command(*commands[i])) {
      BattleEvent e;
      e.kind = EventKind::Fault;
      e.actor = static_cast<int>(i);
      emit(e);
      continue;
    }
    cmd[i] = *commands[i];
  }

  // 1. Bullets advance and test hits along their path.
  for (std::size_t bi = 0; bi < state.bullets.size();) {
    Bullet& bullet = state.bullets[bi];
    const Vec2 start = bullet.position;
    const Vec2 step = bullet.velocity;
    int hit_tank = -1;
    double best_t = 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!state.tanks[i].alive || static_cast<int>(i) == bullet.owner) {
        continue;
      }
      const auto t = segment_box_hit(start, step, state.tanks[i].pose.position);
      if (t && *t < best_t) {
        best_t = *t;
        hit_tank = static_cast<int>(i);
      }
    }
    if (hit_tank >= 0) {
      TankState& victim = state.tanks[hit_tank];
      TankState& shooter = state.tanks[bullet.owner];
      const double damage = phys.bullet_damage(bullet.power);
      victim.energy -= damage;
      if (shooter.alive) {
        shooter.energy += phys.hit_energy_return(bullet.power);
      }
      state.damage_dealt[bullet.owner] += damage;
      state.pair_damage(bullet.owner, hit_tank) += damage;
      state.last_damage_tick = now;
      if (victim.energy <= 0.0 && state.pending_killer[hit_tank] < 0) {
        state.pending_killer[hit_tank] = bullet.owner;  // killing blow
      }
      BattleEvent e;
      e.kind = EventKind::BulletHit;
      e.actor = bullet.owner;
      e.target = hit_tank;
      e.bullet_id = bullet.id;
      e.damage = damage;
      e.x = start.x + best_t * step.x;
      e.y = start.y + best_t * step.y;
      emit(e);
      state.bullets.erase(state.bullets.begin() + bi);
      continue;
    }
    bullet.position = start + step;
    if (bullet.position.x < 0.0 || bullet.position.x > cfg.arena_width ||
        bullet.position.y < 0.0 || bullet.position.y > cfg.arena_height) {
      BattleEvent e;
      e.kind = EventKind::BulletMiss;
      e.actor = bullet.owner;
      e.bullet_id = bullet.id;
      e.x = std::clamp(bullet.position.x, 0.0, cfg.arena_width);
      e.y = std::clamp(bullet.position.y, 0.0, cfg.arena_height);
      emit(e);
      state.bullets.erase(state.bullets.begin() + bi);
      continue;
    }
    ++bi;
  }

  // 2. Movement: turns, velocity ramp, wall collision.
  std::vector<Vec2> prev_pos(n);
  std::vector<double> radar_before(n);
  for (std::size_t i = 0; i < n; ++i) {
    TankState& tank = state.tanks[i];
    prev_pos[i] = tank.pose.position;
    radar_before[i] = tank.radar_heading;
    if (!tank.alive) {
      continue;
    }
    const Command& c = cmd[i];
    // Positive request = clockwise; internal headings are ccw.
    const double body_limit = phys.max_body_turn(tank.velocity);
    tank.pose.heading = normalize_angle(
        tank.pose.heading - std::clamp(c.body_turn, -body_limit, body_limit));
    const double gun_limit = phys.max_gun_turn_rad();
    tank.gun_heading =
        normalize_angle(tank.gun_heading - std::clamp(c.gun_turn, -gun_limit, gun_limit));
    const double radar_limit = phys.max_radar_turn_rad();
    tank.radar_heading = normalize_angle(
        tank.radar_heading - std::clamp(c.radar_turn, -radar_limit, radar_limit));

    const double desired =
        std::clamp(c.target_velocity, -phys.max_velocity, phys.max_velocity);
    const bool braking =
        tank.velocity != 0.0 &&
        (tank.velocity > 0.0 ? desired < tank.velocity : desired > tank.velocity);
    tank.velocity =
        approach(tank.velocity, desired, braking ? phys.deceleration : phys.acceleration);

    tank.pose.position =
        tank.pose.position + tank.velocity * unit(tank.pose.heading);

    const double lo_x = kHitTolerance, hi_x = cfg.arena_width - kHitTolerance;
    const double lo_y = kHitTolerance, hi_y = cfg.arena_height - kHitTolerance;
    const bool out = tank.pose.position.x < lo_x || tank.pose.position.x > hi_x ||
                     tank.pose.position.y < lo_y || tank.pose.position.y > hi_y;
    if (out) {
      tank.pose.position.x = std::clamp(tank.pose.position.x, lo_x, hi_x);
      tank.pose.position.y = std::clamp(tank.pose.position.y, lo_y, hi_y);
      if (tank.velocity != 0.0) {
        const double damage = phys.wall_damage(tank.velocity);
        tank.energy -= damage;
        tank.velocity = 0.0;
        BattleEvent e;
        e.kind = EventKind::WallHit;
        e.actor = static_cast<int>(i);
        e.damage = damage;
        e.x = tank.pose.position.x;
        e.y = tank.pose.position.y;
        emit(e);
      }
    }
  }
  // Tank-tank overlap: back both off to their previous spots and stop them.
  // Ramming is not part of the modelled rule set, so no damage is exchanged.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!state.tanks[i].alive || !state.tanks[j].alive) {
        continue;
      }
      const Vec2 a = state.tanks[i].pose.position;
      const Vec2 b = state.tanks[j].pose.position;
      if (std::fabs(a.x - b.x) < kTankSize && std::fabs(a.y - b.y) < kTankSize) {
        state.tanks[i].pose.position = prev_pos[i];
        state.tanks[j].pose.position = prev_pos[j];
        state.tanks[i].velocity = 0.0;
        state.tanks[j].velocity = 0.0;
      }
    }
  }

  // 3. Firing, gated on the gun heat carried into this tick.
  for (std::size_t i = 0; i < n; ++i) {
    TankState& tank = state.tanks[i];
    if (!tank.alive || !cmd[i].fire_power) {
      continue;
    }
    const double power = std::clamp(*cmd[i].fire_power, phys.min_power, phys.max_power);
    if (tank.gun_heat > 0.0 || tank.energy <= power) {
      continue;
    }
    tank.energy -= power;
    tank.gun_heat += 1.0 + power / 5.0;
    Bullet bullet;
    bullet.id = state.next_bullet_id++;
    bullet.owner = static_cast<int>(i);
    bullet.position = tank.pose.position;
    bullet.velocity = phys.bullet_speed(power) * unit(tank.gun_heading);
    bullet.power = power;
    state.bullets.push_back(bullet);
    BattleEvent e;
    e.kind = EventKind::Fire;
    e.actor = static_cast<int>(i);
    e.bullet_id = bullet.id;
    e.power = power;
    e.x = bullet.position.x;
    e.y = bullet.position.y;
    e.heading = tank.gun_heading;
    emit(e);
  }

  // 4. Gun cooling.
  for (auto& tank : state.tanks) {
    if (tank.alive) {
      tank.gun_heat = std::max(0.0, tank.gun_heat - cfg.gun_cooling_rate);
    }
  }

  // 5. Radar sweep.
  for (std::size_t i = 0; i < n; ++i) {
    const TankState& scanner = state.tanks[i];
    if (!scanner.alive) {
      continue;
    }
    const double swept = normalize_angle(scanner.radar_heading - radar_before[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !state.tanks[j].alive) {
        continue;
      }
      const TankState& other = state.tanks[j];
      if (!sector_covers_tank(scanner.pose.position, radar_before[i], swept,
                              other.pose.position)) {
        continue;
      }
      const Vec2 to = other.pose.position - scanner.pose.position;
      BattleEvent e;
      e.kind = EventKind::Scan;
      e.actor = static_cast<int>(i);
      e.target = static_cast<int>(j);
      e.bearing = normalize_angle(scanner.pose.heading - std::atan2(to.y, to.x));
      e.distance = geometry::length(to);
      e.heading = other.pose.heading;
      e.velocity = other.velocity;
      emit(e);
    }
  }

  // 6. Inactivity decay.
  if (now - state.last_damage_tick >= cfg.inactivity_time) {
    for (auto& tank : state.tanks) {
      if (tank.alive) {
        tank.energy -= phys.inactivity_decay;
      }
    }
  }

  // 7. Deaths.
  for (std::size_t i = 0; i < n; ++i) {
    TankState& tank = state.tanks[i];
    if (tank.alive && tank.energy <= 0.0) {
      tank.alive = false;
      tank.energy = 0.0;
      state.death_order.push_back(static_cast<int>(i));
      BattleEvent e;
      e.kind = EventKind::RobotDeath;
      e.actor = static_cast<int>(i);
      e.target = state.pending_killer[i];
      emit(e);
    }
  }
}

}  // namespace tanksim::engine
