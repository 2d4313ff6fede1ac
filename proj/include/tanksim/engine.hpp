#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tanksim/geometry.hpp"
#include "tanksim/rng.hpp"

namespace tanksim {

class Bot;  // bots.hpp

namespace engine {

// Tank bounding box is 36x36 arena units, so anything within 18 units of the
// center counts as a hit.
inline constexpr double kTankSize = 36.0;
inline constexpr double kHitTolerance = kTankSize / 2.0;

// Hard backstop so a round always terminates even if nobody deals damage
// (inactivity decay normally ends rounds far earlier).
inline constexpr std::int64_t kRoundTickCap = 20000;

// Rule constants of the simulated combat platform. Turn rates are in
// degrees/tick as conventionally documented; the engine converts internally.
struct PhysicsConstants {
  double max_velocity = 8.0;       // units/tick
  double acceleration = 1.0;       // units/tick^2
  double deceleration = 2.0;       // units/tick^2
  double max_body_turn_base = 10.0;  // deg/tick at standstill
  double velocity_penalty = 0.75;    // deg/tick lost per unit of speed
  double max_gun_turn = 20.0;        // deg/tick
  double max_radar_turn = 45.0;      // deg/tick
  double bullet_speed_base = 20.0;   // units/tick
  double bullet_speed_slope = 3.0;   // units/tick per power point
  double min_power = 0.1;
  double max_power = 3.0;
  double inactivity_decay = 0.1;  // energy/tick once the inactivity timer expires

  double bullet_speed(double power) const {
    return bullet_speed_base - bullet_speed_slope * power;
  }
  double bullet_damage(double power) const {
    return 4.0 * power + (power > 1.0 ? 2.0 * (power - 1.0) : 0.0);
  }
  double hit_energy_return(double power) const { return 3.0 * power; }
  double wall_damage(double velocity) const {
    double d = std::abs(velocity) / 2.0 - 1.0;
    return d > 0.0 ? d : 0.0;
  }
  double max_body_turn(double velocity) const {  // radians/tick
    return (max_body_turn_base - velocity_penalty * std::abs(velocity)) *
           geometry::kPi / 180.0;
  }
  double max_gun_turn_rad() const { return max_gun_turn * geometry::kPi / 180.0; }
  double max_radar_turn_rad() const { return max_radar_turn * geometry::kPi / 180.0; }
};

struct BattleConfig {
  double arena_width = 800.0;
  double arena_height = 600.0;
  int rounds = 30;
  double gun_cooling_rate = 0.1;    // heat/tick
  std::int64_t inactivity_time = 450;  // ticks without damage dealt
  double initial_energy = 100.0;
  double sentry_border_size = 100.0;  // accepted for config fidelity; no sentry
                                      // robot exists, so it has no effect
  std::uint64_t seed = 1;
  PhysicsConstants physics;
};

// Key=value config file matching the field names above (physics.* prefix for
// the nested block). Unknown keys are ignored so run manifests stay loadable.
std::map<std::string, std::string> parse_key_values(const std::string& path);
BattleConfig config_from_map(const std::map<std::string, std::string>& kv);
std::string config_to_text(const BattleConfig& config);

struct TankState {
  geometry::Pose pose;         // heading in ccw radians
  double gun_heading = 0.0;    // ccw radians, independent of the body
  double radar_heading = 0.0;  // ccw radians, independent of the body
  double velocity = 0.0;       // units/tick, signed along the heading
  double energy = 100.0;
  double gun_heat = 3.0;
  bool alive = true;
};

enum class EventKind {
  Scan,
  Fire,
  BulletHit,
  BulletMiss,
  WallHit,
  RobotDeath,
  RoundEnd,
  Fault,
};

const char* to_string(EventKind kind);

// One line of the battle log. Field meaning depends on the kind; the
// serialized field order is documented in docs/file-formats.md and is part of
// the determinism contract (logs are compared byte for byte).
struct BattleEvent {
  std::int64_t tick = 0;
  EventKind kind = EventKind::Scan;
  int actor = -1;      // scanner / shooter / wall-hitter / dying or faulting bot
  int target = -1;     // scanned or hit bot; killer for RobotDeath
  int bullet_id = -1;
  double damage = 0.0;
  double power = 0.0;
  double x = 0.0;
  double y = 0.0;
  double bearing = 0.0;   // Scan: negative when target is left of heading
  double distance = 0.0;
  double heading = 0.0;   // Scan: target body heading (ccw radians)
  double velocity = 0.0;  // Scan: target velocity
  std::vector<int> placements;  // RoundEnd only: best to worst bot index
};

std::string event_to_line(int round, const BattleEvent& event);

// Per-tick request from a bot. Turn requests share the bearing sign
// convention: positive turns clockwise, negative to the left. The engine
// clamps to physics bounds; well-behaved bots stay inside them already.
struct Command {
  double target_velocity = 0.0;  // units/tick, signed
  double body_turn = 0.0;        // radians/tick
  double gun_turn = 0.0;         // radians/tick
  double radar_turn = 0.0;       // radians/tick
  std::optional<double> fire_power;
};

struct Bullet {
  int id = -1;
  int owner = -1;
  geometry::Vec2 position;
  geometry::Vec2 velocity;
  double power = 0.0;
};

struct BattleState {
  BattleConfig config;
  std::vector<std::string> roster;
  std::vector<TankState> tanks;
  std::vector<Bullet> bullets;
  std::int64_t tick_index = 0;
  std::int64_t last_damage_tick = 0;  // bullet damage only
  int next_bullet_id = 0;
  std::vector<double> damage_dealt;       // this round, per bot
  std::vector<int> death_order;           // bot indices, first death first
  std::vector<int> pending_killer;        // per bot, -1 if none
  std::vector<double> damage_by_pair;     // damage_dealt[a*n+b]: a dealt onto b

  int alive_count() const;
  double& pair_damage(int from, int onto);
};

// Seeds the round: full energy, random non-overlapping spawns, gun heat 3.0.
// Throws std::invalid_argument for a roster below two and std::runtime_error
// when non-overlapping placement fails.
BattleState new_battle(const BattleConfig& config, const std::vector<std::string>& roster);

// Advances one tick. Sub-phases in fixed order: bullet advance and hit tests,
// movement and wall collision, firing, gun cooling, radar sweep, inactivity
// decay, deaths. Firing is gated on the gun heat before this tick's cooling,
// so a gun that cools to zero this tick can first fire on the next one.
// Commands for dead bots are ignored (with a Fault event); non-finite command
// values are rejected the same way.
void tick(BattleState& state, const std::vector<std::optional<Command>>& commands,
          std::vector<BattleEvent>& events);

struct RoundResult {
  std::vector<BattleEvent> events;
  std::vector<int> placements;  // best to worst
  int survivor = -1;            // -1 when the round ended without a sole survivor
  std::int64_t ticks = 0;
  std::vector<double> damage_dealt;
  std::vector<double> final_energy;
};

// Runs a full round with the given bots (one per roster slot). A bot whose
// decide() throws skips its turn and is disabled for the round after three
// faults. The per-tick decision budget is this exception contract; wall-clock
// timeouts would break determinism and are deliberately not enforced.
RoundResult run_round(const BattleConfig& config, const std::vector<std::string>& roster,
                      const std::vector<Bot*>& bots, std::uint64_t seed);

using BotFactory = std::function<std::unique_ptr<Bot>()>;

struct BattleResult {
  std::vector<RoundResult> rounds;
};

// Runs config.rounds rounds, instantiating fresh bots per round (round i uses
// derive_seed(config.seed, i)). Identical inputs produce byte-identical logs.
BattleResult run_battle(const BattleConfig& config, const std::vector<std::string>& roster,
                        const std::vector<BotFactory>& factories);

std::string serialize_log(const BattleResult& result);

}  // namespace engine
}  // namespace tanksim
