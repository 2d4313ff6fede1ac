#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "tanksim/bots.hpp"
#include "tanksim/engine.hpp"
#include "tanksim/gametree.hpp"
#include "tanksim/geometry.hpp"

using namespace tanksim;
using namespace tanksim::engine;
using geometry::kPi;
using geometry::normalize_angle;
using geometry::Vec2;

namespace {

constexpr double kDeg = kPi / 180.0;

// Minimal battle driver that hands each bot its observation every tick.
struct Loop {
  BattleConfig cfg;
  BattleState state;
  std::vector<Bot*> bots;
  std::vector<BattleEvent> last_events;

  Loop(const BattleConfig& config, const std::vector<std::string>& roster,
       std::vector<Bot*> the_bots)
      : cfg(config), state(new_battle(config, roster)), bots(std::move(the_bots)) {
    for (auto* bot : bots) {
      bot->on_round_start(cfg);
    }
  }

  std::vector<engine::Command> step() {
    std::vector<engine::Command> issued(bots.size());
    std::vector<std::optional<Command>> cmds(bots.size());
    for (std::size_t i = 0; i < bots.size(); ++i) {
      if (!state.tanks[i].alive) {
        continue;
      }
      Observation obs;
      obs.self = state.tanks[i];
      obs.tick = state.tick_index;
      for (const auto& e : last_events) {
        if (e.kind == EventKind::Scan && e.actor == static_cast<int>(i)) {
          obs.scans.push_back({e.target, e.bearing, e.distance, e.heading, e.velocity});
        }
      }
      issued[i] = bots[i]->decide(obs);
      cmds[i] = issued[i];
    }
    last_events.clear();
    tick(state, cmds, last_events);
    return issued;
  }
};

Observation observation_with_scan(const BattleConfig& cfg, double radar_deg,
                                  double heading_deg, double bearing_deg,
                                  double distance) {
  (void)cfg;
  Observation obs;
  obs.self.pose = {{400.0, 300.0}, heading_deg * kDeg};
  obs.self.radar_heading = radar_deg * kDeg;
  obs.self.gun_heading = 0.0;
  obs.tick = 0;
  obs.scans.push_back({1, bearing_deg * kDeg, distance, 0.0, 0.0});
  return obs;
}

}  // namespace

TEST_CASE("TestRobot re-sweeps by exactly the worked formula value") {
  BattleConfig cfg;
  TestRobot bot;
  bot.on_round_start(cfg);
  const auto obs = observation_with_scan(cfg, 90.0, 45.0, -30.0, 200.0);
  const auto cmd = bot.decide(obs);
  CHECK(cmd.radar_turn == doctest::Approx(15.0 * kDeg).epsilon(1e-12));
}

TEST_CASE("TestRobot spins the radar at full rate with nothing tracked") {
  BattleConfig cfg;
  TestRobot bot;
  bot.on_round_start(cfg);
  Observation obs;
  obs.self.pose = {{400.0, 300.0}, 0.0};
  const auto cmd = bot.decide(obs);
  CHECK(cmd.radar_turn == doctest::Approx(cfg.physics.max_radar_turn_rad()));
}

TEST_CASE("plan_radius prefers the 30 arc under the walkthrough payoff structure") {
  // Threat distances arranged like the committed duel tree: the 40 arc has the
  // smallest leaf payoff, but the alternating tree still backs up the 30 arc
  // (a greedy minimum would pick 40).
  const std::map<double, double> threat{{20, 60}, {30, 20},  {40, 15},
                                        {70, 60}, {80, 70},  {100, 90},
                                        {120, 110}, {140, 130}, {160, 150}};
  const double chosen =
      TestRobot::plan_radius([&threat](double r) { return threat.at(r); });
  CHECK(chosen == 30.0);
  // Sanity: that is not the greedy argmin.
  double greedy = 0.0, best = 1e18;
  for (const auto& [r, v] : threat) {
    if (v < best) {
      best = v;
      greedy = r;
    }
  }
  CHECK(greedy == 40.0);
}

TEST_CASE("TestRobot replans only at ring boundaries and stays in the radius set") {
  BattleConfig cfg;
  cfg.seed = 4;
  TestRobot test_bot;
  auto fire = make_bot("Fire");
  Loop loop(cfg, {"TestRobot", "Fire"}, {&test_bot, fire.get()});

  double last_radius = -1.0;
  std::vector<std::int64_t> change_ticks;
  for (int t = 0; t < 128 && loop.state.alive_count() > 1; ++t) {
    loop.step();
    const GameCircle& circle = test_bot.circle();
    const auto& radii = gametree::path_radii();
    if (circle.chosen_radius != 0.0) {
      CHECK(std::find(radii.begin(), radii.end(), circle.chosen_radius) != radii.end());
    }
    if (circle.chosen_radius != last_radius) {
      change_ticks.push_back(loop.state.tick_index);
      last_radius = circle.chosen_radius;
    }
  }
  REQUIRE(!change_ticks.empty());
  for (std::size_t i = 2; i < change_ticks.size(); ++i) {
    // After the first plan, changes land on 16-tick boundaries.
    CHECK((change_ticks[i] - change_ticks[i - 1]) % TestRobot::kEpochTicks == 0);
  }
}

TEST_CASE("TestRobot holds the radar lock at least 90% of the time") {
  BattleConfig cfg;
  cfg.seed = 9;
  TestRobot test_bot;
  auto spin = make_bot("SpinBot");
  Loop loop(cfg, {"TestRobot", "SpinBot"}, {&test_bot, spin.get()});

  int ticks_after_first_scan = 0;
  int fresh = 0;
  bool seen = false;
  for (int t = 0; t < 600 && loop.state.alive_count() > 1; ++t) {
    loop.step();
    bool scanned = false;
    for (const auto& e : loop.last_events) {
      if (e.kind == EventKind::Scan && e.actor == 0) {
        scanned = true;
      }
    }
    if (seen) {
      ++ticks_after_first_scan;
      fresh += scanned ? 1 : 0;
    }
    seen = seen || scanned;
  }
  REQUIRE(ticks_after_first_scan > 300);
  CHECK(fresh >= (ticks_after_first_scan * 9) / 10);
}

TEST_CASE("TestRobot lands predicted shots on a live target") {
  BattleConfig cfg;
  cfg.seed = 11;
  TestRobot test_bot;
  auto spin = make_bot("SpinBot");
  Loop loop(cfg, {"TestRobot", "SpinBot"}, {&test_bot, spin.get()});
  int hits = 0;
  for (int t = 0; t < 800 && loop.state.alive_count() > 1; ++t) {
    loop.step();
    for (const auto& e : loop.last_events) {
      if (e.kind == EventKind::BulletHit && e.actor == 0) {
        ++hits;
      }
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("every shipped bot keeps its commands inside the physics bounds") {
  BattleConfig cfg;
  cfg.seed = 17;
  std::vector<std::unique_ptr<Bot>> owned;
  std::vector<Bot*> raw;
  std::vector<std::string> roster;
  for (const auto& name : bot_names()) {
    owned.push_back(make_bot(name));
    raw.push_back(owned.back().get());
    roster.push_back(name);
  }
  Loop loop(cfg, roster, raw);
  const PhysicsConstants& phys = cfg.physics;
  for (int t = 0; t < 400 && loop.state.alive_count() > 1; ++t) {
    std::vector<double> velocity_before;
    for (const auto& tank : loop.state.tanks) {
      velocity_before.push_back(tank.velocity);
    }
    const auto issued = loop.step();
    for (std::size_t i = 0; i < issued.size(); ++i) {
      if (!loop.state.tanks[i].alive) {
        continue;
      }
      CAPTURE(i);
      const auto& c = issued[i];
      CHECK(std::fabs(c.target_velocity) <= phys.max_velocity + 1e-12);
      CHECK(std::fabs(c.body_turn) <= phys.max_body_turn(velocity_before[i]) + 1e-12);
      CHECK(std::fabs(c.gun_turn) <= phys.max_gun_turn_rad() + 1e-12);
      CHECK(std::fabs(c.radar_turn) <= phys.max_radar_turn_rad() + 1e-12);
      if (c.fire_power) {
        CHECK(*c.fire_power >= phys.min_power);
        CHECK(*c.fire_power <= phys.max_power);
      }
    }
  }
}

TEST_CASE("Fire idles in place and spins its radar without a scan") {
  BattleConfig cfg;
  auto bot = make_bot("Fire");
  bot->on_round_start(cfg);
  Observation obs;
  obs.self.pose = {{200.0, 200.0}, 0.0};
  const auto cmd = bot->decide(obs);
  CHECK(cmd.target_velocity == 0.0);
  CHECK(cmd.body_turn == 0.0);
  CHECK(cmd.radar_turn == doctest::Approx(cfg.physics.max_radar_turn_rad()));
  CHECK_FALSE(cmd.fire_power.has_value());
}

TEST_CASE("Walls swings about 90 degrees at a corner") {
  BattleConfig cfg;
  cfg.seed = 2;
  auto walls = make_bot("Walls");
  auto fire = make_bot("Fire");
  Loop loop(cfg, {"Walls", "Fire"}, {walls.get(), fire.get()});
  // Park the patroller just short of the bottom-right corner, rolling along
  // the bottom wall at speed.
  loop.state.tanks[0].pose = {{750.0, 30.0}, 0.0};
  loop.state.tanks[0].velocity = 8.0;
  loop.state.tanks[1].pose = {{400.0, 550.0}, 0.0};
  const double heading_before = loop.state.tanks[0].pose.heading;
  for (int t = 0; t < 80; ++t) {
    loop.step();
  }
  const double turned =
      normalize_angle(loop.state.tanks[0].pose.heading - heading_before);
  CHECK(std::fabs(turned) == doctest::Approx(kPi / 2.0).epsilon(0.15));
}

TEST_CASE("SpinBot's open-field trajectory fits a circle within 1 unit RMS") {
  BattleConfig cfg;
  cfg.seed = 6;
  auto spin = make_bot("SpinBot");
  auto fire = make_bot("Fire");
  Loop loop(cfg, {"SpinBot", "Fire"}, {spin.get(), fire.get()});
  loop.state.tanks[0].pose = {{400.0, 300.0}, 0.0};
  loop.state.tanks[1].pose = {{60.0, 60.0}, 0.0};
  for (int t = 0; t < 25; ++t) {
    loop.step();  // reach steady speed
  }
  std::vector<Vec2> points;
  for (int t = 0; t < 100; ++t) {
    loop.step();
    points.push_back(loop.state.tanks[0].pose.position);
  }
  // Algebraic circle fit: x^2 + y^2 + D x + E y + F = 0 by least squares.
  double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    const double z = p.x * p.x + p.y * p.y;
    sxx += p.x * p.x;
    sxy += p.x * p.y;
    syy += p.y * p.y;
    sx += p.x;
    sy += p.y;
    sxz += p.x * z;
    syz += p.y * z;
    sz += z;
  }
  // Solve the 3x3 normal equations with Cramer's rule.
  const double a11 = sxx, a12 = sxy, a13 = sx;
  const double a21 = sxy, a22 = syy, a23 = sy;
  const double a31 = sx, a32 = sy, a33 = n;
  const double b1 = -sxz, b2 = -syz, b3 = -sz;
  const double det = a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
                     a13 * (a21 * a32 - a22 * a31);
  REQUIRE(std::fabs(det) > 1e-9);
  const double d = (b1 * (a22 * a33 - a23 * a32) - a12 * (b2 * a33 - a23 * b3) +
                    a13 * (b2 * a32 - a22 * b3)) /
                   det;
  const double e = (a11 * (b2 * a33 - a23 * b3) - b1 * (a21 * a33 - a23 * a31) +
                    a13 * (a21 * b3 - b2 * a31)) /
                   det;
  const double f = (a11 * (a22 * b3 - b2 * a32) - a12 * (a21 * b3 - b2 * a31) +
                    b1 * (a21 * a32 - a22 * a31)) /
                   det;
  const Vec2 center{-d / 2.0, -e / 2.0};
  const double radius = std::sqrt(center.x * center.x + center.y * center.y - f);
  double rms = 0.0;
  for (const auto& p : points) {
    const double dr = geometry::distance(p, center) - radius;
    rms += dr * dr;
  }
  rms = std::sqrt(rms / n);
  CHECK(rms < 1.0);
  CHECK(radius > 50.0);
  CHECK(radius < 200.0);
}

TEST_CASE("the factory covers the published roster and rejects strangers") {
  for (const auto& name : bot_names()) {
    auto bot = make_bot(name);
    CHECK(bot->name() == name);
  }
  CHECK(make_bot("My-Robot")->name() == "My-Robot");
  CHECK(make_bot("myrobot")->name() == "My-Robot");
  CHECK(make_bot("V-Robot")->name() == "V-Robot");
  CHECK_THROWS_AS(make_bot("Foo"), std::invalid_argument);
}
