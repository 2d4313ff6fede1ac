#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tanksim/engine.hpp"

namespace tanksim {

// One radar return. `bearing` is signed from the scanner's body heading,
// negative when the target is to the left.
struct ScanInfo {
  int target = -1;
  double bearing = 0.0;
  double distance = 0.0;
  double heading = 0.0;   // target body heading, ccw radians
  double velocity = 0.0;  // target velocity, signed
};

struct Observation {
  engine::TankState self;
  std::vector<ScanInfo> scans;  // targets swept on the previous tick
  std::int64_t tick = 0;
};

class Bot {
 public:
  virtual ~Bot() = default;
  virtual std::string_view name() const = 0;
  virtual void on_round_start(const engine::BattleConfig& config) = 0;
  virtual engine::Command decide(const Observation& obs) = 0;
};

// One planning epoch of the concentric-ring movement strategy: at each ring
// the attacker re-runs the pruning search over the candidate arc radii.
struct GameCircle {
  int index = 0;
  std::vector<double> candidate_radii;
  double chosen_radius = 0.0;
  std::int64_t epoch_start = 0;
};

class TestRobot : public Bot {
 public:
  TestRobot();
  ~TestRobot() override;
  std::string_view name() const override { return "TestRobot"; }
  void on_round_start(const engine::BattleConfig& config) override;
  engine::Command decide(const Observation& obs) override;

  const GameCircle& circle() const;

  // Radius selection over the nine candidate arcs with the given leaf payoff;
  // exposed so the planning decision is testable in isolation.
  static double plan_radius(const std::function<double(double)>& payoff);

  // Ticks between ring replans.
  static constexpr std::int64_t kEpochTicks = 16;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Factory for the shipped roster: TestRobot, Crazy, Fire, My-Robot, V-Robot,
// SpinBot, Walls (hyphens optional). Throws std::invalid_argument for unknown
// names.
std::unique_ptr<Bot> make_bot(const std::string& name);
const std::vector<std::string>& bot_names();

}  // namespace tanksim
