#include <algorithm>
#include <numeric>

#include "tanksim/bots.hpp"
#include "tanksim/engine.hpp"

namespace tanksim::engine {

namespace {

Observation make_observation(const BattleState& state, int bot,
                             const std::vector<BattleEvent>& last_tick_events) {
  Observation obs;
  obs.self = state.tanks[bot];
  obs.tick = state.tick_index;
  for (const auto& e : last_tick_events) {
    if (e.kind == EventKind::Scan && e.actor == bot) {
      ScanInfo s;
      s.target = e.target;
      s.bearing = e.bearing;
      s.distance = e.distance;
      s.heading = e.heading;
      s.velocity = e.velocity;
      obs.scans.push_back(s);
    }
  }
  return obs;
}

// Best-to-worst finishing order: survivors first (higher energy first), then
// the reverse of the death order.
std::vector<int> placements_of(const BattleState& state) {
  std::vector<int> order;
  std::vector<int> alive;
  for (std::size_t i = 0; i < state.tanks.size(); ++i) {
    if (state.tanks[i].alive) {
      alive.push_back(static_cast<int>(i));
    }
  }
  std::stable_sort(alive.begin(), alive.end(), [&state](int a, int b) {
    return state.tanks[a].energy > state.tanks[b].energy;
  });
  order = alive;
  for (auto it = state.death_order.rbegin(); it != state.death_order.rend(); ++it) {
    order.push_back(*it);
  }
  return order;
}

}  // namespace

RoundResult run_round(const BattleConfig& config, const std::vector<std::string>& roster,
                      const std::vector<Bot*>& bots, std::uint64_t seed) {
  if (bots.size() != roster.size()) {
    throw std::invalid_argument("run_round: one bot per roster slot required");
  }
  BattleConfig cfg = config;
  cfg.seed = seed;
  BattleState state = new_battle(cfg, roster);
  const std::size_t n = roster.size();
  for (auto* bot : bots) {
    bot->on_round_start(cfg);
  }

  RoundResult result;
  std::vector<int> fault_count(n, 0);
  std::vector<bool> disabled(n, false);
  std::vector<BattleEvent> tick_events;
  std::vector<BattleEvent> prev_tick_events;

  while (state.alive_count() > 1 && state.tick_index < kRoundTickCap) {
    std::vector<std::optional<Command>> commands(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!state.tanks[i].alive) {
        continue;
      }
      if (disabled[i]) {
        commands[i] = Command{};  // disabled bots coast to a stop
        continue;
      }
      try {
        commands[i] = bots[i]->decide(make_observation(state, static_cast<int>(i),
                                                       prev_tick_events));
      } catch (const std::exception&) {
        BattleEvent e;
        e.tick = state.tick_index + 1;
        e.kind = EventKind::Fault;
        e.actor = static_cast<int>(i);
        result.events.push_back(e);
        commands[i] = Command{};  // skip the turn
        if (++fault_count[i] >= 3) {
          disabled[i] = true;
        }
      }
    }
    tick_events.clear();
    tick(state, commands, tick_events);
    result.events.insert(result.events.end(), tick_events.begin(), tick_events.end());
    prev_tick_events = tick_events;
  }

  result.placements = placements_of(state);
  result.survivor = state.alive_count() == 1 ? result.placements.front() : -1;
  result.ticks = state.tick_index;
  result.damage_dealt = state.damage_dealt;
  result.final_energy.reserve(n);
  for (const auto& tank : state.tanks) {
    result.final_energy.push_back(tank.energy);
  }

  BattleEvent end;
  end.tick = state.tick_index;
  end.kind = EventKind::RoundEnd;
  end.placements = result.placements;
  result.events.push_back(end);
  return result;
}

BattleResult run_battle(const BattleConfig& config, const std::vector<std::string>& roster,
                        const std::vector<BotFactory>& factories) {
  if (factories.size() != roster.size()) {
    throw std::invalid_argument("run_battle: one factory per roster slot required");
  }
  BattleResult result;
  result.rounds.reserve(config.rounds);
  for (int round = 0; round < config.rounds; ++round) {
    std::vector<std::unique_ptr<Bot>> bots;
    std::vector<Bot*> raw;
    for (const auto& make : factories) {
      bots.push_back(make());
      raw.push_back(bots.back().get());
    }
    result.rounds.push_back(
        run_round(config, roster, raw, derive_seed(config.seed, round)));
  }
  return result;
}

std::string serialize_log(const BattleResult& result) {
  std::string out;
  for (std::size_t round = 0; round < result.rounds.size(); ++round) {
    for (const auto& event : result.rounds[round].events) {
      out += event_to_line(static_cast<int>(round), event);
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace tanksim::engine
