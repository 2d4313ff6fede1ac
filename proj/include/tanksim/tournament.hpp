#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tanksim/engine.hpp"

namespace tanksim::tournament {

struct BotScore {
  std::string name;
  double total_score = 0.0;
  double survival_score = 0.0;
  double last_survivor_bonus = 0.0;
  double bullet_damage = 0.0;
  double bullet_bonus = 0.0;
  double ram_damage = 0.0;  // no shipped bot rams; kept for the report format
  int firsts = 0;
  int seconds = 0;
  int thirds = 0;
  int wins = 0;
};

struct ScoreBoard {
  std::vector<BotScore> bots;

  int index_of(const std::string& name) const;
};

// Streams battle events into a board. Survival pays 50 per opponent death
// while alive, the sole survivor collects 10 per opponent at round end,
// bullet damage pays 1 per point dealt and the killer collects 20% of the
// damage dealt to the victim. Round state resets at each RoundEnd.
class Scorer {
 public:
  explicit Scorer(std::vector<std::string> names);

  void score_event(const engine::BattleEvent& event);
  const ScoreBoard& board() const { return board_; }

 private:
  ScoreBoard board_;
  std::vector<bool> alive_;
  std::vector<double> pair_damage_;  // from * n + onto, this round

  void reset_round();
};

// Batch route: recomputes the board from a full log, independently of the
// streaming path (used to cross-check it).
ScoreBoard score_log(const std::vector<std::string>& names,
                     const engine::BattleResult& result);

struct SeriesResult {
  ScoreBoard board;
  engine::BattleResult battle;   // rounds in order (replayed ties substituted)
  std::vector<int> round_winner;  // duels: winner per round
};

// 30-round duel (config.rounds overrides). When both tanks die on the same
// tick the higher damage dealt that round wins; equal damage replays the
// round under a derived seed, so wins always sum to the round count. `jobs`
// parallelizes rounds; results are identical for any job count.
SeriesResult run_duel_series(const std::string& bot_a, const std::string& bot_b,
                             const engine::BattleConfig& config, int jobs = 1);

// Free-for-all for rosters of at least three. Placements per round are the
// engine's finishing order; ranking is by total score.
SeriesResult run_melee(const std::vector<std::string>& roster,
                       const engine::BattleConfig& config, int jobs = 1);

// a/b rounded to two decimals; nullopt when b is not positive.
std::optional<double> relative_total(double a_score, double b_score);

// Whole-percent share of the summed total score, one entry per bot.
// Throws std::invalid_argument when every total is zero.
std::vector<int> score_share(const ScoreBoard& board);

double top3_rate(const BotScore& score, int rounds);

// ---- published reference tables --------------------------------------------

struct ReferenceDuelRow {
  std::string opponent;
  double totals[2], survival[2], bullet_damage[2], bullet_bonus[2];
  int wins[2];
  double expected_ratio = 0.0;
};

struct ReferenceMeleeRow {
  int rank = 0;
  std::string name;
  double total = 0.0;
  int share_percent = 0;
  double survival = 0.0, bullet_damage = 0.0, bullet_bonus = 0.0;
  int firsts = 0, seconds = 0, thirds = 0;
};

struct ReferenceTables {
  std::vector<ReferenceDuelRow> duels;
  std::vector<ReferenceMeleeRow> melee;
  double expected_top3_rate = 0.0;
  int melee_rounds = 30;
};

// Parses data/reference_tables.txt (see docs/file-formats.md). Throws
// std::runtime_error on malformed input.
ReferenceTables load_reference_tables(const std::string& path);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> lines;  // one human-readable line per check
};

// Recomputes every derived statistic (relative totals, shares, top-3 rate,
// rank order) from the raw reference numbers and compares against the
// published values: ratios within 0.005, shares within half a point, top-3
// rate exact.
VerifyReport verify_reference_tables(const ReferenceTables& tables);

// ---- report writers ----------------------------------------------------------

// Duel report in the two-numbers-per-category layout.
void write_duel_table(std::ostream& out, const SeriesResult& series);
// Melee report: rank, name, total (share%), survival, damage, bonus, placings.
void write_melee_table(std::ostream& out, const SeriesResult& series, int rounds);
void write_scores_csv(std::ostream& out, const ScoreBoard& board);
// Plot-ready long format: category,bot,value.
void write_category_csv(std::ostream& out, const ScoreBoard& board, bool include_placements);

}  // namespace tanksim::tournament
