#include "tanksim/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tanksim/bots.hpp"
#include "tanksim/rng.hpp"

namespace tanksim::tournament {

using engine::BattleEvent;
using engine::EventKind;

int ScoreBoard::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < bots.size(); ++i) {
    if (bots[i].name == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

namespace {

void refresh_total(BotScore& s) {
  s.total_score = s.survival_score + s.last_survivor_bonus + s.bullet_damage +
                  s.bullet_bonus + s.ram_damage;
}

void apply_placements(ScoreBoard& board, const std::vector<int>& placements) {
  if (!placements.empty()) {
    board.bots[placements[0]].firsts++;
  }
  if (placements.size() > 1) {
    board.bots[placements[1]].seconds++;
  }
  if (placements.size() > 2) {
    board.bots[placements[2]].thirds++;
  }
}

}  // namespace

Scorer::Scorer(std::vector<std::string> names) {
  board_.bots.resize(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    board_.bots[i].name = std::move(names[i]);
  }
  reset_round();
}

void Scorer::reset_round() {
  alive_.assign(board_.bots.size(), true);
  pair_damage_.assign(board_.bots.size() * board_.bots.size(), 0.0);
}

void Scorer::score_event(const BattleEvent& event) {
  const std::size_t n = board_.bots.size();
  auto in_range = [n](int i) { return i >= 0 && static_cast<std::size_t>(i) < n; };
  switch (event.kind) {
    case EventKind::BulletHit: {
      if (!in_range(event.actor) || !in_range(event.target)) {
        throw std::invalid_argument("score_event: bullet_hit references unknown bot");
      }
      board_.bots[event.actor].bullet_damage += event.damage;
      pair_damage_[event.actor * n + event.target] += event.damage;
      refresh_total(board_.bots[event.actor]);
      break;
    }
    case EventKind::RobotDeath: {
      if (!in_range(event.actor)) {
        throw std::invalid_argument("score_event: death of unknown bot");
      }
      alive_[event.actor] = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (alive_[i]) {
          board_.bots[i].survival_score += 50.0;
          refresh_total(board_.bots[i]);
        }
      }
      if (in_range(event.target)) {  // credited kill: 20% of the damage dealt
        board_.bots[event.target].bullet_bonus +=
            0.2 * pair_damage_[event.target * n + event.actor];
        refresh_total(board_.bots[event.target]);
      }
      break;
    }
    case EventKind::RoundEnd: {
      int survivor = -1;
      int alive_count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (alive_[i]) {
          ++alive_count;
          survivor = static_cast<int>(i);
        }
      }
      if (alive_count == 1) {
        board_.bots[survivor].last_survivor_bonus += 10.0 * static_cast<double>(n - 1);
        refresh_total(board_.bots[survivor]);
      }
      apply_placements(board_, event.placements);
      reset_round();
      break;
    }
    default:
      break;  // scans, fires, misses, wall hits and faults carry no score
  }
}

ScoreBoard score_log(const std::vector<std::string>& names,
                     const engine::BattleResult& result) {
  const std::size_t n = names.size();
  ScoreBoard board;
  board.bots.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    board.bots[i].name = names[i];
  }
  for (const auto& round : result.rounds) {
    // First pass: per-pair damage and the death list.
    std::vector<double> pair(n * n, 0.0);
    std::vector<std::pair<int, int>> deaths;  // victim, killer
    for (const auto& e : round.events) {
      if (e.kind == EventKind::BulletHit) {
        pair[e.actor * n + e.target] += e.damage;
      } else if (e.kind == EventKind::RobotDeath) {
        deaths.emplace_back(e.actor, e.target);
      }
    }
    // Second pass: apply the rules from the collected facts.
    std::vector<bool> alive(n, true);
    for (const auto& [victim, killer] : deaths) {
      alive[victim] = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) {
          board.bots[i].survival_score += 50.0;
        }
      }
      if (killer >= 0) {
        board.bots[killer].bullet_bonus += 0.2 * pair[killer * n + victim];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        board.bots[i].bullet_damage += pair[i * n + j];
      }
    }
    if (deaths.size() == n - 1) {
      for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) {
          board.bots[i].last_survivor_bonus += 10.0 * static_cast<double>(n - 1);
        }
      }
    }
    apply_placements(board, round.placements);
  }
  for (auto& s : board.bots) {
    refresh_total(s);
  }
  return board;
}

// ---- series -----------------------------------------------------------------

namespace {

// Runs one duel round, replaying mutual destruction with equal damage under a
// derived seed until someone wins. Returns the kept round and the winner.
std::pair<engine::RoundResult, int> duel_round(const engine::BattleConfig& config,
                                               const std::vector<std::string>& roster,
                                               int round_index) {
  for (int attempt = 0;; ++attempt) {
    std::vector<std::unique_ptr<Bot>> bots;
    std::vector<Bot*> raw;
    for (const auto& name : roster) {
      bots.push_back(make_bot(name));
      raw.push_back(bots.back().get());
    }
    const std::uint64_t seed =
        derive_seed(config.seed + 0x10001ULL * static_cast<std::uint64_t>(attempt),
                    static_cast<std::uint64_t>(round_index));
    engine::RoundResult round = engine::run_round(config, roster, raw, seed);
    if (round.survivor >= 0) {
      return {std::move(round), round.survivor};
    }
    if (round.damage_dealt[0] != round.damage_dealt[1]) {
      const int winner = round.damage_dealt[0] > round.damage_dealt[1] ? 0 : 1;
      return {std::move(round), winner};
    }
    if (attempt >= 16) {  // never seen in practice; keep the series finite
      return {std::move(round), 0};
    }
  }
}

engine::RoundResult melee_round(const engine::BattleConfig& config,
                                const std::vector<std::string>& roster, int round_index) {
  std::vector<std::unique_ptr<Bot>> bots;
  std::vector<Bot*> raw;
  for (const auto& name : roster) {
    bots.push_back(make_bot(name));
    raw.push_back(bots.back().get());
  }
  return engine::run_round(config, roster, raw,
                           derive_seed(config.seed, static_cast<std::uint64_t>(round_index)));
}

// Runs `count` independent jobs across up to `jobs` threads; results land in
// index order so the outcome does not depend on the thread count.
template <typename Fn>
void parallel_rounds(int count, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, count);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&next, count, &fn] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

std::vector<std::string> display_names(const std::vector<std::string>& roster) {
  std::vector<std::string> names;
  for (const auto& name : roster) {
    std::string display = std::string(make_bot(name)->name());
    // Mirror matches get an index suffix so report rows stay distinct.
    int copy = 1;
    std::string candidate = display;
    while (std::find(names.begin(), names.end(), candidate) != names.end()) {
      candidate = display + "-" + std::to_string(++copy);
    }
    names.push_back(candidate);
  }
  return names;
}

}  // namespace

SeriesResult run_duel_series(const std::string& bot_a, const std::string& bot_b,
                             const engine::BattleConfig& config, int jobs) {
  const std::vector<std::string> roster{bot_a, bot_b};
  SeriesResult series;
  series.battle.rounds.resize(config.rounds);
  series.round_winner.assign(config.rounds, -1);
  parallel_rounds(config.rounds, jobs, [&](int r) {
    auto [round, winner] = duel_round(config, roster, r);
    series.battle.rounds[r] = std::move(round);
    series.round_winner[r] = winner;
  });
  Scorer scorer(display_names(roster));
  for (const auto& round : series.battle.rounds) {
    for (const auto& event : round.events) {
      scorer.score_event(event);
    }
  }
  series.board = scorer.board();
  for (int winner : series.round_winner) {
    series.board.bots[winner].wins++;
  }
  return series;
}

SeriesResult run_melee(const std::vector<std::string>& roster,
                       const engine::BattleConfig& config, int jobs) {
  if (roster.size() < 3) {
    throw std::invalid_argument("melee needs a roster of at least three");
  }
  SeriesResult series;
  series.battle.rounds.resize(config.rounds);
  parallel_rounds(config.rounds, jobs, [&](int r) {
    series.battle.rounds[r] = melee_round(config, roster, r);
  });
  Scorer scorer(display_names(roster));
  for (const auto& round : series.battle.rounds) {
    for (const auto& event : round.events) {
      scorer.score_event(event);
    }
  }
  series.board = scorer.board();
  series.round_winner.reserve(series.battle.rounds.size());
  for (const auto& round : series.battle.rounds) {
    series.round_winner.push_back(round.placements.empty() ? -1 : round.placements[0]);
  }
  return series;
}

// ---- statistics ---------------------------------------------------------------

std::optional<double> relative_total(double a_score, double b_score) {
  if (!(b_score > 0.0)) {
    return std::nullopt;
  }
  return std::round(a_score / b_score * 100.0) / 100.0;
}

std::vector<int> score_share(const ScoreBoard& board) {
  double sum = 0.0;
  for (const auto& s : board.bots) {
    sum += s.total_score;
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("score_share: all totals are zero");
  }
  std::vector<int> shares;
  shares.reserve(board.bots.size());
  for (const auto& s : board.bots) {
    shares.push_back(static_cast<int>(std::llround(100.0 * s.total_score / sum)));
  }
  return shares;
}

double top3_rate(const BotScore& score, int rounds) {
  if (rounds <= 0) {
    throw std::invalid_argument("top3_rate: rounds must be positive");
  }
  return static_cast<double>(score.firsts + score.seconds + score.thirds) /
         static_cast<double>(rounds);
}

// ---- reference tables ----------------------------------------------------------

ReferenceTables load_reference_tables(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open reference tables '" + path + "'");
  }
  ReferenceTables tables;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) {
      continue;
    }
    auto fail = [&](const char* what) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
    };
    if (tag == "duel") {
      ReferenceDuelRow row;
      if (!(fields >> row.opponent >> row.totals[0] >> row.totals[1] >> row.survival[0] >>
            row.survival[1] >> row.bullet_damage[0] >> row.bullet_damage[1] >>
            row.bullet_bonus[0] >> row.bullet_bonus[1] >> row.wins[0] >> row.wins[1])) {
        fail("malformed duel row");
      }
      tables.duels.push_back(row);
    } else if (tag == "ratio") {
      std::string opponent;
      double value;
      if (!(fields >> opponent >> value)) {
        fail("malformed ratio row");
      }
      bool found = false;
      for (auto& row : tables.duels) {
        if (row.opponent == opponent) {
          row.expected_ratio = value;
          found = true;
        }
      }
      if (!found) {
        fail("ratio row for unknown duel opponent");
      }
    } else if (tag == "melee") {
      ReferenceMeleeRow row;
      if (!(fields >> row.rank >> row.name >> row.total >> row.share_percent >>
            row.survival >> row.bullet_damage >> row.bullet_bonus >> row.firsts >>
            row.seconds >> row.thirds)) {
        fail("malformed melee row");
      }
      tables.melee.push_back(row);
    } else if (tag == "top3") {
      std::string name;
      if (!(fields >> name >> tables.expected_top3_rate)) {
        fail("malformed top3 row");
      }
    } else if (tag == "melee_rounds") {
      if (!(fields >> tables.melee_rounds)) {
        fail("malformed melee_rounds row");
      }
    } else {
      fail("unknown row tag");
    }
  }
  if (tables.duels.empty() || tables.melee.empty()) {
    throw std::runtime_error(path + ": reference tables incomplete");
  }
  return tables;
}

VerifyReport verify_reference_tables(const ReferenceTables& tables) {
  VerifyReport report;
  std::ostringstream line;
  auto check = [&](bool ok, std::ostringstream& text) {
    report.ok = report.ok && ok;
    report.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + text.str());
    text.str("");
  };

  for (const auto& row : tables.duels) {
    const auto ratio = relative_total(row.totals[0], row.totals[1]);
    line << "relative total vs " << row.opponent << ": " << std::fixed
         << std::setprecision(2) << (ratio ? *ratio : 0.0) << " (published "
         << row.expected_ratio << ")";
    check(ratio && std::fabs(*ratio - row.expected_ratio) <= 0.005, line);
  }

  double total_sum = 0.0;
  for (const auto& row : tables.melee) {
    total_sum += row.total;
  }
  for (const auto& row : tables.melee) {
    const double share = 100.0 * row.total / total_sum;
    line << "melee share " << row.name << ": " << std::fixed << std::setprecision(2)
         << share << "% (published " << row.share_percent << "%)";
    check(std::fabs(share - row.share_percent) <= 0.5, line);
  }

  int share_total = 0;
  {
    ScoreBoard board;
    for (const auto& row : tables.melee) {
      BotScore s;
      s.name = row.name;
      s.total_score = row.total;
      board.bots.push_back(s);
    }
    for (int s : score_share(board)) {
      share_total += s;
    }
    line << "melee shares sum to " << share_total << "%";
    check(std::abs(share_total - 100) <= 1, line);
  }

  // Rank order must match the totals.
  bool sorted = true;
  for (std::size_t i = 1; i < tables.melee.size(); ++i) {
    sorted = sorted && tables.melee[i - 1].total >= tables.melee[i].total &&
             tables.melee[i - 1].rank < tables.melee[i].rank;
  }
  line << "melee rank order follows total score";
  check(sorted, line);

  const auto* top = &tables.melee.front();
  BotScore top_score;
  top_score.firsts = top->firsts;
  top_score.seconds = top->seconds;
  top_score.thirds = top->thirds;
  const double rate = top3_rate(top_score, tables.melee_rounds);
  line << "top-3 rate " << top->name << ": " << std::fixed << std::setprecision(2)
       << rate << " (published " << tables.expected_top3_rate << ")";
  check(std::fabs(rate - tables.expected_top3_rate) < 1e-12, line);

  return report;
}

// ---- report writers -------------------------------------------------------------

namespace {

std::string fixed0(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(0) << v;
  return out.str();
}

}  // namespace

void write_duel_table(std::ostream& out, const SeriesResult& series) {
  const auto& bots = series.board.bots;
  out << std::left << std::setw(14) << "Robot Name" << std::right << std::setw(12)
      << "Total Score" << std::setw(10) << "Survival" << std::setw(15) << "Bullet Damage"
      << std::setw(14) << "Bullet Bonus" << std::setw(6) << "WINS" << '\n';
  for (const auto& s : bots) {
    out << std::left << std::setw(14) << s.name << std::right << std::setw(12)
        << fixed0(s.total_score) << std::setw(10) << fixed0(s.survival_score +
                                                            s.last_survivor_bonus)
        << std::setw(15) << fixed0(s.bullet_damage) << std::setw(14)
        << fixed0(s.bullet_bonus) << std::setw(6) << s.wins << '\n';
  }
}

void write_melee_table(std::ostream& out, const SeriesResult& series, int rounds) {
  auto order = series.board.bots;
  std::stable_sort(order.begin(), order.end(),
                   [](const BotScore& a, const BotScore& b) {
                     return a.total_score > b.total_score;
                   });
  ScoreBoard sorted;
  sorted.bots = order;
  const auto shares = score_share(sorted);
  out << std::left << std::setw(6) << "Rank" << std::setw(14) << "Robot Name"
      << std::right << std::setw(18) << "Total Score" << std::setw(10) << "Survival"
      << std::setw(15) << "Bullet Damage" << std::setw(14) << "Bullet Bonus"
      << std::setw(6) << "1sts" << std::setw(6) << "2nds" << std::setw(6) << "3rds"
      << '\n';
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& s = order[i];
    out << std::left << std::setw(6) << (std::to_string(i + 1) +
                                         (i == 0 ? "st" : i == 1 ? "nd" : i == 2 ? "rd" : "th"))
        << std::setw(14) << s.name << std::right << std::setw(18)
        << (fixed0(s.total_score) + " (" + std::to_string(shares[i]) + "%)")
        << std::setw(10) << fixed0(s.survival_score + s.last_survivor_bonus)
        << std::setw(15) << fixed0(s.bullet_damage) << std::setw(14)
        << fixed0(s.bullet_bonus) << std::setw(6) << s.firsts << std::setw(6) << s.seconds
        << std::setw(6) << s.thirds << '\n';
  }
  (void)rounds;
}

void write_scores_csv(std::ostream& out, const ScoreBoard& board) {
  out << "bot,total_score,survival,last_survivor_bonus,bullet_damage,bullet_bonus,"
         "ram_damage,firsts,seconds,thirds,wins\n";
  for (const auto& s : board.bots) {
    out << s.name << ',' << s.total_score << ',' << s.survival_score << ','
        << s.last_survivor_bonus << ',' << s.bullet_damage << ',' << s.bullet_bonus << ','
        << s.ram_damage << ',' << s.firsts << ',' << s.seconds << ',' << s.thirds << ','
        << s.wins << '\n';
  }
}

void write_category_csv(std::ostream& out, const ScoreBoard& board,
                        bool include_placements) {
  out << "category,bot,value\n";
  for (const auto& s : board.bots) {
    out << "total_score," << s.name << ',' << s.total_score << '\n';
    out << "survival," << s.name << ',' << s.survival_score + s.last_survivor_bonus
        << '\n';
    out << "bullet_damage," << s.name << ',' << s.bullet_damage << '\n';
    out << "bullet_bonus," << s.name << ',' << s.bullet_bonus << '\n';
    if (include_placements) {
      out << "firsts," << s.name << ',' << s.firsts << '\n';
      out << "seconds," << s.name << ',' << s.seconds << '\n';
      out << "thirds," << s.name << ',' << s.thirds << '\n';
    } else {
      out << "wins," << s.name << ',' << s.wins << '\n';
    }
  }
}

}  // namespace tanksim::tournament
