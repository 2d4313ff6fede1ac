#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tanksim/bots.hpp"
#include "tanksim/engine.hpp"
#include "tanksim/gametree.hpp"
#include "tanksim/tournament.hpp"

namespace fs = std::filesystem;
using namespace tanksim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) {
      out.push_back(',');
    }
    out += n;
  }
  return out;
}

struct RunSpec {
  std::string mode;
  std::vector<std::string> roster;
  int rounds = 30;
  std::uint64_t seed = 1;
  std::string config_path;
  std::string tables_path = "data/reference_tables.txt";
  std::string out_dir;
  int jobs = 1;
};

class FileSet {
 public:
  explicit FileSet(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + (dir_ / name).string());
    }
    out << content;
    hashes_.emplace_back(name, hex64(fnv1a64(content)));
  }

  const std::vector<std::pair<std::string, std::string>>& hashes() const {
    return hashes_;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> hashes_;
};

// config echo + run parameters + artifact hashes; loadable via --config.
std::string manifest_text(const RunSpec& spec, const engine::BattleConfig& config,
                          const FileSet& files) {
  std::string out;
  out += "mode=" + spec.mode + "\n";
  out += "bots=" + join_names(spec.roster) + "\n";
  out += "jobs=" + std::to_string(spec.jobs) + "\n";
  out += engine::config_to_text(config);
  for (const auto& [name, hash] : files.hashes()) {
    out += "hash." + name + "=" + hash + "\n";
  }
  return out;
}

int cmd_duel(const RunSpec& spec, const engine::BattleConfig& config) {
  if (spec.roster.size() != 2) {
    std::cerr << "duel mode needs exactly two bots (--bots A,B)\n";
    return kExitUsage;
  }
  const auto series =
      tournament::run_duel_series(spec.roster[0], spec.roster[1], config, spec.jobs);

  fs::create_directories(spec.out_dir);
  FileSet files((fs::path(spec.out_dir)));
  std::ostringstream table;
  tournament::write_duel_table(table, series);
  files.write("scores.txt", table.str());
  std::ostringstream csv;
  tournament::write_scores_csv(csv, series.board);
  files.write("scores.csv", csv.str());
  files.write("events.log", engine::serialize_log(series.battle));
  std::ostringstream hist;
  tournament::write_category_csv(hist, series.board, /*include_placements=*/false);
  files.write("hist.csv", hist.str());
  files.write("manifest.txt", manifest_text(spec, config, files));

  std::cout << table.str();
  std::cout << "wrote " << spec.out_dir << "\n";
  return kExitOk;
}

int cmd_melee(const RunSpec& spec, const engine::BattleConfig& config) {
  if (spec.roster.size() < 3) {
    std::cerr << "melee mode needs at least three bots\n";
    return kExitUsage;
  }
  const auto series = tournament::run_melee(spec.roster, config, spec.jobs);

  fs::create_directories(spec.out_dir);
  FileSet files((fs::path(spec.out_dir)));
  std::ostringstream table;
  tournament::write_melee_table(table, series, config.rounds);
  files.write("scores.txt", table.str());
  std::ostringstream csv;
  tournament::write_scores_csv(csv, series.board);
  files.write("scores.csv", csv.str());
  files.write("events.log", engine::serialize_log(series.battle));
  std::ostringstream radar;
  tournament::write_category_csv(radar, series.board, /*include_placements=*/true);
  files.write("radar.csv", radar.str());
  files.write("manifest.txt", manifest_text(spec, config, files));

  std::cout << table.str();
  std::cout << "wrote " << spec.out_dir << "\n";
  return kExitOk;
}

int cmd_fixtures() {
  const std::vector<std::pair<std::string, double>> expected{
      {"main", 30.0},
      {"ascending", 100.0},
      {"descending", 100.0},
      {"single_branch_max", 160.0},
  };
  bool ok = true;
  std::string values;
  std::string pruned;
  for (const auto& [name, want] : expected) {
    const auto tree = gametree::build_fixture(name);
    const auto result = gametree::alphabeta_value(tree);
    ok = ok && result.value == want;
    values += (values.empty() ? "" : " ") + name + "=" +
              std::to_string(static_cast<int>(result.value));
    pruned += (pruned.empty() ? "" : " ") + name + "=" + std::to_string(result.pruned);
  }
  std::cout << values << "\n";
  std::cout << "pruned subtrees: " << pruned << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_verify_tables(const RunSpec& spec) {
  tournament::ReferenceTables tables;
  try {
    tables = tournament::load_reference_tables(spec.tables_path);
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << "\n";
    return kExitData;
  }
  const auto report = tournament::verify_reference_tables(tables);
  for (const auto& line : report.lines) {
    std::cout << line << "\n";
  }
  return report.ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tank duel and melee tournament runner"};
  RunSpec spec;
  std::string bots_csv;
  bool have_rounds = false, have_seed = false;

  app.add_option("--mode", spec.mode, "duel | melee | fixtures | verify-tables");
  app.add_option("--bots", bots_csv, "comma-separated roster names");
  app.add_option("--rounds", spec.rounds, "rounds per series (default 30)")
      ->each([&](const std::string&) { have_rounds = true; });
  app.add_option("--seed", spec.seed, "base battle seed")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_option("--config", spec.config_path, "key=value config file or manifest");
  app.add_option("--tables", spec.tables_path,
                 "reference tables file (verify-tables mode)");
  app.add_option("--out", spec.out_dir, "output directory (default ./out)");
  app.add_option("--jobs", spec.jobs, "parallel battles (output is identical)");

  CLI11_PARSE(app, argc, argv);

  try {
    engine::BattleConfig config;
    if (!spec.config_path.empty()) {
      std::map<std::string, std::string> kv;
      try {
        kv = engine::parse_key_values(spec.config_path);
        config = engine::config_from_map(kv);
      } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return kExitIo;
      }
      if (spec.mode.empty() && kv.count("mode")) {
        spec.mode = kv.at("mode");
      }
      if (bots_csv.empty() && kv.count("bots")) {
        bots_csv = kv.at("bots");
      }
    }
    if (have_rounds) {
      config.rounds = spec.rounds;
    }
    if (have_seed) {
      config.seed = spec.seed;
    }
    spec.rounds = config.rounds;
    spec.seed = config.seed;

    if (spec.out_dir.empty()) {
      const char* env = std::getenv("TANKSIM_OUT");
      spec.out_dir = env ? env : "out";
    }

    if (bots_csv.empty()) {
      bots_csv = spec.mode == "melee" ? join_names(bot_names()) : "TestRobot,Crazy";
    }
    spec.roster = split_names(bots_csv);
    if (spec.mode == "duel" || spec.mode == "melee") {
      for (const auto& name : spec.roster) {
        try {
          make_bot(name);
        } catch (const std::exception&) {
          std::cerr << "unknown bot '" << name << "'; valid names:";
          for (const auto& known : bot_names()) {
            std::cerr << ' ' << known;
          }
          std::cerr << "\n";
          return kExitUsage;
        }
      }
    }

    if (spec.mode == "duel") {
      return cmd_duel(spec, config);
    }
    if (spec.mode == "melee") {
      return cmd_melee(spec, config);
    }
    if (spec.mode == "fixtures") {
      return cmd_fixtures();
    }
    if (spec.mode == "verify-tables") {
      return cmd_verify_tables(spec);
    }
    std::cerr << "unknown mode '" << spec.mode << "'\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& ex) {
    std::cerr << ex.what() << "\n";
    return kExitIo;
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << "\n";
    return kExitIo;
  }
}
