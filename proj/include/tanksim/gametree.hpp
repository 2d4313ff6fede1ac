#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tanksim/rng.hpp"

namespace tanksim::gametree {

enum class LayerKind { Max, Min };

LayerKind opposite(LayerKind k);
const char* to_string(LayerKind k);

// A node holds either children (internal) or a payoff (leaf), never both.
// Layer kinds alternate between parent and child on every root-to-leaf path.
struct TreeNode {
  std::string id;
  LayerKind kind = LayerKind::Max;
  std::vector<std::string> children;  // expansion order is significant
  std::optional<double> leaf_value;
};

struct GameTree {
  std::string root;
  std::map<std::string, TreeNode> nodes;
  std::string name;
};

// Raised for cycles, shared nodes, valueless leaves, kind violations and the
// like; the message names the offending node.
struct TreeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Validates the GameTree invariants, throwing TreeError on the first
// violation. Returns the total node count reachable from the root.
std::size_t validate_tree(const GameTree& tree);

struct SearchWindow {
  double alpha;
  double beta;
};

struct SearchResult {
  double value = 0.0;
  std::optional<std::string> principal_child;  // absent for leaf-only trees
  std::size_t visited = 0;  // nodes evaluated
  std::size_t pruned = 0;   // subtrees cut before expansion
};

// Exhaustive minimax. visited equals the total node count and pruned is zero;
// this is the oracle the pruning search is checked against.
SearchResult minimax_value(const GameTree& tree);

// Alpha-beta with children expanded strictly in stored order. The value
// always equals the minimax value; the principal child is the first root
// child attaining it (lowest index on ties).
SearchResult alphabeta_value(const GameTree& tree);

// Named example trees. The duel walkthrough tree backs up to 30; the three
// ordering studies back up to 100 (ascending), 100 (descending) and 160
// (single_branch_max) with distinct pruned counts. The same trees are checked
// in under data/fixtures/ in the text format below.
GameTree build_fixture(const std::string& name);
std::vector<std::string> fixture_names();

// Plain-text tree description, one node per line:
//   <id> <MAX|MIN> <parent-id|-> [leaf-value]
// '-' marks the root; parents must be declared before their children; '#'
// starts a comment. See docs/file-formats.md.
GameTree parse_tree_text(const std::string& text, const std::string& name);
GameTree load_tree_file(const std::string& path);
std::string format_tree(const GameTree& tree);

// Builds the alternating decision tree over the candidate radii (one leaf per
// candidate, in order, valued by `payoff`), runs alpha-beta and returns the
// radius at the end of the principal variation. The tree has `depth` plies;
// branching per level is as even as possible, so nine candidates at depth 3
// reproduce the duel walkthrough topology.
double choose_radius(const std::vector<double>& candidates,
                     const std::function<double(double)>& payoff, int depth,
                     LayerKind root_kind = LayerKind::Min);

// Seeded random tree for oracle-equivalence tests: depth <= max_depth,
// branching <= max_branching, leaves drawn from the nine candidate radii.
GameTree random_tree(Rng& rng, int max_depth, int max_branching);

// The nine path radii used throughout: 20,30,40,70,80,100,120,140,160.
const std::vector<double>& path_radii();

}  // namespace tanksim::gametree
