#include "tanksim/gametree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tanksim::gametree {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

LayerKind opposite(LayerKind k) {
  return k == LayerKind::Max ? LayerKind::Min : LayerKind::Max;
}

const char* to_string(LayerKind k) { return k == LayerKind::Max ? "MAX" : "MIN"; }

const std::vector<double>& path_radii() {
  static const std::vector<double> radii{20, 30, 40, 70, 80, 100, 120, 140, 160};
  return radii;
}

std::size_t validate_tree(const GameTree& tree) {
  const auto it = tree.nodes.find(tree.root);
  if (it == tree.nodes.end()) {
    throw TreeError("tree '" + tree.name + "': root node '" + tree.root + "' missing");
  }
  std::size_t seen = 0;
  std::vector<const TreeNode*> stack{&it->second};
  std::map<std::string, bool> visited;
  while (!stack.empty()) {
    const TreeNode* node = stack.back();
    stack.pop_back();
    if (visited[node->id]) {
      throw TreeError("node '" + node->id + "' reached twice (cycle or shared child)");
    }
    visited[node->id] = true;
    ++seen;
    const bool has_children = !node->children.empty();
    const bool has_value = node->leaf_value.has_value();
    if (has_children == has_value) {
      throw TreeError("node '" + node->id +
                      "' must have exactly one of children or a leaf value");
    }
    if (has_value && !std::isfinite(*node->leaf_value)) {
      throw TreeError("leaf '" + node->id + "' has a non-finite value");
    }
    for (const auto& child_id : node->children) {
      const auto child_it = tree.nodes.find(child_id);
      if (child_it == tree.nodes.end()) {
        throw TreeError("node '" + node->id + "' references unknown child '" + child_id +
                        "'");
      }
      if (child_it->second.kind != opposite(node->kind)) {
        throw TreeError("child '" + child_id + "' does not alternate layer kind under '" +
                        node->id + "'");
      }
      stack.push_back(&child_it->second);
    }
  }
  if (seen != tree.nodes.size()) {
    for (const auto& [id, node] : tree.nodes) {
      if (!visited[id]) {
        throw TreeError("node '" + id + "' unreachable from root");
      }
    }
  }
  return seen;
}

namespace {

const TreeNode& node_at(const GameTree& tree, const std::string& id) {
  return tree.nodes.at(id);
}

double minimax_node(const GameTree& tree, const TreeNode& node, std::size_t& visited) {
  ++visited;
  if (node.leaf_value) {
    return *node.leaf_value;
  }
  double value = node.kind == LayerKind::Max ? -kInf : kInf;
  for (const auto& child_id : node.children) {
    const double v = minimax_node(tree, node_at(tree, child_id), visited);
    if (node.kind == LayerKind::Max) {
      value = std::max(value, v);
    } else {
      value = std::min(value, v);
    }
  }
  return value;
}

double alphabeta_node(const GameTree& tree, const TreeNode& node, SearchWindow window,
                      std::size_t& visited, std::size_t& pruned,
                      std::string* principal_child) {
  assert(window.alpha <= window.beta);
  ++visited;
  if (node.leaf_value) {
    return *node.leaf_value;
  }
  const bool maximizing = node.kind == LayerKind::Max;
  double value = maximizing ? -kInf : kInf;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const double v = alphabeta_node(tree, node_at(tree, node.children[i]), window, visited,
                                    pruned, nullptr);
    if (maximizing ? v > value : v < value) {
      value = v;
      if (principal_child) {
        *principal_child = node.children[i];
      }
    }
    if (maximizing) {
      window.alpha = std::max(window.alpha, value);
    } else {
      window.beta = std::min(window.beta, value);
    }
    if (window.alpha >= window.beta) {
      pruned += node.children.size() - i - 1;
      break;
    }
  }
  return value;
}

}  // namespace

SearchResult minimax_value(const GameTree& tree) {
  validate_tree(tree);
  const TreeNode& root = node_at(tree, tree.root);
  SearchResult result;
  result.value = minimax_node(tree, root, result.visited);
  if (!root.children.empty()) {
    // First child attaining the backed-up value.
    for (const auto& child_id : root.children) {
      std::size_t scratch = 0;
      if (minimax_node(tree, node_at(tree, child_id), scratch) == result.value) {
        result.principal_child = child_id;
        break;
      }
    }
  }
  return result;
}

SearchResult alphabeta_value(const GameTree& tree) {
  validate_tree(tree);
  const TreeNode& root = node_at(tree, tree.root);
  SearchResult result;
  std::string principal;
  result.value = alphabeta_node(tree, root, {-kInf, kInf}, result.visited, result.pruned,
                                &principal);
  if (!root.children.empty()) {
    result.principal_child = principal;
  }
  return result;
}

namespace {

// ---- fixtures -------------------------------------------------------------
//
// The figures these trees come from are not available; the trees below are
// reconstructions committed as data, chosen so that every intermediate value
// the accompanying walkthrough states is reproduced: the first MIN node over
// {30, 40} backs up 30, the single-child node holds 20, {80, 70} backs up 70
// with the cutoff at alpha=70/beta=30 above it, and the duel tree roots at 30.
// The ordering studies back up to 100, 100 and 160 with pruned subtree counts
// 1, 2 and 3.

constexpr const char* kMainTree = R"(# Duel walkthrough tree; backs up to 30.
root MIN -
c1 MAX root
b1 MIN c1
v1 MAX b1 30
v2 MAX b1 40
b2 MIN c1
v3 MAX b2 20
c2 MAX root
b3 MIN c2
v4 MAX b3 80
v5 MAX b3 70
b4 MIN c2
v6 MAX b4 160
c3 MAX root
b5 MIN c3
v7 MAX b5 120
v8 MAX b5 100
b6 MIN c3
v9 MAX b6 140
)";

constexpr const char* kAscendingTree = R"(# Leaves nondecreasing left to right; backs up to 100.
root MIN -
d1 MAX root
c1 MIN d1
b1 MAX c1
v1 MIN b1 20
v2 MIN b1 30
b2 MAX c1
v3 MIN b2 40
c2 MIN d1
b3 MAX c2
v4 MIN b3 70
v5 MIN b3 80
c3 MIN d1
b4 MAX c3
v6 MIN b4 100
d2 MAX root
c4 MIN d2
b5 MAX c4
v7 MIN b5 120
v8 MIN b5 140
b6 MAX c4
v9 MIN b6 160
)";

constexpr const char* kDescendingTree = R"(# Leaves nonincreasing left to right; backs up to 100.
root MAX -
d1 MIN root
c1 MAX d1
b1 MIN c1
v1 MAX b1 160
v2 MAX b1 140
b2 MIN c1
v3 MAX b2 120
c2 MAX d1
b3 MIN c2
v4 MAX b3 100
d2 MIN root
c3 MAX d2
b4 MIN c3
v5 MAX b4 80
v6 MAX b4 70
b5 MIN c3
v7 MAX b5 40
c4 MAX d2
b6 MIN c4
v8 MAX b6 30
v9 MAX b6 20
)";

constexpr const char* kSingleBranchMaxTree =
    R"(# Left branch is a single chain to the largest leaf; backs up to 160.
root MAX -
d1 MIN root
c1 MAX d1
b1 MIN c1
v1 MAX b1 160
d2 MIN root
c2 MAX d2
b2 MIN c2
v2 MAX b2 20
v3 MAX b2 30
b3 MIN c2
v4 MAX b3 40
c3 MAX d2
b4 MIN c3
v5 MAX b4 70
v6 MAX b4 80
b5 MIN c3
v7 MAX b5 100
c4 MAX d2
b6 MIN c4
v8 MAX b6 120
v9 MAX b6 140
)";

}  // namespace

std::vector<std::string> fixture_names() {
  return {"main", "ascending", "descending", "single_branch_max"};
}

GameTree build_fixture(const std::string& name) {
  if (name == "main") {
    return parse_tree_text(kMainTree, name);
  }
  if (name == "ascending") {
    return parse_tree_text(kAscendingTree, name);
  }
  if (name == "descending") {
    return parse_tree_text(kDescendingTree, name);
  }
  if (name == "single_branch_max") {
    return parse_tree_text(kSingleBranchMaxTree, name);
  }
  throw TreeError("unknown fixture '" + name + "'");
}

GameTree parse_tree_text(const std::string& text, const std::string& name) {
  GameTree tree;
  tree.name = name;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string id, kind_str, parent;
    if (!(fields >> id)) {
      continue;  // blank or comment-only line
    }
    if (!(fields >> kind_str >> parent)) {
      throw TreeError(name + ":" + std::to_string(line_no) + ": expected 'id kind parent'");
    }
    TreeNode node;
    node.id = id;
    if (kind_str == "MAX") {
      node.kind = LayerKind::Max;
    } else if (kind_str == "MIN") {
      node.kind = LayerKind::Min;
    } else {
      throw TreeError(name + ":" + std::to_string(line_no) + ": bad kind '" + kind_str +
                      "'");
    }
    double value;
    if (fields >> value) {
      node.leaf_value = value;
    }
    if (tree.nodes.count(id)) {
      throw TreeError(name + ":" + std::to_string(line_no) + ": duplicate node '" + id +
                      "'");
    }
    if (parent == "-") {
      if (!tree.root.empty()) {
        throw TreeError(name + ":" + std::to_string(line_no) + ": second root '" + id +
                        "'");
      }
      tree.root = id;
    } else {
      auto parent_it = tree.nodes.find(parent);
      if (parent_it == tree.nodes.end()) {
        throw TreeError(name + ":" + std::to_string(line_no) + ": parent '" + parent +
                        "' not declared before '" + id + "'");
      }
      parent_it->second.children.push_back(id);
    }
    tree.nodes.emplace(id, std::move(node));
  }
  if (tree.root.empty()) {
    throw TreeError(name + ": no root node");
  }
  validate_tree(tree);
  return tree;
}

GameTree load_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw TreeError("cannot open tree file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto slash = path.find_last_of('/');
  return parse_tree_text(buffer.str(), slash == std::string::npos ? path
                                                                  : path.substr(slash + 1));
}

namespace {

void format_node(const GameTree& tree, const std::string& id, const std::string& parent,
                 std::ostringstream& out) {
  const TreeNode& node = node_at(tree, id);
  out << id << ' ' << to_string(node.kind) << ' ' << (parent.empty() ? "-" : parent);
  if (node.leaf_value) {
    out << ' ' << *node.leaf_value;
  }
  out << '\n';
  for (const auto& child : node.children) {
    format_node(tree, child, id, out);
  }
}

}  // namespace

std::string format_tree(const GameTree& tree) {
  std::ostringstream out;
  format_node(tree, tree.root, "", out);
  return out.str();
}

namespace {

// Splits `count` leaves across ceil(count^(1/plies)) branches per level, as
// evenly as possible. Nine leaves over three plies come out 3 x (2,1).
void build_template(GameTree& tree, const std::string& id, LayerKind kind,
                    const std::vector<double>& candidates,
                    const std::function<double(double)>& payoff, std::size_t lo,
                    std::size_t hi, int plies,
                    std::map<std::string, double>* leaf_radius) {
  TreeNode node;
  node.id = id;
  node.kind = kind;
  const std::size_t count = hi - lo;
  if (plies == 0) {
    node.leaf_value = payoff(candidates[lo]);
    (*leaf_radius)[id] = candidates[lo];
    tree.nodes.emplace(id, std::move(node));
    return;
  }
  std::size_t groups;
  if (plies == 1) {
    groups = count;
  } else {
    groups = static_cast<std::size_t>(
        std::ceil(std::pow(static_cast<double>(count), 1.0 / plies) - 1e-12));
    groups = std::clamp<std::size_t>(groups, 1, count);
  }
  std::size_t start = lo;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = count / groups + (g < count % groups ? 1 : 0);
    const std::string child_id = id + "." + std::to_string(g);
    node.children.push_back(child_id);
    build_template(tree, child_id, opposite(kind), candidates, payoff, start, start + size,
                   plies - 1, leaf_radius);
    start += size;
  }
  tree.nodes.emplace(id, std::move(node));
}

}  // namespace

double choose_radius(const std::vector<double>& candidates,
                     const std::function<double(double)>& payoff, int depth,
                     LayerKind root_kind) {
  if (candidates.empty()) {
    throw std::invalid_argument("choose_radius: empty candidate list");
  }
  if (depth < 1) {
    throw std::invalid_argument("choose_radius: depth must be >= 1");
  }
  GameTree tree;
  tree.name = "radius-selection";
  tree.root = "n";
  std::map<std::string, double> leaf_radius;
  build_template(tree, "n", root_kind, candidates, payoff, 0, candidates.size(), depth,
                 &leaf_radius);
  alphabeta_value(tree);  // asserts well-formedness; value drives the walk below

  // Follow the principal variation (first child attaining each node's exact
  // value) down to a leaf and report that candidate.
  std::string id = tree.root;
  while (!node_at(tree, id).children.empty()) {
    const TreeNode& node = node_at(tree, id);
    std::size_t scratch = 0;
    const double value = minimax_node(tree, node, scratch);
    for (const auto& child : node.children) {
      scratch = 0;
      if (minimax_node(tree, node_at(tree, child), scratch) == value) {
        id = child;
        break;
      }
    }
  }
  return leaf_radius.at(id);
}

GameTree random_tree(Rng& rng, int max_depth, int max_branching) {
  GameTree tree;
  tree.name = "random";
  tree.root = "n";
  const auto& radii = path_radii();
  int counter = 0;
  const LayerKind root_kind = rng.next_below(2) ? LayerKind::Max : LayerKind::Min;

  struct Frame {
    std::string id;
    LayerKind kind;
    int depth;
  };
  std::vector<Frame> stack{{tree.root, root_kind, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    TreeNode node;
    node.id = f.id;
    node.kind = f.kind;
    const bool leaf = f.depth >= max_depth || (f.depth > 0 && rng.next_below(100) < 30);
    if (leaf) {
      node.leaf_value = radii[rng.next_below(radii.size())];
    } else {
      const int kids = rng.next_int(1, max_branching);
      for (int i = 0; i < kids; ++i) {
        std::string child_id = "n" + std::to_string(++counter);
        node.children.push_back(child_id);
        stack.push_back({std::move(child_id), opposite(f.kind), f.depth + 1});
      }
    }
    tree.nodes.emplace(f.id, std::move(node));
  }
  return tree;
}

}  // namespace tanksim::gametree
