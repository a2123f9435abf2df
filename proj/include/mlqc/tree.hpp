#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mlqc/control.hpp"
#include "mlqc/rng.hpp"

// Hybrid decision-tree reliability analysis: a decision process mixing
// deterministic rule nodes (never wrong) and nondeterministic ML nodes that
// err independently with a per-node probability.

namespace mlqc {

enum class NodeKind { deterministic, nondeterministic };

class HybridTree {
 public:
  struct Node {
    NodeKind kind = NodeKind::deterministic;
    double error_prob = 0.0;  // 0 for deterministic nodes
    std::vector<std::size_t> children;
  };

  // Nodes are stored flat; index 0 is the root. Construction checks that
  // children indices form a tree (each non-root node has exactly one parent).
  explicit HybridTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("HybridTree: empty");
    std::vector<int> parents(nodes_.size(), -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (!(n.error_prob >= 0.0 && n.error_prob <= 1.0))
        throw std::invalid_argument("HybridTree: error_prob outside [0,1]");
      if (n.kind == NodeKind::deterministic && n.error_prob != 0.0)
        throw std::invalid_argument(
            "HybridTree: deterministic node with nonzero error_prob");
      for (std::size_t c : n.children) {
        if (c >= nodes_.size() || c == 0)
          throw std::invalid_argument("HybridTree: bad child index");
        if (parents[c] != -1)
          throw std::invalid_argument("HybridTree: node has two parents");
        parents[c] = static_cast<int>(i);
      }
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i)
      if (parents[i] == -1)
        throw std::invalid_argument("HybridTree: unreachable node");
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool is_leaf(std::size_t i) const { return nodes_[i].children.empty(); }

 private:
  std::vector<Node> nodes_;
};

// Probability that every decision along a root-to-leaf path is correct:
// the product of (1 - p_v). Per-node errors are independent.
inline double path_correct_prob(const HybridTree& tree,
                                const std::vector<std::size_t>& path) {
  if (path.empty() || path.front() != 0)
    throw std::invalid_argument("path_correct_prob: path must start at root");
  double prob = 1.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::size_t v = path[i];
    if (v >= tree.size())
      throw std::invalid_argument("path_correct_prob: node out of range");
    if (i + 1 < path.size()) {
      const auto& children = tree.nodes()[v].children;
      bool connected = false;
      for (std::size_t c : children) connected = connected || c == path[i + 1];
      if (!connected)
        throw std::invalid_argument("path_correct_prob: path not connected");
    }
    prob *= 1.0 - tree.nodes()[v].error_prob;
  }
  if (!tree.is_leaf(path.back()))
    throw std::invalid_argument("path_correct_prob: path must end at a leaf");
  return prob;
}

struct WorstPath {
  std::vector<std::size_t> path;
  double correct_prob = 1.0;
};

// The root-to-leaf path an adversary with full knowledge of the error
// probabilities would pick: the one minimizing the correctness product.
// Depth-first, O(nodes); ties resolve to the leftmost child order.
inline WorstPath worst_path(const HybridTree& tree) {
  WorstPath best;
  best.correct_prob = 2.0;  // above any product
  std::vector<std::size_t> stack_path;
  // Explicit DFS; (node, product-so-far) pairs.
  struct Frame {
    std::size_t node;
    std::size_t next_child;
    double prob;
  };
  std::vector<Frame> frames;
  frames.push_back({0, 0, 1.0 - tree.nodes()[0].error_prob});
  stack_path.push_back(0);
  while (!frames.empty()) {
    Frame& f = frames.back();
    const auto& children = tree.nodes()[f.node].children;
    if (children.empty()) {
      if (f.prob < best.correct_prob) {
        best.correct_prob = f.prob;
        best.path = stack_path;
      }
      frames.pop_back();
      stack_path.pop_back();
      continue;
    }
    if (f.next_child == children.size()) {
      frames.pop_back();
      stack_path.pop_back();
      continue;
    }
    const std::size_t child = children[f.next_child++];
    frames.push_back(
        {child, 0, f.prob * (1.0 - tree.nodes()[child].error_prob)});
    stack_path.push_back(child);
  }
  return best;
}

// How simulation trials choose their root-to-leaf path.
struct FixedPathPolicy {
  std::vector<std::size_t> path;
};
struct WorstPathPolicy {};
struct UniformChildPolicy {};  // independent uniform child choice per node

using PathPolicy =
    std::variant<FixedPathPolicy, WorstPathPolicy, UniformChildPolicy>;

struct SimulationResult {
  double correct_rate = 0.0;
  std::size_t trials = 0;
  ControlInterval interval;  // bootstrap interval on the trial outcomes
};

// Monte Carlo walk: per trial, follow the policy's path and flip an error
// coin at each node. Trial i draws from a stream derived from (seed, i).
inline SimulationResult simulate_tree(const HybridTree& tree,
                                      const PathPolicy& policy,
                                      std::size_t trials, std::uint64_t seed,
                                      std::size_t bootstrap_replicates = 1000,
                                      double bootstrap_trim = 0.025) {
  if (trials < 100)
    throw std::invalid_argument("simulate_tree: needs at least 100 trials");
  std::vector<std::size_t> fixed;
  if (const auto* p = std::get_if<FixedPathPolicy>(&policy)) {
    path_correct_prob(tree, p->path);  // validates connectivity
    fixed = p->path;
  } else if (std::holds_alternative<WorstPathPolicy>(policy)) {
    fixed = worst_path(tree).path;
  }

  std::vector<double> outcomes;
  outcomes.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = Rng::derived(seed, i);
    bool correct = true;
    if (!fixed.empty()) {
      for (std::size_t v : fixed)
        if (tree.nodes()[v].error_prob > 0.0 &&
            rng.bernoulli(tree.nodes()[v].error_prob))
          correct = false;
    } else {
      std::size_t v = 0;
      for (;;) {
        if (tree.nodes()[v].error_prob > 0.0 &&
            rng.bernoulli(tree.nodes()[v].error_prob))
          correct = false;
        const auto& children = tree.nodes()[v].children;
        if (children.empty()) break;
        v = children[rng.below(children.size())];
      }
    }
    outcomes.push_back(correct ? 1.0 : 0.0);
  }
  SimulationResult result;
  result.trials = trials;
  double sum = 0.0;
  for (double o : outcomes) sum += o;
  result.correct_rate = sum / static_cast<double>(trials);
  result.interval =
      bootstrap_interval(Sample(outcomes), StatisticSpec::mean(),
                         bootstrap_replicates, bootstrap_trim,
                         Rng::derived(seed, trials).next_u64());
  return result;
}

}  // namespace mlqc
