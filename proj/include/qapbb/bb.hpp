#pragma once

// Target-lower-bound branch and bound with orbit branching.
//
// The search never looks for better solutions. It tries to show that every
// feasible x has objective >= target: nodes whose bound reaches the target
// are pruned, the rest are split on an orbit of their symmetry group, and a
// completed leaf below the target refutes the claim.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qapbb/bounding.hpp"
#include "qapbb/subproblem.hpp"
#include "qapbb/symmetry.hpp"

namespace qapbb {

// Orbit scoring ----------------------------------------------------------------

/// How the "average objective" of a node is approximated, with c = m'/|F|:
///  - reduced_uniform: offset + y^T B(I0,I1) y at y = c e (default; the
///    diagonal of B(I0,I1) is weighted by c^2),
///  - literal: x^T B x with x = 1 on I1 and c on F,
///  - exact_average: the true mean over all feasible completions.
enum class ScoreRule { reduced_uniform, literal, exact_average };

/// Exact rational numerator / denominator (denominator > 0).
struct NodeScore {
  __int128 numerator = 0;
  __int128 denominator = 1;

  double value() const noexcept {
    return static_cast<double>(static_cast<long double>(numerator) /
                               static_cast<long double>(denominator));
  }
  friend bool operator<(const NodeScore& x, const NodeScore& y) noexcept {
    return x.numerator * y.denominator < y.numerator * x.denominator;
  }
  friend bool operator==(const NodeScore& x, const NodeScore& y) noexcept {
    return x.numerator * y.denominator == y.numerator * x.denominator;
  }
};

/// Precomputed sums for scoring a node and its one-more-fixed-to-1 children.
class ScoreContext {
 public:
  ScoreContext(const CardBqop& bqop, const NodeKey& key, ScoreRule rule);

  /// Score of the node itself. Throws infeasible_node.
  NodeScore node() const;
  /// Score of the node with free variable j additionally fixed to 1.
  NodeScore with_one(int j) const;

 private:
  struct Sums {
    __int128 fixed = 0;       // sum over I1 x I1
    __int128 cross = 0;       // sum over I1 x F
    __int128 free_total = 0;  // sum over F x F
    __int128 free_trace = 0;  // sum of B_ii, i in F
    int ones = 0;
    int free = 0;
  };
  NodeScore evaluate(const Sums& s) const;

  const CardBqop& bqop_;
  ScoreRule rule_;
  Sums sums_;
  std::vector<__int128> row_free_;  // sum_{i in F} B_ji
  std::vector<__int128> row_ones_;  // sum_{k in I1} B_kj
};

double score_node_average(const CardBqop& bqop, const NodeKey& key,
                          ScoreRule rule = ScoreRule::reduced_uniform);

/// Index of the orbit o maximizing the score of (I0, I1 + {min o}); ties go
/// to the smallest representative. Throws invalid_argument on an empty set.
std::size_t select_orbit(const CardBqop& bqop, const NodeKey& key, const OrbitSet& orbit_set,
                         ScoreRule rule = ScoreRule::reduced_uniform);

/// Orbits of the free variables under `group` (the node's stabilizer).
OrbitSet free_orbits(const PermutationGroup& group, const NodeKey& key);

/// (I0 + orbit, I1) and (I0, I1 + {min orbit}).
std::pair<NodeKey, NodeKey> branch(const NodeKey& key, std::span<const int> orbit);

// Node expansion ------------------------------------------------------------------

enum class NodeStatus { infeasible, leaf, refuted, pruned, active };

/// Result of processing one node; pure function of its inputs.
struct NodeExpansion {
  NodeStatus status = NodeStatus::infeasible;
  /// Leaf and refuted nodes: the forced completion and its value.
  Value leaf_value = 0;
  BinaryVector completion;
  /// Pruned and active nodes.
  Verdict verdict;
  /// Active nodes: chosen orbit size, children, and the group of child 1
  /// (child 0 keeps the parent's group).
  int orbit_size = 0;
  std::optional<std::pair<NodeKey, NodeKey>> children;
  std::shared_ptr<const PermutationGroup> child_one_group;
};

struct ExpansionContext {
  const CardBqop& bqop;
  const Bounder& bounder;
  double target = 0;
  ScoreRule rule = ScoreRule::reduced_uniform;
};

NodeExpansion expand_node(const ExpansionContext& ctx, const NodeKey& key,
                          const std::shared_ptr<const PermutationGroup>& group);

// Certification -------------------------------------------------------------------

struct BbConfig {
  double target = 0;
  BounderSpec bounder{"spectral", {}};
  std::uint64_t max_nodes = 10'000'000;
  int max_depth = 1'000'000;
  int workers = 1;
  ScoreRule rule = ScoreRule::reduced_uniform;
  /// Nodes of one level kept in memory before spilling to disk.
  std::size_t memory_nodes = 1'000'000;
  /// Nodes handed to the worker pool at a time.
  std::size_t batch_size = 4096;
  /// Start below the root. The group is then restricted to the setwise
  /// stabilizer of the fixed sets.
  std::optional<NodeKey> start;
};

enum class Outcome { certified, refuted, budget_exhausted };

struct DepthStats {
  std::uint64_t nodes = 0;
  std::uint64_t infeasible = 0;
  std::uint64_t leaves = 0;
  std::uint64_t refuted = 0;
  std::uint64_t pruned = 0;
  std::uint64_t active = 0;
  std::uint64_t degraded = 0;
  /// Branched nodes by size of the chosen orbit.
  std::map<int, std::uint64_t> orbit_sizes;
};

/// Terminal bracket values grouped by the step q at which the bounder
/// stopped, separately for pruned and active nodes.
struct TerminationStats {
  std::uint64_t count = 0;
  double sum_a = 0;
  double sum_b = 0;
};

struct BbReport {
  Outcome outcome = Outcome::budget_exhausted;
  double target = 0;
  std::string bounder;
  std::optional<BinaryVector> witness;
  Value witness_value = 0;
  std::vector<DepthStats> depths;
  std::map<int, TerminationStats> pruned_by_step;
  std::map<int, TerminationStats> active_by_step;
  std::uint64_t bound_calls = 0;
  std::uint64_t bracket_steps = 0;
  std::uint64_t spilled_nodes = 0;

  std::uint64_t total_nodes() const noexcept;
  std::uint64_t count(NodeStatus status) const noexcept;
};

/// Breadth-first search from the root. Certified iff the frontier empties
/// without a refuting leaf; budget exhaustion never reports Certified.
BbReport certify(const CardBqop& bqop, const BbConfig& config, const PermutationGroup& group);

/// Runs `fn(i)` for i in [0, count) on `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace qapbb
