#pragma once

// Tree-size estimation by sampling a subtree.
//
// Levels are expanded in full while they hold fewer than
// `full_width_threshold` nodes. From the first wider level l on, only a
// uniform sample of s_k nodes is bounded and branched; the r_k active ones
// yield the 2 r_k carried nodes of the next level, and the level sizes are
// extrapolated as t^_{k+1} = (2 r_k / s_k) t^_k with t^_l = t_l.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qapbb/bb.hpp"

namespace qapbb {

struct EstimatorConfig {
  double target = 0;
  BounderSpec bounder{"spectral", {}};
  std::uint64_t full_width_threshold = 1000;
  std::uint64_t sample_size = 100;
  /// Levels with at least this many carried nodes are sampled down to
  /// `sample_size`; smaller ones are taken whole.
  std::uint64_t sample_cutoff = 500;
  std::uint64_t seed = 0;
  std::uint64_t max_nodes = 10'000'000;
  int max_depth = 1'000'000;
  int workers = 1;
  ScoreRule rule = ScoreRule::reduced_uniform;
  std::optional<NodeKey> start;
};

struct SampledDepth {
  int depth = 0;
  std::uint64_t carried = 0;  // t-bar_k
  std::uint64_t sampled = 0;  // s_k
  std::uint64_t active = 0;   // r_k
  double estimate = 0;        // t^_k
  double rate() const noexcept {
    return sampled == 0 ? 0.0 : 2.0 * static_cast<double>(active) / static_cast<double>(sampled);
  }
};

struct EstimatorReport {
  double target = 0;
  std::string bounder;
  std::uint64_t seed = 0;
  /// First sampled depth; empty when every level stayed narrow, in which
  /// case the total is the exact node count.
  std::optional<int> switch_depth;
  /// t_0 .. t_{l-1}, counted exactly (the root is depth 0).
  std::vector<std::uint64_t> exact_counts;
  std::vector<SampledDepth> sampled;
  double total_estimate = 0;
  /// Nodes actually bounded or evaluated.
  std::uint64_t expanded_nodes = 0;
  bool budget_exhausted = false;
};

/// Throws invalid_argument on an invalid configuration.
EstimatorReport estimate(const CardBqop& bqop, const PermutationGroup& group,
                         const EstimatorConfig& config);

/// Uniform integer in [0, bound) by rejection from a 64-bit Mersenne twister,
/// so the stream does not depend on the standard library's distributions.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// `count` distinct indices of [0, population), ascending, via a partial
/// Fisher-Yates shuffle.
std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t population,
                                        std::size_t count);

}  // namespace qapbb
