#include "qapbb/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "qapbb/error.hpp"

namespace qapbb {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::invalid_argument, "empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t population,
                                        std::size_t count) {
  if (count > population) throw Error(Errc::invalid_argument, "sample larger than population");
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + uniform_below(rng, population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

struct Carried {
  NodeKey key;
  std::shared_ptr<const PermutationGroup> group;
};

void validate(const EstimatorConfig& cfg) {
  if (!std::isfinite(cfg.target)) throw Error(Errc::invalid_argument, "target must be finite");
  if (cfg.full_width_threshold == 0 || cfg.sample_size == 0 || cfg.sample_cutoff == 0) {
    throw Error(Errc::invalid_argument, "estimator thresholds must be positive");
  }
  if (cfg.sample_size > cfg.full_width_threshold) {
    throw Error(Errc::invalid_argument, "sample size exceeds the full-width threshold");
  }
  if (cfg.max_nodes == 0 || cfg.max_depth < 0 || cfg.workers < 1) {
    throw Error(Errc::invalid_argument, "search budgets must be positive");
  }
}

/// Expands `nodes`, returns the number of active ones and their children.
std::uint64_t expand_level(const ExpansionContext& ctx, const std::vector<Carried>& nodes,
                           int workers, std::vector<Carried>& children) {
  std::vector<NodeExpansion> results(nodes.size());
  parallel_for(nodes.size(), workers, [&](std::size_t i) {
    results[i] = expand_node(ctx, nodes[i].key, nodes[i].group);
  });
  children.clear();
  std::uint64_t active = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& r = results[i];
    if (r.status != NodeStatus::active) continue;
    ++active;
    children.push_back({std::move(r.children->first), nodes[i].group});
    children.push_back({std::move(r.children->second), r.child_one_group});
  }
  return active;
}

}  // namespace

EstimatorReport estimate(const CardBqop& bqop, const PermutationGroup& group,
                         const EstimatorConfig& config) {
  validate(config);
  const int n = bqop.size();
  if (group.degree() != n) throw Error(Errc::dimension_mismatch, "group degree differs from n");

  EstimatorReport report;
  report.target = config.target;
  report.bounder = config.bounder.to_string();
  report.seed = config.seed;
  const auto bounder = make_bounder(config.bounder);
  const ExpansionContext ctx{bqop, *bounder, config.target, config.rule};
  std::mt19937_64 rng(config.seed);

  const NodeKey start = config.start.value_or(NodeKey(n));
  if (start.size() != n) throw Error(Errc::dimension_mismatch, "start node size");
  std::vector<Carried> level{{start, std::make_shared<const PermutationGroup>(setwise_stabilizer(
                                         group, start.zeros(), start.ones()))}};
  std::vector<Carried> next;
  double exact_total = 0;
  double sampled_total = 0;
  double estimate_k = 0;
  for (int depth = 0; !level.empty(); ++depth) {
    if (depth > config.max_depth) {
      report.budget_exhausted = true;
      break;
    }
    const bool sampling = report.switch_depth.has_value() || level.size() >= config.full_width_threshold;
    if (!sampling) {
      if (report.expanded_nodes + level.size() > config.max_nodes) {
        report.budget_exhausted = true;
        break;
      }
      report.exact_counts.push_back(level.size());
      exact_total += static_cast<double>(level.size());
      report.expanded_nodes += level.size();
      expand_level(ctx, level, config.workers, next);
      level.swap(next);
      continue;
    }

    SampledDepth row;
    row.depth = depth;
    row.carried = level.size();
    if (!report.switch_depth) {
      report.switch_depth = depth;
      estimate_k = static_cast<double>(level.size());
    }
    row.estimate = estimate_k;
    row.sampled = row.carried >= config.sample_cutoff ? std::min(config.sample_size, row.carried)
                                                      : row.carried;
    if (report.expanded_nodes + row.sampled > config.max_nodes) {
      report.budget_exhausted = true;
      break;
    }
    const auto picks = sample_indices(rng, level.size(), row.sampled);
    std::vector<Carried> chosen;
    chosen.reserve(picks.size());
    for (auto i : picks) chosen.push_back(std::move(level[i]));
    report.expanded_nodes += chosen.size();
    row.active = expand_level(ctx, chosen, config.workers, next);
    sampled_total += row.estimate;
    report.sampled.push_back(row);
    estimate_k *= row.rate();
    level.swap(next);
  }
  report.total_estimate = exact_total + sampled_total;
  return report;
}

}  // namespace qapbb
