#include "qapbb/bb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_map>

#include "qapbb/error.hpp"
#include "qapbb/frontier.hpp"

namespace qapbb {

// Scoring -------------------------------------------------------------------------

ScoreContext::ScoreContext(const CardBqop& bqop, const NodeKey& key, ScoreRule rule)
    : bqop_(bqop), rule_(rule) {
  const int n = bqop.size();
  if (key.size() != n) throw Error(Errc::dimension_mismatch, "node key size");
  const auto& b = bqop.matrix;
  row_free_.assign(static_cast<std::size_t>(n), 0);
  row_ones_.assign(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    const auto row = b.row(j);
    for (int i = 0; i < n; ++i) {
      const VarState s = key.state(i);
      if (s == VarState::free) {
        row_free_[j] += row[i];
      } else if (s == VarState::one) {
        row_ones_[j] += row[i];
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    switch (key.state(j)) {
      case VarState::one:
        sums_.fixed += row_ones_[j];
        ++sums_.ones;
        break;
      case VarState::free:
        sums_.cross += row_ones_[j];
        sums_.free_total += row_free_[j];
        sums_.free_trace += b(j, j);
        ++sums_.free;
        break;
      case VarState::zero:
        break;
    }
  }
}

NodeScore ScoreContext::evaluate(const Sums& s) const {
  const __int128 f = s.free;
  const __int128 m = bqop_.cardinality - s.ones;
  if (m < 0 || m > f) throw Error(Errc::infeasible_node, "scoring an infeasible node");
  const __int128 scale = bqop_.scale;
  if (f == 0 || m == 0 || m == f) {
    const __int128 value = s.fixed + (m == f ? s.free_total + 2 * s.cross : 0);
    return {scale * value, 1};
  }
  switch (rule_) {
    case ScoreRule::reduced_uniform:
      return {scale * (s.fixed * f * f + m * m * (s.free_total + 2 * s.cross)), f * f};
    case ScoreRule::literal:
      return {scale * (s.fixed * f * f + 2 * m * f * s.cross + m * m * s.free_total), f * f};
    case ScoreRule::exact_average:
      return {scale * (s.fixed * f * (f - 1) + m * (f - 1) * (s.free_trace + 2 * s.cross) +
                       m * (m - 1) * (s.free_total - s.free_trace)),
              f * (f - 1)};
  }
  return {};
}

NodeScore ScoreContext::node() const { return evaluate(sums_); }

NodeScore ScoreContext::with_one(int j) const {
  const __int128 diag = bqop_.matrix(j, j);
  Sums s = sums_;
  s.fixed += 2 * row_ones_[j] + diag;
  s.cross += row_free_[j] - diag - row_ones_[j];
  s.free_total -= 2 * row_free_[j] - diag;
  s.free_trace -= diag;
  ++s.ones;
  --s.free;
  return evaluate(s);
}

double score_node_average(const CardBqop& bqop, const NodeKey& key, ScoreRule rule) {
  return ScoreContext(bqop, key, rule).node().value();
}

std::size_t select_orbit(const CardBqop& bqop, const NodeKey& key, const OrbitSet& orbit_set,
                         ScoreRule rule) {
  if (orbit_set.count() == 0) throw Error(Errc::invalid_argument, "no free orbit to branch on");
  const ScoreContext ctx(bqop, key, rule);
  std::size_t best = 0;
  NodeScore best_score = ctx.with_one(orbit_set.representative(0));
  for (std::size_t k = 1; k < orbit_set.count(); ++k) {
    const NodeScore s = ctx.with_one(orbit_set.representative(k));
    // Orbits come ordered by representative, so strict improvement keeps
    // the smallest representative on ties.
    if (best_score < s) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

OrbitSet free_orbits(const PermutationGroup& group, const NodeKey& key) {
  const auto free = key.free();
  return orbits(group, free);
}

std::pair<NodeKey, NodeKey> branch(const NodeKey& key, std::span<const int> orbit) {
  if (orbit.empty()) throw Error(Errc::invalid_argument, "empty orbit");
  const int rep = *std::min_element(orbit.begin(), orbit.end());
  return {key.with_zeros(orbit), key.with_one(rep)};
}

// Node expansion ------------------------------------------------------------------

NodeExpansion expand_node(const ExpansionContext& ctx, const NodeKey& key,
                          const std::shared_ptr<const PermutationGroup>& group) {
  NodeExpansion out;
  if (!is_feasible(ctx.bqop, key)) {
    out.status = NodeStatus::infeasible;
    return out;
  }
  const int residual = residual_cardinality(ctx.bqop, key);
  const int f = key.free_count();
  if (f == 0 || residual == 0 || residual == f) {
    BinaryVector x(key.size());
    for (int i = 0; i < key.size(); ++i) {
      const VarState s = key.state(i);
      x.set(i, s == VarState::one || (s == VarState::free && residual == f));
    }
    out.leaf_value = bqop_objective(ctx.bqop, x);
    out.completion = std::move(x);
    out.status = static_cast<double>(out.leaf_value) < ctx.target ? NodeStatus::refuted
                                                                  : NodeStatus::leaf;
    return out;
  }

  out.verdict = bound_node(reduce(ctx.bqop, key), ctx.target, ctx.bounder);
  if (out.verdict.kind == VerdictKind::pruned) {
    out.status = NodeStatus::pruned;
    return out;
  }

  out.status = NodeStatus::active;
  const OrbitSet orbit_set = free_orbits(*group, key);
  const auto& orbit = orbit_set.orbits[select_orbit(ctx.bqop, key, orbit_set, ctx.rule)];
  out.orbit_size = static_cast<int>(orbit.size());
  out.children = branch(key, orbit);
  // The parent's stabilizer maps the orbit onto itself, so it already
  // stabilizes child 0; child 1 additionally fixes the representative.
  if (group->is_trivial()) {
    out.child_one_group = group;
  } else {
    auto sub = std::make_shared<const PermutationGroup>(point_stabilizer(*group, orbit.front()));
    out.child_one_group = sub->order() == group->order() ? group : std::move(sub);
  }
  return out;
}

// Certification -------------------------------------------------------------------

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    const std::size_t used = std::min(threads, count);
    std::vector<std::exception_ptr> errors(used);
    for (std::size_t w = 0; w < used; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i; !failed && (i = next.fetch_add(1)) < count;) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          failed = true;
        }
      });
    }
    pool.clear();
    for (auto& e : errors)
      if (e && !error) error = e;
  }
  if (error) std::rethrow_exception(error);
}

std::uint64_t BbReport::total_nodes() const noexcept {
  std::uint64_t total = 0;
  for (const auto& d : depths) total += d.nodes;
  return total;
}

std::uint64_t BbReport::count(NodeStatus status) const noexcept {
  std::uint64_t total = 0;
  for (const auto& d : depths) {
    switch (status) {
      case NodeStatus::infeasible: total += d.infeasible; break;
      case NodeStatus::leaf: total += d.leaves; break;
      case NodeStatus::refuted: total += d.refuted; break;
      case NodeStatus::pruned: total += d.pruned; break;
      case NodeStatus::active: total += d.active; break;
    }
  }
  return total;
}

namespace {

void validate(const BbConfig& cfg) {
  if (!std::isfinite(cfg.target)) throw Error(Errc::invalid_argument, "target must be finite");
  if (cfg.max_nodes == 0 || cfg.max_depth < 0 || cfg.workers < 1 || cfg.batch_size == 0 ||
      cfg.memory_nodes == 0) {
    throw Error(Errc::invalid_argument, "search budgets must be positive");
  }
}

/// Per-level mapping from group objects to queue ids.
class GroupTable {
 public:
  std::uint32_t id(const std::shared_ptr<const PermutationGroup>& g) {
    auto [it, inserted] = ids_.emplace(g.get(), static_cast<std::uint32_t>(groups_.size()));
    if (inserted) groups_.push_back(g);
    return it->second;
  }
  const std::shared_ptr<const PermutationGroup>& at(std::uint32_t id) const { return groups_[id]; }

 private:
  std::vector<std::shared_ptr<const PermutationGroup>> groups_;
  std::unordered_map<const PermutationGroup*, std::uint32_t> ids_;
};

void record_verdict(BbReport& report, const Verdict& v) {
  ++report.bound_calls;
  report.bracket_steps += v.trace.size();
  if (v.trace.empty()) return;
  const auto& last = v.trace.back();
  auto& bucket = v.kind == VerdictKind::pruned ? report.pruned_by_step[last.p]
                                               : report.active_by_step[last.p];
  ++bucket.count;
  bucket.sum_a += last.a;
  bucket.sum_b += last.b;
}

}  // namespace

BbReport certify(const CardBqop& bqop, const BbConfig& config, const PermutationGroup& group) {
  validate(config);
  const int n = bqop.size();
  if (group.degree() != n) throw Error(Errc::dimension_mismatch, "group degree differs from n");

  BbReport report;
  report.target = config.target;
  report.bounder = config.bounder.to_string();
  const auto bounder = make_bounder(config.bounder);
  const ExpansionContext ctx{bqop, *bounder, config.target, config.rule};

  GroupTable groups;
  NodeQueue level(n, config.memory_nodes);
  const NodeKey start = config.start.value_or(NodeKey(n));
  if (start.size() != n) throw Error(Errc::dimension_mismatch, "start node size");
  level.push({start, groups.id(std::make_shared<const PermutationGroup>(
                         setwise_stabilizer(group, start.zeros(), start.ones())))});

  std::uint64_t processed = 0;
  std::vector<FrontierNode> batch;
  std::vector<NodeExpansion> results;
  for (int depth = 0; !level.empty(); ++depth) {
    if (depth > config.max_depth || processed + level.size() > config.max_nodes) {
      report.outcome = Outcome::budget_exhausted;
      return report;
    }
    DepthStats stats;
    stats.nodes = level.size();
    GroupTable next_groups;
    NodeQueue next(n, config.memory_nodes);

    while (level.pop_batch(batch, config.batch_size)) {
      results.assign(batch.size(), NodeExpansion{});
      parallel_for(batch.size(), config.workers, [&](std::size_t i) {
        results[i] = expand_node(ctx, batch[i].key, groups.at(batch[i].group));
      });
      for (std::size_t i = 0; i < batch.size(); ++i) {
        auto& r = results[i];
        switch (r.status) {
          case NodeStatus::infeasible: ++stats.infeasible; break;
          case NodeStatus::leaf: ++stats.leaves; break;
          case NodeStatus::refuted:
            ++stats.refuted;
            if (!report.witness) {
              report.witness = r.completion;
              report.witness_value = r.leaf_value;
            }
            break;
          case NodeStatus::pruned:
            ++stats.pruned;
            record_verdict(report, r.verdict);
            break;
          case NodeStatus::active: {
            ++stats.active;
            if (r.verdict.degraded) ++stats.degraded;
            record_verdict(report, r.verdict);
            ++stats.orbit_sizes[r.orbit_size];
            const auto& parent = groups.at(batch[i].group);
            next.push({std::move(r.children->first), next_groups.id(parent)});
            next.push({std::move(r.children->second), next_groups.id(r.child_one_group)});
            break;
          }
        }
      }
    }
    processed += stats.nodes;
    report.spilled_nodes += level.spilled();
    report.depths.push_back(std::move(stats));
    if (report.witness) {
      report.outcome = Outcome::refuted;
      return report;
    }
    level = std::move(next);
    groups = std::move(next_groups);
  }
  report.outcome = Outcome::certified;
  return report;
}

}  // namespace qapbb
