#include <bit>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "qapbb/bb.hpp"
#include "qapbb/frontier.hpp"
#include "qapbb/report.hpp"

using namespace qapbb;

namespace {

CardBqop tai256c() {
  return CardBqop(grey_pattern_distances(16, 16), 92, 1, BqopSource::reduced_from_qap);
}

CardBqop random_bqop(std::mt19937_64& rng, int n, int m) {
  SymMatrix b;
  switch (rng() % 3) {
    case 0: b = oracle::random_symmetric(rng, n, 0, 40, true); break;
    case 1: b = oracle::circulant(rng, n, 1, 30); break;
    default: b = oracle::random_symmetric(rng, n, -10, 30, false); break;
  }
  return CardBqop(b, m, oracle::uniform_int(rng, 1, 2), BqopSource::raw);
}

/// Mean objective over every feasible completion of `key`.
double brute_average(const CardBqop& bqop, const NodeKey& key) {
  const auto free = key.free();
  const auto ones = key.ones();
  const int f = static_cast<int>(free.size());
  const int need = bqop.cardinality - key.one_count();
  double sum = 0;
  double count = 0;
  for (std::uint32_t mask = 0; mask < (1u << f); ++mask) {
    if (std::popcount(mask) != need) continue;
    std::vector<int> s = ones;
    for (int a = 0; a < f; ++a)
      if (mask >> a & 1) s.push_back(free[a]);
    sum += static_cast<double>(bqop.scale * oracle::form(bqop.matrix, s));
    count += 1;
  }
  return sum / count;
}

double literal_score(const CardBqop& bqop, const NodeKey& key) {
  const int n = bqop.size();
  const double c = static_cast<double>(bqop.cardinality - key.one_count()) / key.free_count();
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    if (key.state(i) == VarState::one) x[i] = 1;
    if (key.state(i) == VarState::free) x[i] = c;
  }
  double v = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v += x[i] * bqop.matrix(i, j) * x[j];
  return bqop.scale * v;
}

double reduced_score(const CardBqop& bqop, const NodeKey& key) {
  const ReducedBqop r = reduce(bqop, key);
  const double c = static_cast<double>(r.residual) / r.size();
  double total = 0;
  for (Value v : r.matrix.entries()) total += static_cast<double>(v);
  return static_cast<double>(r.offset) + c * c * total;
}

NodeKey ones_key(int n, std::vector<int> ones) {
  const std::vector<int> none;
  return NodeKey(n, none, ones);
}

}  // namespace

TEST_CASE("node scores match their direct definitions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = oracle::uniform_int(rng, 3, 10);
    const CardBqop bqop = random_bqop(rng, n, oracle::uniform_int(rng, 1, n - 1));
    std::vector<VarState> s(static_cast<std::size_t>(n), VarState::free);
    for (int k = 0; k < n / 3; ++k)
      s[oracle::uniform_int(rng, 0, n - 1)] = (rng() & 1) ? VarState::one : VarState::zero;
    const NodeKey key = NodeKey::from_states(s);
    if (!is_feasible(bqop, key) || key.free_count() == 0) continue;
    CHECK(score_node_average(bqop, key, ScoreRule::exact_average) ==
          doctest::Approx(brute_average(bqop, key)));
    CHECK(score_node_average(bqop, key, ScoreRule::literal) ==
          doctest::Approx(literal_score(bqop, key)));
    CHECK(score_node_average(bqop, key, ScoreRule::reduced_uniform) ==
          doctest::Approx(reduced_score(bqop, key)));

    // Incremental child scores equal scoring the child from scratch.
    for (int j : key.free()) {
      const NodeKey child = key.with_one(j);
      if (!is_feasible(bqop, child)) continue;
      for (auto rule : {ScoreRule::reduced_uniform, ScoreRule::literal, ScoreRule::exact_average}) {
        CHECK(ScoreContext(bqop, key, rule).with_one(j) == ScoreContext(bqop, child, rule).node());
      }
    }
  }
}

TEST_CASE("orbit table scores on tai256c") {
  const CardBqop bqop = tai256c();
  const NodeKey root1 = ones_key(256, {0});
  const ScoreContext ctx(bqop, root1, ScoreRule::reduced_uniform);
  // Highest and lowest scoring orbits, against reference values.
  CHECK(std::abs(ctx.with_one(1).value() - 52655297.0) <= 0.5);
  CHECK(std::abs(ctx.with_one(136).value() - 52481773.0) <= 0.5);
  // Two different orbits share a score; the smaller representative wins.
  CHECK(ctx.with_one(24) == ctx.with_one(71));
}

TEST_CASE("orbit selection breaks ties by the smallest representative") {
  // Unit weights everywhere: every orbit scores the same.
  SymMatrix b(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) b.set(i, j, 1);
  const CardBqop bqop(b, 2, 1, BqopSource::raw);
  const PermutationGroup trivial(4);
  const NodeKey key(4);
  const OrbitSet os = free_orbits(trivial, key);
  CHECK(os.count() == 4);
  CHECK(select_orbit(bqop, key, os) == 0);
}

TEST_CASE("branching partitions the completions up to symmetry") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = oracle::uniform_int(rng, 4, 8);
    const CardBqop bqop(oracle::circulant(rng, n, 1, 5), oracle::uniform_int(rng, 1, n - 1), 1,
                        BqopSource::raw);
    const PermutationGroup g = discover_automorphisms(bqop.matrix);
    const NodeKey key(n);
    const OrbitSet os = free_orbits(g, key);
    const auto& orbit = os.orbits[select_orbit(bqop, key, os)];
    const auto [zero, one] = branch(key, orbit);
    const PermutationGroup stab = point_stabilizer(g, orbit.front());
    CHECK(zero.zeros() == orbit);
    CHECK(one.ones() == std::vector<int>{orbit.front()});

    // Every feasible x is in child 0 or maps into child 1 under G.
    for (const auto& support : oracle::bqop_minimum(CardBqop(SymMatrix(n), bqop.cardinality, 1,
                                                            BqopSource::raw))
                                   .minimizers) {
      const BinaryVector x = BinaryVector::from_support(n, support);
      bool covered = std::none_of(orbit.begin(), orbit.end(), [&](int i) { return x[i]; });
      for (const auto& p : g.elements()) covered = covered || apply(p, x)[orbit.front()];
      CHECK(covered);
    }
    CHECK(stab.order() * orbit.size() == g.order());
  }
}

TEST_CASE("certify agrees with exhaustive enumeration") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = oracle::uniform_int(rng, 3, 10);
    const CardBqop bqop = random_bqop(rng, n, oracle::uniform_int(rng, 1, n - 1));
    const Value opt = oracle::bqop_minimum(bqop).value;
    const PermutationGroup g = discover_automorphisms(bqop.matrix);
    for (const char* name : {"spectral", "spectral-bisect", "exact"}) {
      BbConfig cfg;
      cfg.bounder = BounderSpec::parse(name);
      cfg.target = static_cast<double>(opt);
      CHECK(certify(bqop, cfg, g).outcome == Outcome::certified);
      cfg.target = static_cast<double>(opt + 1);
      const BbReport refuted = certify(bqop, cfg, g);
      REQUIRE(refuted.outcome == Outcome::refuted);
      REQUIRE(refuted.witness.has_value());
      CHECK(refuted.witness_value == opt);
      CHECK(bqop_objective(bqop, *refuted.witness) == opt);
      // Without symmetry the answer is the same.
      CHECK(certify(bqop, cfg, PermutationGroup(n)).outcome == Outcome::refuted);
    }
  }
}

TEST_CASE("certify below a fixed start node") {
  std::mt19937_64 rng(43);
  const CardBqop bqop = random_bqop(rng, 8, 3);
  const std::vector<int> zeros{1};
  const std::vector<int> ones{4};
  const NodeKey start(8, zeros, ones);
  Value opt = std::numeric_limits<Value>::max();
  for (const auto& s : oracle::bqop_minimum(CardBqop(SymMatrix(8), 3, 1, BqopSource::raw)).minimizers) {
    if (std::find(s.begin(), s.end(), 4) == s.end() || std::find(s.begin(), s.end(), 1) != s.end())
      continue;
    opt = std::min(opt, bqop.scale * oracle::form(bqop.matrix, s));
  }
  BbConfig cfg;
  cfg.start = start;
  cfg.target = static_cast<double>(opt);
  CHECK(certify(bqop, cfg, discover_automorphisms(bqop.matrix)).outcome == Outcome::certified);
  cfg.target = static_cast<double>(opt) + 0.5;
  CHECK(certify(bqop, cfg, discover_automorphisms(bqop.matrix)).outcome == Outcome::refuted);
}

TEST_CASE("budget exhaustion is never reported as certified") {
  std::mt19937_64 rng(47);
  const CardBqop bqop = random_bqop(rng, 12, 5);
  BbConfig cfg;
  cfg.target = static_cast<double>(oracle::bqop_minimum(bqop).value);
  cfg.max_nodes = 3;
  CHECK(certify(bqop, cfg, PermutationGroup(12)).outcome == Outcome::budget_exhausted);
  cfg.max_nodes = 10'000'000;
  cfg.max_depth = 1;
  CHECK(certify(bqop, cfg, PermutationGroup(12)).outcome == Outcome::budget_exhausted);
}

TEST_CASE("reports do not depend on workers, batches or spilling") {
  std::mt19937_64 rng(53);
  const CardBqop bqop(oracle::torus(rng, 3, 4, 1, 60), 5, 1, BqopSource::raw);
  const PermutationGroup g = discover_automorphisms(bqop.matrix);
  const Value opt = oracle::bqop_minimum(bqop).value;
  for (double target : {static_cast<double>(opt), static_cast<double>(opt + 1)}) {
    BbConfig cfg;
    cfg.target = target;
    const BbReport base = certify(bqop, cfg, g);
    cfg.workers = 4;
    cfg.batch_size = 3;
    CHECK(to_json(certify(bqop, cfg, g)).dump() == to_json(base).dump());
    cfg.memory_nodes = 2;
    const BbReport spilled = certify(bqop, cfg, g);
    CHECK(spilled.spilled_nodes > 0);
    CHECK(to_csv(spilled) == to_csv(base));
    CHECK(spilled.witness == base.witness);
  }
}

TEST_CASE("node queue returns spilled nodes in order") {
  NodeQueue q(5, 3);
  std::vector<NodeKey> keys;
  for (int i = 0; i < 5; ++i) {
    const std::vector<int> none;
    const std::vector<int> one{i};
    keys.emplace_back(5, none, one);
  }
  for (int rep = 0; rep < 3; ++rep)
    for (int i = 0; i < 5; ++i) q.push({keys[i], static_cast<std::uint32_t>(rep * 5 + i)});
  CHECK(q.size() == 15);
  CHECK(q.spilled() > 0);
  std::vector<FrontierNode> out;
  std::uint32_t next = 0;
  while (q.pop_batch(out, 4)) {
    for (const auto& node : out) {
      CHECK(node.group == next);
      CHECK(node.key == keys[next % 5]);
      ++next;
    }
  }
  CHECK(next == 15);
}

TEST_CASE("parallel_for runs every index and propagates errors") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
