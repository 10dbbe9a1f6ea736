#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qapbb/error.hpp"
#include "qapbb/reduction.hpp"

using namespace qapbb;

namespace {

/// Flow matrix with clone classes of the given sizes and random class flows.
SymMatrix class_flows(std::mt19937_64& rng, const std::vector<int>& sizes, SymMatrix& reduced) {
  const int k = static_cast<int>(sizes.size());
  reduced = oracle::random_symmetric(rng, k, 0, 5, false);
  std::vector<int> label;
  for (int u = 0; u < k; ++u) label.insert(label.end(), static_cast<std::size_t>(sizes[u]), u);
  std::shuffle(label.begin(), label.end(), rng);
  const int n = static_cast<int>(label.size());
  SymMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a.set(i, j, reduced(label[i], label[j]));
  return a;
}

}  // namespace

TEST_CASE("tai256c clone classes and selector reduction") {
  const QapInstance inst(generate_tai256c_A(), grey_pattern_distances(16, 16));
  const CloneClasses cc = find_clones(inst.flows);
  REQUIRE(cc.count() == 2);
  CHECK(cc.size_of(0) == 92);
  CHECK(cc.size_of(1) == 164);
  CHECK(cc.classes[0].front() == 0);
  CHECK(cc.classes[0].back() == 91);
  CHECK(cc.reduced(0, 0) == 1);
  CHECK(cc.reduced(0, 1) == 0);
  CHECK(cc.reduced(1, 1) == 0);
  CHECK(selector_class(cc) == 0);
  const CardBqop bqop = reduce_to_bqop(inst);
  CHECK(bqop.cardinality == 92);
  CHECK(bqop.scale == 1);
  CHECK(bqop.matrix == inst.distances);
  CHECK(bqop.source == BqopSource::reduced_from_qap);
}

TEST_CASE("clone relabeling does not change the classes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    SymMatrix reduced;
    const SymMatrix a = class_flows(rng, {3, 2, 1, 2}, reduced);
    const CloneClasses cc = find_clones(a);
    // Swapping two members of one class is an automorphism of A.
    for (const auto& cls : cc.classes) {
      if (cls.size() < 2) continue;
      std::vector<int> p(static_cast<std::size_t>(a.size()));
      std::iota(p.begin(), p.end(), 0);
      std::swap(p[cls[0]], p[cls[1]]);
      for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) CHECK(a(p[i], p[j]) == a(i, j));
    }
    // Classes partition the facilities and agree with class_of.
    std::vector<int> seen(static_cast<std::size_t>(a.size()), 0);
    for (int u = 0; u < cc.count(); ++u)
      for (int i : cc.classes[u]) {
        ++seen[i];
        CHECK(cc.class_of[i] == u);
      }
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("selector reduction preserves optimum and objective values") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = oracle::uniform_int(rng, 3, 7);
    const int m = oracle::uniform_int(rng, 2, n - 1);
    const Value flow = oracle::uniform_int(rng, 1, 4);
    const QapInstance inst = oracle::selector_qap(
        rng, oracle::random_symmetric(rng, n, 0, 20, true), m, flow);
    const SelectorReduction red = reduce_selector(inst);
    CHECK(red.bqop.cardinality == m);
    CHECK(red.bqop.scale == flow);
    CHECK(oracle::qap_minimum(inst) == oracle::bqop_minimum(red.bqop).value);
    for (int k = 0; k < 10; ++k) {
      std::vector<int> img(static_cast<std::size_t>(n));
      std::iota(img.begin(), img.end(), 0);
      std::shuffle(img.begin(), img.end(), rng);
      const Permutation perm(img);
      const BinaryVector x = permutation_to_binary(perm, red.classes, red.selected);
      CHECK(qap_objective(inst, perm) == bqop_objective(red.bqop, x));
      const Permutation back = binary_to_permutation(x, red.classes, red.selected);
      CHECK(permutation_to_binary(back, red.classes, red.selected) == x);
      CHECK(qap_objective(inst, back) == qap_objective(inst, perm));
    }
  }
}

TEST_CASE("non-selector flows are rejected by the selector reduction") {
  std::mt19937_64 rng(8);
  const QapInstance inst(oracle::random_symmetric(rng, 5, 1, 5, true),
                         oracle::random_symmetric(rng, 5, 1, 9, true));
  try {
    reduce_selector(inst);
    FAIL("expected not_selector_structure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_selector_structure);
  }
}

TEST_CASE("general reduced model matches brute force over class placements") {
  std::mt19937_64 rng(21);
  const std::vector<std::vector<int>> shapes{{2, 2, 1}, {3, 2}, {1, 1, 2, 2}, {2, 1, 1, 1}};
  for (int trial = 0; trial < 16; ++trial) {
    const auto& sizes = shapes[trial % shapes.size()];
    SymMatrix reduced;
    const SymMatrix a = class_flows(rng, sizes, reduced);
    const QapInstance inst(a, oracle::random_symmetric(rng, a.size(), 0, 12, true));
    const GeneralReducedModel model = emit_general_model(inst);
    const CloneClasses cc = find_clones(a);
    CHECK(model.locations == a.size());
    CHECK(model.variable_count() == a.size() * cc.count());
    CHECK(model.class_size_rows() == cc.count());
    CHECK(model.assignment_rows() == a.size());

    std::vector<int> class_sizes;
    for (int u = 0; u < cc.count(); ++u) class_sizes.push_back(cc.size_of(u));
    CHECK(model.class_sizes == class_sizes);
    const Value brute = oracle::clone_class_minimum(cc.reduced, class_sizes, inst.distances);
    CHECK(brute == oracle::qap_minimum(inst));

    // Every permutation evaluates identically through the model.
    std::vector<int> img(static_cast<std::size_t>(a.size()));
    std::iota(img.begin(), img.end(), 0);
    for (int k = 0; k < 8; ++k) {
      std::shuffle(img.begin(), img.end(), rng);
      std::vector<int> class_at(img.size());
      for (int i = 0; i < a.size(); ++i) class_at[img[i]] = cc.class_of[i];
      CHECK(evaluate_general_model(model, class_at) == qap_objective(inst, Permutation(img)));
    }
    std::istringstream in(serialize_general_model(model));
    CHECK(parse_general_model(in) == model);
  }
}

TEST_CASE("general model rejects assignments with wrong class sizes") {
  const QapInstance inst(clique_flows(4, 2, 1), grey_pattern_distances(2, 2));
  const GeneralReducedModel model = emit_general_model(inst);
  const std::vector<int> wrong{0, 0, 0, 1};
  try {
    evaluate_general_model(model, wrong);
    FAIL("expected cardinality_violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cardinality_violation);
  }
}
