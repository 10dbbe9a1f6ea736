#include <functional>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qapbb/error.hpp"
#include "qapbb/instance.hpp"

using namespace qapbb;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io_error;
}

const char* kSmall =
    "3\n"
    "0 2 1\n2 0 4\n1 4 0\n"
    "0 5 3\n5 0 7\n3 7 0\n";

}  // namespace

TEST_CASE("qaplib text parses and round-trips") {
  const QapInstance inst = parse_qaplib(kSmall);
  CHECK(inst.size() == 3);
  CHECK(inst.flows(1, 2) == 4);
  CHECK(inst.distances(0, 2) == 3);
  CHECK(parse_qaplib(serialize_qaplib(inst)) == inst);
}

TEST_CASE("qaplib parser reports malformed input") {
  CHECK(code_of([] { parse_qaplib("2\n0 1\n1 0\n0 x\n1 0\n"); }) == Errc::malformed_token);
  CHECK(code_of([] { parse_qaplib("2\n0 1\n1 0\n0 1\n"); }) == Errc::count_mismatch);
  CHECK(code_of([] { parse_qaplib("2\n0 1\n2 0\n0 1\n1 0\n"); }) == Errc::asymmetric_matrix);
  CHECK(code_of([] { parse_qaplib("2\n1 1\n1 0\n0 1\n1 0\n"); }) == Errc::nonzero_diagonal);
  CHECK(code_of([] { parse_qaplib("2\n0 1\n1 0\n0 1\n1 0\n7\n"); }) == Errc::count_mismatch);
  CHECK(code_of([] { load_qaplib("/nonexistent/file.dat"); }) == Errc::io_error);
}

TEST_CASE("qap objective on a 3x3 instance") {
  const QapInstance inst = parse_qaplib(kSmall);
  // identity: 2*(2*5 + 1*3 + 4*7) = 82
  CHECK(qap_objective(inst, Permutation::identity(3)) == 82);
  // facility 0 -> 1, 1 -> 0, 2 -> 2: 2*(2*5 + 1*7 + 4*3) = 58
  CHECK(qap_objective(inst, Permutation({1, 0, 2})) == 58);
  CHECK(oracle::qap_minimum(inst) == 58);
}

TEST_CASE("permutation validation and algebra") {
  CHECK(code_of([] { Permutation({0, 0, 1}); }) == Errc::invalid_permutation);
  CHECK(code_of([] { Permutation({0, 3}); }) == Errc::invalid_permutation);
  const Permutation p({2, 0, 1});
  CHECK(p.compose(p.inverse()).is_identity());
  CHECK(p.compose(p).compose(p).is_identity());
  CHECK(!p.is_identity());
}

TEST_CASE("grey pattern distances use the torus metric") {
  const SymMatrix b = grey_pattern_distances(16, 16);
  CHECK(b.size() == 256);
  CHECK(b.has_zero_diagonal());
  CHECK(b(0, 1) == 100000);
  CHECK(b(0, 15) == 100000);  // wraps around
  CHECK(b(0, 17) == 50000);
  CHECK(b(0, 2) == 25000);
  CHECK(b(0, 34) == 12500);
  CHECK(b(0, 18) == 20000);
  CHECK(b(0, 8) == 1562);    // 1562.5 rounds to even
  CHECK(b(0, 24) == 1538);   // 100000 / 65
  CHECK(b(0, 136) == 781);   // 781.25
  CHECK(b(5, 200) == b(200, 5));
}

TEST_CASE("tai256c flows are a 92-clique of unit flows") {
  const SymMatrix a = generate_tai256c_A();
  CHECK(a.size() == 256);
  CHECK(a(0, 91) == 1);
  CHECK(a(91, 92) == 0);
  CHECK(a(3, 3) == 0);
  CHECK(a(150, 200) == 0);
  Value total = 0;
  for (Value v : a.entries()) total += v;
  CHECK(total == 92 * 91);
}

TEST_CASE("bqop objective checks the cardinality") {
  SymMatrix b(3);
  b.set(0, 1, 4);
  b.set(1, 2, -1);
  b.set(2, 2, 3);
  const CardBqop bqop(b, 2, 2, BqopSource::raw);
  const std::vector<int> s{1, 2};
  CHECK(bqop_objective(bqop, BinaryVector::from_support(3, s)) == 2 * (3 - 2));
  const std::vector<int> one{1};
  CHECK(code_of([&] { bqop_objective(bqop, BinaryVector::from_support(3, one)); }) ==
        Errc::cardinality_violation);
  CHECK(code_of([&] { bqop_objective(bqop, BinaryVector(4)); }) == Errc::dimension_mismatch);
}

TEST_CASE("cardbqop files round-trip") {
  std::mt19937_64 rng(5);
  const CardBqop bqop(oracle::random_symmetric(rng, 7, -9, 9, false), 3, 4,
                      BqopSource::reduced_from_qap);
  std::istringstream in(serialize_bqop(bqop));
  CHECK(parse_bqop(in) == bqop);
  std::istringstream bad("cardbqop 2 3 1 raw\n0 1\n1 0\n");
  CHECK(code_of([&] { parse_bqop(bad); }) == Errc::invalid_argument);
}

TEST_CASE("solution files hold permutations or 0/1 vectors") {
  std::istringstream perm("3 1 2");
  const Solution s = parse_solution(perm, 3);
  REQUIRE(std::holds_alternative<Permutation>(s));
  CHECK(std::get<Permutation>(s) == Permutation({2, 0, 1}));
  CHECK(format_permutation(std::get<Permutation>(s)) == "3 1 2");

  std::istringstream bits("0 1 1 0");
  const Solution v = parse_solution(bits, 4);
  REQUIRE(std::holds_alternative<BinaryVector>(v));
  CHECK(std::get<BinaryVector>(v).support() == std::vector<int>{1, 2});
  CHECK(format_binary(std::get<BinaryVector>(v)) == "0 1 1 0");

  std::istringstream short_perm("1 2");
  CHECK(code_of([&] { parse_solution(short_perm, 3); }) == Errc::count_mismatch);
  std::istringstream repeated("1 3 3");
  CHECK(code_of([&] { parse_solution(repeated, 3); }) == Errc::invalid_permutation);
}
