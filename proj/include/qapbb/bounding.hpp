#pragma once

// Lower bounders for reduced subproblems.
//
// A bounder emits intervals [a_p, b_p] around a valid lower bound nu of the
// subproblem optimum: a_p rises to nu, b_p falls to nu. Against a target the
// node is pruned at the first step with target <= a_p and branched at the
// first step with b_p < target; the iteration stops there.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qapbb/subproblem.hpp"

namespace qapbb {

struct BracketStep {
  int p = 0;
  double a = 0;
  double b = 0;
  friend bool operator==(const BracketStep&, const BracketStep&) = default;
};

enum class VerdictKind { pruned, active };

struct Verdict {
  VerdictKind kind = VerdictKind::active;
  /// Terminal a_q when pruned, terminal b_q when active.
  double certificate = 0;
  std::vector<BracketStep> trace;
  /// The bounder failed; the node is reported active with b = +inf.
  bool degraded = false;
};

struct BounderSpec {
  std::string name;
  std::map<std::string, std::string> parameters;

  /// "name" or "name:key=value,key=value".
  static BounderSpec parse(std::string_view text);
  std::string to_string() const;
  double number(const std::string& key, double fallback) const;
};

class Bounder {
 public:
  virtual ~Bounder() = default;
  virtual std::string_view name() const = 0;
  /// Emits steps until the iteration ends or `emit` returns false. May throw
  /// on numerical failure.
  virtual void bracket(const ReducedBqop& r,
                       const std::function<bool(const BracketStep&)>& emit) const = 0;
};

/// Registered names: "spectral", "spectral-bisect", "exact". Throws
/// unknown_bounder otherwise.
std::unique_ptr<Bounder> make_bounder(const BounderSpec& spec);
std::vector<std::string> bounder_names();

Verdict bound_node(const ReducedBqop& r, double target, const Bounder& bounder);
Verdict bound_node(const ReducedBqop& r, double target, const BounderSpec& spec);

/// One-shot bound from the sphere slice {e^T y = m', |y|^2 = m'}:
///   offset + (m'/f)^2 e^T Q e - 2 (m'/f) |l| rho + lambda_min(Q~) rho^2
/// where Q~ and l are Q and Qe restricted to the hyperplane e^T z = 0 and
/// rho^2 = m'(f - m')/f. lambda_min is shifted down by
/// `tolerance * max(1, |Q|_F)`. Throws eigensolver_failure.
double spectral_bound(const ReducedBqop& r, double tolerance = 1e-9);

struct ExactResult {
  Value value = 0;
  BinaryVector minimizer;  // over the free variables
};

/// Exact optimum by enumerating all m'-subsets of F. Throws
/// enumeration_budget when C(f, m') exceeds `budget`.
ExactResult exact_minimum(const ReducedBqop& r, std::uint64_t budget = 50'000'000);
Value exact_bound(const ReducedBqop& r, std::uint64_t budget = 50'000'000);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

}  // namespace qapbb
