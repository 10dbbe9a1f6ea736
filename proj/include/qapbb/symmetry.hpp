#pragma once

// Automorphisms of a symmetric matrix, stabilizer subgroups and orbits.
//
// A permutation pi acts on vectors by (x_pi)_i = x_{pi(i)}; it is an
// automorphism of B when B[pi(i)][pi(j)] == B[i][j] for all i, j, which is
// the same as x_pi^T B x_pi == x^T B x for every x.

#include <cstddef>
#include <span>
#include <vector>

#include "qapbb/instance.hpp"

namespace qapbb {

/// Explicit element list, sorted lexicographically, always containing the
/// identity.
class PermutationGroup {
 public:
  PermutationGroup() = default;
  /// The trivial group on n points.
  explicit PermutationGroup(int n);
  /// Sorts and deduplicates; throws invalid_argument when the identity is
  /// missing or a size differs. Closure is not checked here (see
  /// `is_closed`).
  PermutationGroup(int n, std::vector<Permutation> elements);

  int degree() const noexcept { return n_; }
  std::size_t order() const noexcept { return elements_.size(); }
  std::span<const Permutation> elements() const noexcept { return elements_; }
  bool is_trivial() const noexcept { return elements_.size() <= 1; }
  bool contains(const Permutation& p) const;
  /// Closure under composition and inverse, checked exhaustively.
  bool is_closed() const;

  friend bool operator==(const PermutationGroup&, const PermutationGroup&) = default;

 private:
  int n_ = 0;
  std::vector<Permutation> elements_;
};

struct DiscoveryOptions {
  std::size_t max_elements = 1'000'000;
  /// Root candidates are split across this many threads; the result does
  /// not depend on it.
  int workers = 1;
};

/// All automorphisms of `b`, by depth-first assignment of pi(0), pi(1), ...
/// Candidates for pi(i) must share i's sorted row multiset and agree with
/// every earlier assignment. Throws group_cap_exceeded past
/// `max_elements`.
PermutationGroup discover_automorphisms(const SymMatrix& b, const DiscoveryOptions& options = {});

/// {pi in G : pi(zeros) == zeros and pi(ones) == ones}.
PermutationGroup setwise_stabilizer(const PermutationGroup& group, std::span<const int> zeros,
                                    std::span<const int> ones);

/// {pi in G : pi(point) == point}.
PermutationGroup point_stabilizer(const PermutationGroup& group, int point);

struct OrbitSet {
  std::vector<int> ground;
  /// Each orbit sorted ascending; orbits ordered by smallest member.
  std::vector<std::vector<int>> orbits;

  std::size_t count() const noexcept { return orbits.size(); }
  int representative(std::size_t k) const noexcept { return orbits[k].front(); }
};

/// Orbit partition of `ground` under `group`. Throws invalid_argument when
/// some element maps a ground point outside `ground`.
OrbitSet orbits(const PermutationGroup& group, std::span<const int> ground);

/// Distinct images {x_pi : pi in G}, sorted. When `b` is given, every image is
/// checked to have the same quadratic form value as x.
std::vector<BinaryVector> expand_solution(const PermutationGroup& group, const BinaryVector& x,
                                          const SymMatrix* b = nullptr);

/// x_pi, i.e. y[i] = x[pi(i)].
BinaryVector apply(const Permutation& pi, const BinaryVector& x);

}  // namespace qapbb
