#pragma once

// Subproblems of a cardinality BQOP with some variables fixed, and their
// penalty QUBO form.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qapbb/instance.hpp"

namespace qapbb {

enum class VarState : std::uint8_t { free = 0, zero = 1, one = 2 };

/// Partition (I0, I1, F) of {0..n-1}: variables fixed to 0, fixed to 1, free.
class NodeKey {
 public:
  NodeKey() = default;
  /// Root key: everything free.
  explicit NodeKey(int n);
  /// Throws invalid_argument when the fixed sets overlap or leave range.
  NodeKey(int n, std::span<const int> zeros, std::span<const int> ones);
  static NodeKey from_states(std::vector<VarState> states);

  int size() const noexcept { return static_cast<int>(state_.size()); }
  VarState state(int i) const noexcept { return state_[i]; }
  std::span<const VarState> states() const noexcept { return state_; }

  std::vector<int> zeros() const { return collect(VarState::zero); }
  std::vector<int> ones() const { return collect(VarState::one); }
  std::vector<int> free() const { return collect(VarState::free); }
  int zero_count() const noexcept { return zeros_; }
  int one_count() const noexcept { return ones_; }
  int free_count() const noexcept { return size() - zeros_ - ones_; }

  /// Copy with the given free variables fixed to 0 (resp. 1).
  NodeKey with_zeros(std::span<const int> vars) const;
  NodeKey with_one(int var) const;

  friend bool operator==(const NodeKey& a, const NodeKey& b) { return a.state_ == b.state_; }

 private:
  std::vector<int> collect(VarState s) const;

  std::vector<VarState> state_;
  int zeros_ = 0;
  int ones_ = 0;
};

/// Remaining cardinality m - |I1|; negative when infeasible.
int residual_cardinality(const CardBqop& bqop, const NodeKey& key);
/// 0 <= m - |I1| <= |F|.
bool is_feasible(const CardBqop& bqop, const NodeKey& key);

/// min offset + y^T matrix y  s.t.  y binary over `free`, sum(y) == residual.
///
/// matrix = scale * (B_FF + 2 diag(sum_{k in I1} B_kF)),
/// offset = scale * sum_{j,k in I1} B_jk, so values are directly comparable
/// with the objective of the original problem.
struct ReducedBqop {
  std::vector<int> free;
  SymMatrix matrix;
  Value offset = 0;
  int residual = 0;

  int size() const noexcept { return matrix.size(); }
  /// offset + y^T matrix y (no cardinality check).
  Value value(const BinaryVector& y) const;
};

/// Throws infeasible_node when |I1| > m or m - |I1| > |F|.
ReducedBqop reduce(const CardBqop& bqop, const NodeKey& key);

/// Lifts y over F back to the full vector x (I1 ones, I0 zeros).
BinaryVector lift(const NodeKey& key, std::span<const int> free, const BinaryVector& y);

/// offset + y^T Q y equals the reduced value plus lambda * (sum(y) - m')^2
/// for every binary y.
struct QuboInstance {
  std::vector<int> free;
  std::vector<double> q;  // row-major, symmetric
  double offset = 0;
  double lambda = 0;

  int size() const noexcept { return static_cast<int>(free.size()); }
  double at(int i, int j) const noexcept {
    return q[static_cast<std::size_t>(i) * free.size() + j];
  }
  double value(const BinaryVector& y) const;
};

/// Q = matrix + lambda * (ones off the diagonal), diagonal shifted by
/// lambda * (1 - 2 m'), offset increased by lambda * m'^2.
QuboInstance to_qubo(const ReducedBqop& r, double lambda);

/// 1e8 / ||matrix||_F. Throws zero_matrix on a zero matrix.
double default_lambda(const ReducedBqop& r);
double frobenius_norm(const SymMatrix& m);

/// Text layout: "qubo <f> <lambda> <offset>", a "vars" line with the 1-based
/// original indices of the free variables, then "i j q" for every nonzero
/// entry with i <= j (positions 1..f). The value of y is
/// offset + sum_i q_ii y_i + 2 sum_{i<j} q_ij y_i y_j. Reals are printed with
/// 17 significant digits.
std::string serialize_qubo(const QuboInstance& qubo);
QuboInstance parse_qubo(std::istream& in);

}  // namespace qapbb
