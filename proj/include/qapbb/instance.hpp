#pragma once

// Raw problem data: symmetric integer matrices, QAP instances, permutations,
// 0/1 vectors and the cardinality-constrained binary quadratic problem.
//
// Indices are 0-based in memory. Everything a user reads or writes (files,
// CLI output, reports) is 1-based.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qapbb {

using Value = std::int64_t;

class SymMatrix {
 public:
  SymMatrix() = default;
  /// n x n zero matrix.
  explicit SymMatrix(int n);

  /// Builds from row-major entries. Throws asymmetric_matrix if
  /// entries[i][j] != entries[j][i]; with `zero_diagonal` set, throws
  /// nonzero_diagonal on any nonzero diagonal entry.
  static SymMatrix from_row_major(int n, std::vector<Value> entries,
                                  bool zero_diagonal);

  int size() const noexcept { return n_; }
  Value operator()(int i, int j) const noexcept {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }
  /// Sets (i,j) and (j,i).
  void set(int i, int j, Value v) noexcept {
    entries_[static_cast<std::size_t>(i) * n_ + j] = v;
    entries_[static_cast<std::size_t>(j) * n_ + i] = v;
  }
  std::span<const Value> row(int i) const noexcept {
    return {entries_.data() + static_cast<std::size_t>(i) * n_,
            static_cast<std::size_t>(n_)};
  }
  std::span<const Value> entries() const noexcept { return entries_; }

  bool has_zero_diagonal() const noexcept;
  bool is_zero() const noexcept;
  Value max_abs() const noexcept;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<Value> entries_;
};

/// A bijection of {0..n-1}; image[i] is where i goes.
class Permutation {
 public:
  Permutation() = default;
  /// Throws invalid_permutation unless `image` is a bijection.
  explicit Permutation(std::vector<int> image);

  static Permutation identity(int n);

  int size() const noexcept { return static_cast<int>(image_.size()); }
  int operator[](int i) const noexcept { return image_[i]; }
  std::span<const int> image() const noexcept { return image_; }

  Permutation inverse() const;
  /// (this o other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const;
  bool is_identity() const noexcept;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

class BinaryVector {
 public:
  BinaryVector() = default;
  explicit BinaryVector(int n) : bits_(static_cast<std::size_t>(n), 0) {}
  explicit BinaryVector(std::vector<std::uint8_t> bits);
  /// Vector of length n with ones at `support`.
  static BinaryVector from_support(int n, std::span<const int> support);

  int size() const noexcept { return static_cast<int>(bits_.size()); }
  bool operator[](int i) const noexcept { return bits_[i] != 0; }
  void set(int i, bool v) noexcept { bits_[i] = v ? 1 : 0; }
  int cardinality() const noexcept;
  std::vector<int> support() const;
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryVector&, const BinaryVector&) = default;
  friend auto operator<=>(const BinaryVector&, const BinaryVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct QapInstance {
  SymMatrix flows;      // A
  SymMatrix distances;  // B

  /// Validates matching sizes and zero diagonals.
  QapInstance(SymMatrix a, SymMatrix b);

  int size() const noexcept { return flows.size(); }
  friend bool operator==(const QapInstance&, const QapInstance&) = default;
};

enum class BqopSource { raw, reduced_from_qap };

/// min scale * x^T B x  s.t.  x binary, sum(x) == cardinality.
struct CardBqop {
  SymMatrix matrix;
  int cardinality = 0;
  Value scale = 1;
  BqopSource source = BqopSource::raw;

  CardBqop() = default;
  CardBqop(SymMatrix b, int m, Value scale_factor, BqopSource src);

  int size() const noexcept { return matrix.size(); }
  friend bool operator==(const CardBqop&, const CardBqop&) = default;
};

// QAPLIB ingestion ---------------------------------------------------------

/// Reads n, then n*n entries of A, then n*n entries of B, in any whitespace
/// layout.
QapInstance parse_qaplib(std::istream& in);
QapInstance parse_qaplib(const std::string& text);
QapInstance load_qaplib(const std::filesystem::path& path);
std::string serialize_qaplib(const QapInstance& inst);

// Generators ---------------------------------------------------------------

/// Flow matrix of tai256c: ones off the diagonal of the leading 92x92 block.
SymMatrix generate_tai256c_A();

/// Grey-pattern distances on a rows x cols torus: cell r = r1*cols + r2 and
/// b_rs = round_half_even(100000 / d^2) with d the wrap-around Euclidean
/// distance; zero diagonal. The 16x16 case is the distance matrix of tai256c.
SymMatrix grey_pattern_distances(int rows, int cols);

/// Selector-type QAP: `selected` mutual clones with flow `flow`, the rest of
/// A zero.
SymMatrix clique_flows(int n, int selected, Value flow);

// Objectives ---------------------------------------------------------------

/// sum_i sum_k a_ik * b_{perm(i) perm(k)}.
Value qap_objective(const QapInstance& inst, const Permutation& perm);

/// scale * x^T B x. Throws dimension_mismatch or cardinality_violation.
Value bqop_objective(const CardBqop& bqop, const BinaryVector& x);

/// x^T B x without the cardinality check.
Value quadratic_form(const SymMatrix& b, const BinaryVector& x);

// Solution files -----------------------------------------------------------

using Solution = std::variant<Permutation, BinaryVector>;

/// n whitespace-separated tokens: a 0/1 vector when every token is 0 or 1,
/// otherwise a 1-based permutation.
Solution parse_solution(std::istream& in, int n);
Solution load_solution(const std::filesystem::path& path, int n);
std::string format_permutation(const Permutation& perm);
std::string format_binary(const BinaryVector& x);

// CardBqop files -----------------------------------------------------------

/// Header line "cardbqop <n> <m> <scale> <raw|reduced>", then n rows of B.
std::string serialize_bqop(const CardBqop& bqop);
CardBqop parse_bqop(std::istream& in);

}  // namespace qapbb
