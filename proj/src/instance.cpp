#include "qapbb/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "qapbb/error.hpp"

namespace qapbb {

namespace {

Value parse_value(const std::string& token) {
  Value v = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(Errc::malformed_token, "not an integer: '" + token + "'");
  }
  return v;
}

std::vector<Value> read_values(std::istream& in, std::size_t count,
                               const char* what) {
  std::vector<Value> out;
  out.reserve(count);
  std::string token;
  while (out.size() < count && in >> token) out.push_back(parse_value(token));
  if (out.size() != count) {
    throw Error(Errc::count_mismatch, std::string(what) + ": expected " +
                                          std::to_string(count) + " entries, got " +
                                          std::to_string(out.size()));
  }
  return out;
}

void expect_end(std::istream& in, const char* what) {
  std::string token;
  if (in >> token) {
    throw Error(Errc::count_mismatch,
                std::string(what) + ": trailing token '" + token + "'");
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return in;
}

}  // namespace

// SymMatrix -----------------------------------------------------------------

SymMatrix::SymMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n, 0) {
  if (n < 0) throw Error(Errc::invalid_argument, "negative matrix size");
}

SymMatrix SymMatrix::from_row_major(int n, std::vector<Value> entries,
                                    bool zero_diagonal) {
  if (n < 0 || entries.size() != static_cast<std::size_t>(n) * n) {
    throw Error(Errc::count_mismatch, "matrix entry count does not match n*n");
  }
  SymMatrix m;
  m.n_ = n;
  m.entries_ = std::move(entries);
  for (int i = 0; i < n; ++i) {
    if (zero_diagonal && m(i, i) != 0) {
      throw Error(Errc::nonzero_diagonal,
                  "diagonal entry " + std::to_string(i + 1) + " is nonzero");
    }
    for (int j = i + 1; j < n; ++j) {
      if (m(i, j) != m(j, i)) {
        throw Error(Errc::asymmetric_matrix, "entry (" + std::to_string(i + 1) +
                                                 "," + std::to_string(j + 1) +
                                                 ") differs from its transpose");
      }
    }
  }
  return m;
}

bool SymMatrix::has_zero_diagonal() const noexcept {
  for (int i = 0; i < n_; ++i)
    if ((*this)(i, i) != 0) return false;
  return true;
}

bool SymMatrix::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](Value v) { return v == 0; });
}

Value SymMatrix::max_abs() const noexcept {
  Value best = 0;
  for (Value v : entries_) best = std::max(best, v < 0 ? -v : v);
  return best;
}

// Permutation ---------------------------------------------------------------

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (int v : image_) {
    if (v < 0 || v >= size() || seen[v]) {
      throw Error(Errc::invalid_permutation, "image is not a bijection");
    }
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> image(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) image[i] = i;
  Permutation p;
  p.image_ = std::move(image);
  return p;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.image_.resize(image_.size());
  for (int i = 0; i < size(); ++i) p.image_[image_[i]] = i;
  return p;
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) {
    throw Error(Errc::dimension_mismatch, "composing permutations of different sizes");
  }
  Permutation p;
  p.image_.resize(image_.size());
  for (int i = 0; i < size(); ++i) p.image_[i] = image_[other.image_[i]];
  return p;
}

bool Permutation::is_identity() const noexcept {
  for (int i = 0; i < size(); ++i)
    if (image_[i] != i) return false;
  return true;
}

// BinaryVector --------------------------------------------------------------

BinaryVector::BinaryVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

BinaryVector BinaryVector::from_support(int n, std::span<const int> support) {
  BinaryVector x(n);
  for (int i : support) {
    if (i < 0 || i >= n) throw Error(Errc::invalid_argument, "support index out of range");
    x.set(i, true);
  }
  return x;
}

int BinaryVector::cardinality() const noexcept {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<int> BinaryVector::support() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

// Instances -----------------------------------------------------------------

QapInstance::QapInstance(SymMatrix a, SymMatrix b)
    : flows(std::move(a)), distances(std::move(b)) {
  if (flows.size() != distances.size()) {
    throw Error(Errc::dimension_mismatch, "A and B have different sizes");
  }
  if (!flows.has_zero_diagonal() || !distances.has_zero_diagonal()) {
    throw Error(Errc::nonzero_diagonal, "QAP matrices need zero diagonals");
  }
}

CardBqop::CardBqop(SymMatrix b, int m, Value scale_factor, BqopSource src)
    : matrix(std::move(b)), cardinality(m), scale(scale_factor), source(src) {
  if (m < 0 || m > matrix.size()) {
    throw Error(Errc::invalid_argument, "cardinality outside [0, n]");
  }
  if (scale <= 0) throw Error(Errc::invalid_argument, "scale must be positive");
}

// QAPLIB --------------------------------------------------------------------

QapInstance parse_qaplib(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw Error(Errc::count_mismatch, "empty QAPLIB input");
  const Value n = parse_value(token);
  if (n <= 0 || n > 100000) {
    throw Error(Errc::malformed_token, "bad instance size " + token);
  }
  const auto count = static_cast<std::size_t>(n * n);
  auto a = read_values(in, count, "flow matrix");
  auto b = read_values(in, count, "distance matrix");
  expect_end(in, "QAPLIB input");
  return QapInstance(SymMatrix::from_row_major(static_cast<int>(n), std::move(a), true),
                     SymMatrix::from_row_major(static_cast<int>(n), std::move(b), true));
}

QapInstance parse_qaplib(const std::string& text) {
  std::istringstream in(text);
  return parse_qaplib(in);
}

QapInstance load_qaplib(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_qaplib(in);
}

namespace {
void write_matrix(std::ostream& out, const SymMatrix& m) {
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}
}  // namespace

std::string serialize_qaplib(const QapInstance& inst) {
  std::ostringstream out;
  out << inst.size() << "\n\n";
  write_matrix(out, inst.flows);
  out << '\n';
  write_matrix(out, inst.distances);
  return out.str();
}

// Generators ----------------------------------------------------------------

SymMatrix generate_tai256c_A() { return clique_flows(256, 92, 1); }

SymMatrix clique_flows(int n, int selected, Value flow) {
  if (selected < 0 || selected > n) {
    throw Error(Errc::invalid_argument, "clique larger than the instance");
  }
  SymMatrix a(n);
  for (int i = 0; i < selected; ++i)
    for (int k = i + 1; k < selected; ++k) a.set(i, k, flow);
  return a;
}

SymMatrix grey_pattern_distances(int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw Error(Errc::invalid_argument, "empty grid");
  const int n = rows * cols;
  auto wrap = [](int d, int len) {
    d = d < 0 ? -d : d;
    return std::min(d, len - d);
  };
  SymMatrix b(n);
  for (int r = 0; r < n; ++r) {
    for (int s = r + 1; s < n; ++s) {
      const Value dr = wrap(r / cols - s / cols, rows);
      const Value dc = wrap(r % cols - s % cols, cols);
      const Value d2 = dr * dr + dc * dc;
      Value q = 100000 / d2;
      const Value rem = 100000 % d2;
      if (2 * rem > d2 || (2 * rem == d2 && (q & 1))) ++q;
      b.set(r, s, q);
    }
  }
  return b;
}

// Objectives ----------------------------------------------------------------

Value qap_objective(const QapInstance& inst, const Permutation& perm) {
  const int n = inst.size();
  if (perm.size() != n) {
    throw Error(Errc::dimension_mismatch, "permutation size differs from instance size");
  }
  Value total = 0;
  for (int i = 0; i < n; ++i) {
    const auto a_row = inst.flows.row(i);
    const auto b_row = inst.distances.row(perm[i]);
    for (int k = 0; k < n; ++k) {
      if (a_row[k] != 0) total += a_row[k] * b_row[perm[k]];
    }
  }
  return total;
}

Value quadratic_form(const SymMatrix& b, const BinaryVector& x) {
  if (x.size() != b.size()) {
    throw Error(Errc::dimension_mismatch, "vector size differs from matrix size");
  }
  const auto support = x.support();
  Value total = 0;
  for (int i : support) {
    const auto row = b.row(i);
    for (int j : support) total += row[j];
  }
  return total;
}

Value bqop_objective(const CardBqop& bqop, const BinaryVector& x) {
  if (x.size() != bqop.size()) {
    throw Error(Errc::dimension_mismatch, "vector size differs from problem size");
  }
  if (x.cardinality() != bqop.cardinality) {
    throw Error(Errc::cardinality_violation,
                "vector has " + std::to_string(x.cardinality()) + " ones, expected " +
                    std::to_string(bqop.cardinality));
  }
  return bqop.scale * quadratic_form(bqop.matrix, x);
}

// Solution files ------------------------------------------------------------

Solution parse_solution(std::istream& in, int n) {
  auto values = read_values(in, static_cast<std::size_t>(n), "solution");
  expect_end(in, "solution");
  const bool binary =
      std::all_of(values.begin(), values.end(), [](Value v) { return v == 0 || v == 1; });
  if (binary) {
    std::vector<std::uint8_t> bits(values.begin(), values.end());
    return BinaryVector(std::move(bits));
  }
  std::vector<int> image;
  image.reserve(values.size());
  for (Value v : values) {
    if (v < 1 || v > n) {
      throw Error(Errc::invalid_permutation, "permutation entry out of range 1..n");
    }
    image.push_back(static_cast<int>(v - 1));
  }
  return Permutation(std::move(image));
}

Solution load_solution(const std::filesystem::path& path, int n) {
  auto in = open_input(path);
  return parse_solution(in, n);
}

std::string format_permutation(const Permutation& perm) {
  std::string out;
  for (int i = 0; i < perm.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(perm[i] + 1);
  }
  return out;
}

std::string format_binary(const BinaryVector& x) {
  std::string out;
  for (int i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += x[i] ? '1' : '0';
  }
  return out;
}

// CardBqop files ------------------------------------------------------------

std::string serialize_bqop(const CardBqop& bqop) {
  std::ostringstream out;
  out << "cardbqop " << bqop.size() << ' ' << bqop.cardinality << ' ' << bqop.scale << ' '
      << (bqop.source == BqopSource::raw ? "raw" : "reduced") << '\n';
  write_matrix(out, bqop.matrix);
  return out.str();
}

CardBqop parse_bqop(std::istream& in) {
  std::string magic, n_tok, m_tok, scale_tok, source_tok;
  if (!(in >> magic) || magic != "cardbqop") {
    throw Error(Errc::malformed_token, "missing 'cardbqop' header");
  }
  if (!(in >> n_tok >> m_tok >> scale_tok >> source_tok)) {
    throw Error(Errc::count_mismatch, "truncated cardbqop header");
  }
  const Value n = parse_value(n_tok);
  if (n <= 0 || n > 100000) throw Error(Errc::malformed_token, "bad size " + n_tok);
  BqopSource source;
  if (source_tok == "raw") {
    source = BqopSource::raw;
  } else if (source_tok == "reduced") {
    source = BqopSource::reduced_from_qap;
  } else {
    throw Error(Errc::malformed_token, "unknown source tag '" + source_tok + "'");
  }
  auto b = read_values(in, static_cast<std::size_t>(n * n), "cardbqop matrix");
  expect_end(in, "cardbqop");
  return CardBqop(SymMatrix::from_row_major(static_cast<int>(n), std::move(b), false),
                  static_cast<int>(parse_value(m_tok)), parse_value(scale_tok), source);
}

}  // namespace qapbb
