#include "qapbb/subproblem.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "qapbb/error.hpp"

namespace qapbb {

// NodeKey -------------------------------------------------------------------

NodeKey::NodeKey(int n) : state_(static_cast<std::size_t>(n), VarState::free) {}

NodeKey::NodeKey(int n, std::span<const int> zeros, std::span<const int> ones) : NodeKey(n) {
  auto fix = [&](int i, VarState s) {
    if (i < 0 || i >= n) throw Error(Errc::invalid_argument, "fixed index out of range");
    if (state_[i] != VarState::free) {
      throw Error(Errc::invalid_argument, "index " + std::to_string(i + 1) + " fixed twice");
    }
    state_[i] = s;
  };
  for (int i : zeros) fix(i, VarState::zero);
  for (int i : ones) fix(i, VarState::one);
  zeros_ = static_cast<int>(zeros.size());
  ones_ = static_cast<int>(ones.size());
}

NodeKey NodeKey::from_states(std::vector<VarState> states) {
  NodeKey key;
  for (VarState s : states) {
    if (s == VarState::zero) {
      ++key.zeros_;
    } else if (s == VarState::one) {
      ++key.ones_;
    } else if (s != VarState::free) {
      throw Error(Errc::invalid_argument, "unknown variable state");
    }
  }
  key.state_ = std::move(states);
  return key;
}

std::vector<int> NodeKey::collect(VarState s) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (state_[i] == s) out.push_back(i);
  return out;
}

NodeKey NodeKey::with_zeros(std::span<const int> vars) const {
  NodeKey out = *this;
  for (int i : vars) {
    if (out.state_.at(i) != VarState::free) {
      throw Error(Errc::invalid_argument, "branching on a fixed variable");
    }
    out.state_[i] = VarState::zero;
    ++out.zeros_;
  }
  return out;
}

NodeKey NodeKey::with_one(int var) const {
  NodeKey out = *this;
  if (out.state_.at(var) != VarState::free) {
    throw Error(Errc::invalid_argument, "branching on a fixed variable");
  }
  out.state_[var] = VarState::one;
  ++out.ones_;
  return out;
}

// Reduced problem --------------------------------------------------------------

int residual_cardinality(const CardBqop& bqop, const NodeKey& key) {
  return bqop.cardinality - key.one_count();
}

bool is_feasible(const CardBqop& bqop, const NodeKey& key) {
  const int residual = residual_cardinality(bqop, key);
  return residual >= 0 && residual <= key.free_count();
}

ReducedBqop reduce(const CardBqop& bqop, const NodeKey& key) {
  if (key.size() != bqop.size()) {
    throw Error(Errc::dimension_mismatch, "node key size differs from problem size");
  }
  if (!is_feasible(bqop, key)) {
    throw Error(Errc::infeasible_node, "no completion satisfies the cardinality");
  }
  const auto& b = bqop.matrix;
  const auto ones = key.ones();
  ReducedBqop r;
  r.free = key.free();
  r.residual = residual_cardinality(bqop, key);
  const int f = static_cast<int>(r.free.size());

  Value offset = 0;
  for (int j : ones)
    for (int k : ones) offset += b(j, k);
  r.offset = bqop.scale * offset;

  r.matrix = SymMatrix(f);
  for (int a = 0; a < f; ++a) {
    const auto row = b.row(r.free[a]);
    Value shift = 0;
    for (int k : ones) shift += row[k];
    r.matrix.set(a, a, bqop.scale * (row[r.free[a]] + 2 * shift));
    for (int c = a + 1; c < f; ++c) r.matrix.set(a, c, bqop.scale * row[r.free[c]]);
  }
  return r;
}

Value ReducedBqop::value(const BinaryVector& y) const {
  return offset + quadratic_form(matrix, y);
}

BinaryVector lift(const NodeKey& key, std::span<const int> free, const BinaryVector& y) {
  if (static_cast<int>(free.size()) != y.size()) {
    throw Error(Errc::dimension_mismatch, "free-variable vector has the wrong length");
  }
  BinaryVector x(key.size());
  for (int i : key.ones()) x.set(i, true);
  for (int a = 0; a < y.size(); ++a) x.set(free[a], y[a]);
  return x;
}

// QUBO ------------------------------------------------------------------------

double QuboInstance::value(const BinaryVector& y) const {
  if (y.size() != size()) throw Error(Errc::dimension_mismatch, "QUBO vector length");
  const auto on = y.support();
  long double total = offset;
  for (int i : on)
    for (int j : on) total += at(i, j);
  return static_cast<double>(total);
}

QuboInstance to_qubo(const ReducedBqop& r, double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda)) {
    throw Error(Errc::invalid_argument, "penalty parameter must be positive and finite");
  }
  const int f = r.size();
  const double m = r.residual;
  QuboInstance out;
  out.free = r.free;
  out.lambda = lambda;
  out.q.resize(static_cast<std::size_t>(f) * f);
  for (int i = 0; i < f; ++i) {
    for (int j = 0; j < f; ++j) {
      const double base = static_cast<double>(r.matrix(i, j));
      out.q[static_cast<std::size_t>(i) * f + j] =
          i == j ? base + lambda * (1.0 - 2.0 * m) : base + lambda;
    }
  }
  out.offset = static_cast<double>(r.offset) + lambda * m * m;
  return out;
}

double frobenius_norm(const SymMatrix& m) {
  long double sum = 0;
  for (Value v : m.entries()) sum += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(sum));
}

double default_lambda(const ReducedBqop& r) {
  if (r.matrix.is_zero()) {
    throw Error(Errc::zero_matrix, "penalty rule needs a nonzero reduced matrix");
  }
  return 1.0e8 / frobenius_norm(r.matrix);
}

namespace {
std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string serialize_qubo(const QuboInstance& qubo) {
  std::ostringstream out;
  const int f = qubo.size();
  out << "qubo " << f << ' ' << real(qubo.lambda) << ' ' << real(qubo.offset) << '\n';
  out << "vars";
  for (int v : qubo.free) out << ' ' << v + 1;
  out << '\n';
  for (int i = 0; i < f; ++i)
    for (int j = i; j < f; ++j)
      if (qubo.at(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << real(qubo.at(i, j)) << '\n';
  return out.str();
}

QuboInstance parse_qubo(std::istream& in) {
  std::string word;
  int f = 0;
  QuboInstance out;
  if (!(in >> word) || word != "qubo" || !(in >> f >> out.lambda >> out.offset) || f < 0) {
    throw Error(Errc::malformed_token, "bad qubo header");
  }
  if (!(in >> word) || word != "vars") throw Error(Errc::malformed_token, "missing vars line");
  out.free.resize(static_cast<std::size_t>(f));
  for (auto& v : out.free) {
    if (!(in >> v)) throw Error(Errc::count_mismatch, "truncated vars line");
    --v;
  }
  out.q.assign(static_cast<std::size_t>(f) * f, 0.0);
  int i = 0, j = 0;
  double q = 0;
  while (in >> i >> j >> q) {
    if (i < 1 || j < 1 || i > f || j > f) throw Error(Errc::malformed_token, "entry out of range");
    out.q[static_cast<std::size_t>(i - 1) * f + (j - 1)] = q;
    out.q[static_cast<std::size_t>(j - 1) * f + (i - 1)] = q;
  }
  if (!in.eof()) throw Error(Errc::malformed_token, "unreadable qubo entry");
  return out;
}

}  // namespace qapbb
