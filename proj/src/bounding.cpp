#include "qapbb/bounding.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qapbb/error.hpp"

namespace qapbb {

// BounderSpec -------------------------------------------------------------------

BounderSpec BounderSpec::parse(std::string_view text) {
  BounderSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (spec.name.empty()) throw Error(Errc::unknown_bounder, "empty bounder name");
  if (colon == std::string_view::npos) return spec;
  std::string rest(text.substr(colon + 1));
  std::istringstream in(rest);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(Errc::invalid_argument, "bounder parameter '" + item + "' is not key=value");
    }
    spec.parameters[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

std::string BounderSpec::to_string() const {
  std::string out = name;
  char sep = ':';
  for (const auto& [k, v] : parameters) {
    out += sep;
    out += k + "=" + v;
    sep = ',';
  }
  return out;
}

double BounderSpec::number(const std::string& key, double fallback) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::invalid_argument, "bounder parameter " + key + " is not a number");
  }
}

// Combinatorics -------------------------------------------------------------------

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(c);
}

// Exact enumeration -------------------------------------------------------------

namespace {

struct SubsetSearch {
  const SymMatrix& m;
  int f;
  int want;
  std::vector<int> chosen;
  std::vector<int> best_set;
  Value best = std::numeric_limits<Value>::max();
  bool found = false;

  void run(int start, Value cost) {
    const int have = static_cast<int>(chosen.size());
    if (have == want) {
      if (!found || cost < best) {
        best = cost;
        best_set = chosen;
        found = true;
      }
      return;
    }
    for (int i = start; i <= f - (want - have); ++i) {
      const auto row = m.row(i);
      Value add = row[i];
      for (int j : chosen) add += 2 * row[j];
      chosen.push_back(i);
      run(i + 1, cost + add);
      chosen.pop_back();
    }
  }
};

}  // namespace

ExactResult exact_minimum(const ReducedBqop& r, std::uint64_t budget) {
  const int f = r.size();
  if (r.residual < 0 || r.residual > f) {
    throw Error(Errc::infeasible_node, "residual cardinality out of range");
  }
  if (binomial(f, r.residual) > budget) {
    throw Error(Errc::enumeration_budget, "C(" + std::to_string(f) + "," +
                                              std::to_string(r.residual) +
                                              ") exceeds the enumeration budget");
  }
  SubsetSearch search{r.matrix, f, r.residual, {}, {}, 0, false};
  search.chosen.reserve(static_cast<std::size_t>(r.residual));
  search.run(0, 0);
  return {r.offset + search.best, BinaryVector::from_support(f, search.best_set)};
}

Value exact_bound(const ReducedBqop& r, std::uint64_t budget) {
  return exact_minimum(r, budget).value;
}

// Spectral bound ------------------------------------------------------------------

namespace {

/// Pieces of the sphere-slice bound that do not depend on lambda_min.
struct SliceBound {
  double offset = 0;
  double mean_term = 0;    // (m'/f)^2 e^T Q e
  double linear_term = 0;  // 2 (m'/f) |l| rho
  double rho2 = 0;
  double shift = 0;        // eigenvalue safety shift
  Eigen::MatrixXd reduced; // Q restricted to e^T z = 0

  double at(double lambda_min) const {
    const double curvature = lambda_min * rho2;
    const double margin =
        1e-12 * (std::abs(mean_term) + std::abs(linear_term) + std::abs(curvature));
    return offset + mean_term - linear_term + curvature - margin;
  }
};

/// Degenerate residuals have a single completion.
bool forced_value(const ReducedBqop& r, double& out) {
  const int f = r.size();
  if (r.residual == 0) {
    out = static_cast<double>(r.offset);
    return true;
  }
  if (r.residual == f) {
    Value total = r.offset;
    for (Value v : r.matrix.entries()) total += v;
    out = static_cast<double>(total);
    return true;
  }
  return false;
}

SliceBound slice_bound(const ReducedBqop& r, double tolerance) {
  const int f = r.size();
  const double m = r.residual;
  SliceBound s;
  s.offset = static_cast<double>(r.offset);

  // Qe and e^T Q e in exact integer arithmetic.
  std::vector<__int128> row_sum(static_cast<std::size_t>(f), 0);
  __int128 total = 0;
  for (int i = 0; i < f; ++i) {
    for (Value v : r.matrix.row(i)) row_sum[i] += v;
    total += row_sum[i];
  }
  const double ratio = m / f;
  s.mean_term = ratio * ratio * static_cast<double>(total);
  const long double mean_row = static_cast<long double>(total) / f;
  long double proj2 = 0;
  for (int i = 0; i < f; ++i) {
    const long double d = static_cast<long double>(row_sum[i]) - mean_row;
    proj2 += d * d;
  }
  s.rho2 = m * (f - m) / f;
  s.linear_term = 2.0 * ratio * static_cast<double>(std::sqrt(proj2)) * std::sqrt(s.rho2);

  // Householder reflector H with H (e / sqrt f) = e_1; rows/cols 1.. of HQH
  // span the hyperplane.
  Eigen::MatrixXd q(f, f);
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) q(i, j) = static_cast<double>(r.matrix(i, j));
  Eigen::VectorXd w = Eigen::VectorXd::Constant(f, 1.0 / std::sqrt(static_cast<double>(f)));
  w(0) -= 1.0;
  const double wn = w.norm();
  Eigen::MatrixXd hqh = q;
  if (wn > 0) {
    w /= wn;
    const Eigen::VectorXd qw = q * w;
    const double wqw = w.dot(qw);
    hqh = q - 2.0 * w * qw.transpose() - 2.0 * qw * w.transpose() +
          4.0 * wqw * w * w.transpose();
  }
  s.reduced = hqh.bottomRightCorner(f - 1, f - 1);
  s.reduced = 0.5 * (s.reduced + s.reduced.transpose());
  s.shift = tolerance * std::max(1.0, frobenius_norm(r.matrix));
  return s;
}

class SpectralBounder final : public Bounder {
 public:
  explicit SpectralBounder(double tolerance) : tolerance_(tolerance) {}
  std::string_view name() const override { return "spectral"; }
  void bracket(const ReducedBqop& r,
               const std::function<bool(const BracketStep&)>& emit) const override {
    const double v = spectral_bound(r, tolerance_);
    emit({1, v, v});
  }

 private:
  double tolerance_;
};

class ExactBounder final : public Bounder {
 public:
  explicit ExactBounder(std::uint64_t budget) : budget_(budget) {}
  std::string_view name() const override { return "exact"; }
  void bracket(const ReducedBqop& r,
               const std::function<bool(const BracketStep&)>& emit) const override {
    const auto v = static_cast<double>(exact_bound(r, budget_));
    emit({1, v, v});
  }

 private:
  std::uint64_t budget_;
};

/// Brackets the spectral bound by bisection on lambda_min(Q~): Sturm counts
/// on the Householder tridiagonal form, starting from the Gershgorin
/// interval. The last step collapses to its lower end.
class BisectionBounder final : public Bounder {
 public:
  BisectionBounder(double tolerance, int max_steps)
      : tolerance_(tolerance), max_steps_(max_steps) {}
  std::string_view name() const override { return "spectral-bisect"; }

  void bracket(const ReducedBqop& r,
               const std::function<bool(const BracketStep&)>& emit) const override {
    double forced = 0;
    if (forced_value(r, forced)) {
      emit({1, forced, forced});
      return;
    }
    const SliceBound s = slice_bound(r, tolerance_);
    Eigen::Tridiagonalization<Eigen::MatrixXd> tri(s.reduced);
    const Eigen::VectorXd d = tri.diagonal();
    const Eigen::VectorXd e = tri.subDiagonal();
    const int k = static_cast<int>(d.size());

    // Gershgorin below; the smallest diagonal entry (a Rayleigh quotient)
    // above.
    double lo = std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const double radius =
          (i > 0 ? std::abs(e(i - 1)) : 0.0) + (i + 1 < k ? std::abs(e(i)) : 0.0);
      lo = std::min(lo, d(i) - radius);
      hi = std::min(hi, d(i));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(Errc::eigensolver_failure, "non-finite tridiagonal form");
    }

    // Number of eigenvalues of the tridiagonal matrix below x.
    auto count_below = [&](double x) {
      int count = 0;
      double q = 1.0;
      const double tiny = std::numeric_limits<double>::min();
      for (int i = 0; i < k; ++i) {
        const double off = i > 0 ? e(i - 1) : 0.0;
        q = d(i) - x - (i > 0 ? off * off / q : 0.0);
        if (q == 0.0) q = -tiny;
        if (q < 0) ++count;
      }
      return count;
    };

    const double width_stop = tolerance_ * std::max(1.0, frobenius_norm(r.matrix));
    double a_prev = -std::numeric_limits<double>::infinity();
    double b_prev = std::numeric_limits<double>::infinity();
    for (int p = 1;; ++p) {
      const bool last = p >= max_steps_ || hi - lo <= width_stop;
      const double a = std::max(a_prev, s.at(lo - s.shift));
      const double b = last ? a : std::max(a, std::min(b_prev, s.at(hi)));
      if (!emit({p, a, b}) || last) return;
      a_prev = a;
      b_prev = b;
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > 0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }

 private:
  double tolerance_;
  int max_steps_;
};

}  // namespace

double spectral_bound(const ReducedBqop& r, double tolerance) {
  double forced = 0;
  if (forced_value(r, forced)) return forced;
  const SliceBound s = slice_bound(r, tolerance);
  if (s.reduced.size() == 0) return s.at(0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.reduced, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::eigensolver_failure, "symmetric eigensolver did not converge");
  }
  return s.at(solver.eigenvalues()(0) - s.shift);
}

// Registry and the bracketing contract ------------------------------------------

std::unique_ptr<Bounder> make_bounder(const BounderSpec& spec) {
  if (spec.name == "spectral") {
    return std::make_unique<SpectralBounder>(spec.number("tol", 1e-9));
  }
  if (spec.name == "spectral-bisect") {
    return std::make_unique<BisectionBounder>(spec.number("tol", 1e-9),
                                              static_cast<int>(spec.number("steps", 64)));
  }
  if (spec.name == "exact") {
    return std::make_unique<ExactBounder>(
        static_cast<std::uint64_t>(spec.number("budget", 50'000'000)));
  }
  throw Error(Errc::unknown_bounder, "no bounder named '" + spec.name + "'");
}

std::vector<std::string> bounder_names() { return {"exact", "spectral", "spectral-bisect"}; }

Verdict bound_node(const ReducedBqop& r, double target, const Bounder& bounder) {
  Verdict v;
  bool decided = false;
  try {
    bounder.bracket(r, [&](const BracketStep& step) {
      v.trace.push_back(step);
      if (target <= step.a) {
        v.kind = VerdictKind::pruned;
        v.certificate = step.a;
        decided = true;
      } else if (step.b < target) {
        v.kind = VerdictKind::active;
        v.certificate = step.b;
        decided = true;
      }
      return !decided;
    });
  } catch (const std::exception&) {
    decided = false;
  }
  if (!decided) {
    v.kind = VerdictKind::active;
    v.certificate = std::numeric_limits<double>::infinity();
    v.degraded = true;
  }
  return v;
}

Verdict bound_node(const ReducedBqop& r, double target, const BounderSpec& spec) {
  return bound_node(r, target, *make_bounder(spec));
}

}  // namespace qapbb
