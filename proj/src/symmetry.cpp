#include "qapbb/symmetry.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <thread>

#include "qapbb/error.hpp"

namespace qapbb {

// PermutationGroup -----------------------------------------------------------

PermutationGroup::PermutationGroup(int n) : n_(n), elements_{Permutation::identity(n)} {}

PermutationGroup::PermutationGroup(int n, std::vector<Permutation> elements)
    : n_(n), elements_(std::move(elements)) {
  for (const auto& p : elements_) {
    if (p.size() != n_) throw Error(Errc::invalid_argument, "group element of wrong degree");
  }
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  if (!contains(Permutation::identity(n_))) {
    throw Error(Errc::invalid_argument, "group element list lacks the identity");
  }
}

bool PermutationGroup::contains(const Permutation& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

bool PermutationGroup::is_closed() const {
  for (const auto& p : elements_) {
    if (!contains(p.inverse())) return false;
    for (const auto& q : elements_) {
      if (!contains(p.compose(q))) return false;
    }
  }
  return true;
}

// Discovery ------------------------------------------------------------------

namespace {

class AutomorphismSearch {
 public:
  AutomorphismSearch(const SymMatrix& b, std::size_t cap, std::atomic<std::size_t>& found)
      : b_(b), n_(b.size()), cap_(cap), found_(found) {
    // Row signatures: sorted multisets of row entries, mapped to class ids.
    std::map<std::vector<Value>, int> ids;
    signature_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      std::vector<Value> row(b.row(i).begin(), b.row(i).end());
      std::sort(row.begin(), row.end());
      signature_[i] = ids.emplace(std::move(row), static_cast<int>(ids.size())).first->second;
    }
    // by_value_[r]: (value, column) pairs of row r sorted by value.
    by_value_.resize(n_);
    same_count_.resize(static_cast<std::size_t>(n_) * n_);
    for (int r = 0; r < n_; ++r) {
      auto& row = by_value_[r];
      row.reserve(n_);
      for (int c = 0; c < n_; ++c) row.emplace_back(b(r, c), c);
      std::sort(row.begin(), row.end());
      for (int c = 0; c < n_; ++c) {
        auto [lo, hi] = std::equal_range(row.begin(), row.end(), std::pair{b(r, c), -1},
                                         [](const auto& x, const auto& y) { return x.first < y.first; });
        same_count_[static_cast<std::size_t>(r) * n_ + c] = static_cast<int>(hi - lo);
      }
    }
    image_.assign(n_, -1);
    used_.assign(n_, 0);
  }

  std::vector<int> root_candidates() const {
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
      if (signature_[j] == signature_[0] && b_(j, j) == b_(0, 0)) out.push_back(j);
    return out;
  }

  void run_from(int root_image, std::vector<Permutation>& out) {
    if (n_ == 0) return;
    image_[0] = root_image;
    used_[root_image] = 1;
    extend(1, out);
    used_[root_image] = 0;
    image_[0] = -1;
  }

 private:
  bool consistent(int i, int c) const {
    if (used_[c] || signature_[c] != signature_[i] || b_(c, c) != b_(i, i)) return false;
    const auto row_i = b_.row(i);
    const auto row_c = b_.row(c);
    for (int g = 0; g < i; ++g) {
      if (row_c[image_[g]] != row_i[g]) return false;
    }
    return true;
  }

  void extend(int i, std::vector<Permutation>& out) {
    if (i == n_) {
      if (found_.fetch_add(1) + 1 > cap_) {
        throw Error(Errc::group_cap_exceeded,
                    "automorphism group exceeds " + std::to_string(cap_) + " elements");
      }
      out.emplace_back(image_);
      return;
    }
    // Anchor on the earlier index whose value class around i is smallest.
    int anchor = 0;
    int best = same_count_[static_cast<std::size_t>(0) * n_ + i];
    for (int g = 1; g < i && best > 1; ++g) {
      const int count = same_count_[static_cast<std::size_t>(g) * n_ + i];
      if (count < best) {
        best = count;
        anchor = g;
      }
    }
    const auto& row = by_value_[image_[anchor]];
    const Value want = b_(anchor, i);
    auto lo = std::lower_bound(row.begin(), row.end(), std::pair{want, -1});
    for (auto it = lo; it != row.end() && it->first == want; ++it) {
      const int c = it->second;
      if (!consistent(i, c)) continue;
      image_[i] = c;
      used_[c] = 1;
      extend(i + 1, out);
      used_[c] = 0;
      image_[i] = -1;
    }
  }

  const SymMatrix& b_;
  int n_;
  std::size_t cap_;
  std::atomic<std::size_t>& found_;
  std::vector<int> signature_;
  std::vector<std::vector<std::pair<Value, int>>> by_value_;
  std::vector<int> same_count_;
  std::vector<int> image_;
  std::vector<char> used_;
};

}  // namespace

PermutationGroup discover_automorphisms(const SymMatrix& b, const DiscoveryOptions& options) {
  const int n = b.size();
  if (n == 0) return PermutationGroup(0);
  std::atomic<std::size_t> found{0};
  const auto roots = AutomorphismSearch(b, options.max_elements, found).root_candidates();

  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(roots.size())));
  std::vector<std::vector<Permutation>> parts(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::atomic<std::size_t> next{0};
  auto work = [&](int w) {
    try {
      AutomorphismSearch search(b, options.max_elements, found);
      for (std::size_t k; (k = next.fetch_add(1)) < roots.size();) {
        search.run_from(roots[k], parts[w]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next.store(roots.size());
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Permutation> all;
  for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(all));
  return PermutationGroup(n, std::move(all));
}

// Stabilizers and orbits ------------------------------------------------------

PermutationGroup setwise_stabilizer(const PermutationGroup& group, std::span<const int> zeros,
                                    std::span<const int> ones) {
  const int n = group.degree();
  std::vector<signed char> tag(static_cast<std::size_t>(n), 0);
  for (int i : zeros) tag.at(i) = 1;
  for (int i : ones) {
    if (tag.at(i) != 0) throw Error(Errc::invalid_argument, "fixed sets overlap");
    tag[i] = 2;
  }
  std::vector<Permutation> kept;
  for (const auto& p : group.elements()) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = tag[p[i]] == tag[i];
    if (ok) kept.push_back(p);
  }
  return PermutationGroup(n, std::move(kept));
}

PermutationGroup point_stabilizer(const PermutationGroup& group, int point) {
  std::vector<Permutation> kept;
  for (const auto& p : group.elements())
    if (p[point] == point) kept.push_back(p);
  return PermutationGroup(group.degree(), std::move(kept));
}

OrbitSet orbits(const PermutationGroup& group, std::span<const int> ground) {
  const int n = group.degree();
  std::vector<char> in_ground(static_cast<std::size_t>(n), 0);
  for (int i : ground) in_ground.at(i) = 1;

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& p : group.elements()) {
    if (p.is_identity()) continue;
    for (int i : ground) {
      const int j = p[i];
      if (!in_ground[j]) {
        throw Error(Errc::invalid_argument, "group does not preserve the ground set");
      }
      const int ri = find(i);
      const int rj = find(j);
      if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }

  OrbitSet out;
  out.ground.assign(ground.begin(), ground.end());
  std::sort(out.ground.begin(), out.ground.end());
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i : out.ground) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.orbits.size());
      out.orbits.emplace_back();
    }
    out.orbits[slot[root]].push_back(i);
  }
  return out;
}

BinaryVector apply(const Permutation& pi, const BinaryVector& x) {
  if (pi.size() != x.size()) {
    throw Error(Errc::dimension_mismatch, "permutation and vector sizes differ");
  }
  BinaryVector y(x.size());
  for (int i = 0; i < x.size(); ++i) y.set(i, x[pi[i]]);
  return y;
}

std::vector<BinaryVector> expand_solution(const PermutationGroup& group, const BinaryVector& x,
                                          const SymMatrix* b) {
  std::vector<BinaryVector> images;
  images.reserve(group.order());
  for (const auto& p : group.elements()) images.push_back(apply(p, x));
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());
  if (b != nullptr) {
    const Value value = quadratic_form(*b, x);
    for (const auto& y : images) {
      if (quadratic_form(*b, y) != value) {
        throw Error(Errc::invalid_argument, "group element changes the objective value");
      }
    }
  }
  return images;
}

}  // namespace qapbb
