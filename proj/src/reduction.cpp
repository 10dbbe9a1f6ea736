#include "qapbb/reduction.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <sstream>

#include "qapbb/error.hpp"

namespace qapbb {

namespace {

bool are_clones(const SymMatrix& a, int i, int k) {
  const auto ri = a.row(i);
  const auto rk = a.row(k);
  for (int h = 0; h < a.size(); ++h) {
    if (h != i && h != k && ri[h] != rk[h]) return false;
  }
  return true;
}

}  // namespace

CloneClasses find_clones(const SymMatrix& flows) {
  const int n = flows.size();
  CloneClasses out;
  out.class_of.assign(static_cast<std::size_t>(n), -1);

  // The relation is transitive, so comparing against each class's first
  // member is enough; the full pairwise check below confirms it.
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < out.count(); ++u) {
      if (are_clones(flows, out.classes[u].front(), i)) {
        out.class_of[i] = u;
        out.classes[u].push_back(i);
        break;
      }
    }
    if (out.class_of[i] < 0) {
      out.class_of[i] = out.count();
      out.classes.push_back({i});
    }
  }

  const int m = out.count();
  out.reduced = SymMatrix(m);
  std::vector<char> seen(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      const int u = out.class_of[i];
      const int v = out.class_of[k];
      if (u == v && !are_clones(flows, i, k)) {
        throw Error(Errc::invalid_argument, "clone relation is not transitive");
      }
      char& s = seen[static_cast<std::size_t>(u) * m + v];
      if (!s) {
        out.reduced.set(u, v, flows(i, k));
        seen[static_cast<std::size_t>(v) * m + u] = 1;
        s = 1;
      } else if (out.reduced(u, v) != flows(i, k)) {
        throw Error(Errc::invalid_argument, "reduced flow is not well defined");
      }
    }
  }
  return out;
}

std::optional<int> selector_class(const CloneClasses& classes) {
  const int m = classes.count();
  std::optional<int> found;
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      if (classes.reduced(u, v) == 0) continue;
      if (u != v || found) return std::nullopt;
      found = u;
    }
  }
  if (found && classes.reduced(*found, *found) < 0) return std::nullopt;
  return found;
}

SelectorReduction reduce_selector(const QapInstance& inst) {
  auto classes = find_clones(inst.flows);
  const auto u = selector_class(classes);
  if (!u) {
    throw Error(Errc::not_selector_structure,
                "reduced flow matrix does not have a single positive diagonal entry");
  }
  CardBqop bqop(inst.distances, classes.size_of(*u), classes.reduced(*u, *u),
                BqopSource::reduced_from_qap);
  return {std::move(bqop), std::move(classes), *u};
}

CardBqop reduce_to_bqop(const QapInstance& inst) { return reduce_selector(inst).bqop; }

// General reduced model -----------------------------------------------------

GeneralReducedModel emit_general_model(const QapInstance& inst) {
  const auto classes = find_clones(inst.flows);
  const int n = inst.size();
  const int m = classes.count();
  GeneralReducedModel model;
  model.locations = n;
  for (int u = 0; u < m; ++u) model.class_sizes.push_back(classes.size_of(u));
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < m; ++u) {
      for (int j = 0; j < n; ++j) {
        const Value b = inst.distances(i, j);
        if (b == 0) continue;
        for (int v = 0; v < m; ++v) {
          const Value a = classes.reduced(u, v);
          if (a != 0) model.objective.push_back({i, u, j, v, a * b});
        }
      }
    }
  }
  return model;
}

Value evaluate_general_model(const GeneralReducedModel& model,
                             std::span<const int> class_at) {
  if (static_cast<int>(class_at.size()) != model.locations) {
    throw Error(Errc::dimension_mismatch, "assignment length differs from location count");
  }
  std::vector<int> counts(model.class_sizes.size(), 0);
  for (int u : class_at) {
    if (u < 0 || u >= model.class_count()) {
      throw Error(Errc::invalid_argument, "class index out of range");
    }
    ++counts[u];
  }
  if (counts != model.class_sizes) {
    throw Error(Errc::cardinality_violation, "class sizes not met");
  }
  Value total = 0;
  for (const auto& t : model.objective) {
    if (class_at[t.location_i] == t.class_u && class_at[t.location_j] == t.class_v) {
      total += t.coef;
    }
  }
  return total;
}

std::string serialize_general_model(const GeneralReducedModel& model) {
  std::ostringstream out;
  out << "general-model " << model.locations << ' ' << model.class_count() << '\n';
  for (int u = 0; u < model.class_count(); ++u) {
    out << "class " << u + 1 << ' ' << model.class_sizes[u] << '\n';
  }
  out << "objective " << model.objective.size() << '\n';
  for (const auto& t : model.objective) {
    out << t.location_i + 1 << ' ' << t.class_u + 1 << ' ' << t.location_j + 1 << ' '
        << t.class_v + 1 << ' ' << t.coef << '\n';
  }
  out << "end\n";
  return out.str();
}

GeneralReducedModel parse_general_model(std::istream& in) {
  auto fail = [](const std::string& what) -> void {
    throw Error(Errc::malformed_token, "general model: " + what);
  };
  std::string word;
  GeneralReducedModel model;
  int m = 0;
  if (!(in >> word) || word != "general-model") fail("missing header");
  if (!(in >> model.locations >> m) || model.locations < 0 || m < 0) fail("bad header");
  model.class_sizes.assign(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < m; ++k) {
    int u = 0, size = 0;
    if (!(in >> word) || word != "class" || !(in >> u >> size) || u != k + 1) {
      fail("bad class line");
    }
    model.class_sizes[k] = size;
  }
  std::size_t count = 0;
  if (!(in >> word) || word != "objective" || !(in >> count)) fail("missing objective");
  model.objective.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    ModelTerm term;
    if (!(in >> term.location_i >> term.class_u >> term.location_j >> term.class_v >>
          term.coef)) {
      fail("truncated objective");
    }
    --term.location_i;
    --term.class_u;
    --term.location_j;
    --term.class_v;
    if (term.location_i < 0 || term.location_i >= model.locations || term.location_j < 0 ||
        term.location_j >= model.locations || term.class_u < 0 || term.class_u >= m ||
        term.class_v < 0 || term.class_v >= m) {
      fail("term index out of range");
    }
    model.objective.push_back(term);
  }
  if (!(in >> word) || word != "end") fail("missing end marker");
  return model;
}

// Solution translation -------------------------------------------------------

BinaryVector permutation_to_binary(const Permutation& perm, const CloneClasses& classes,
                                   int selected) {
  const int n = static_cast<int>(classes.class_of.size());
  if (perm.size() != n) {
    throw Error(Errc::dimension_mismatch, "permutation size differs from instance size");
  }
  BinaryVector x(n);
  for (int i : classes.classes.at(selected)) x.set(perm[i], true);
  return x;
}

Permutation binary_to_permutation(const BinaryVector& x, const CloneClasses& classes,
                                  int selected) {
  const int n = static_cast<int>(classes.class_of.size());
  if (x.size() != n) {
    throw Error(Errc::dimension_mismatch, "vector size differs from instance size");
  }
  const auto& members = classes.classes.at(selected);
  if (x.cardinality() != static_cast<int>(members.size())) {
    throw Error(Errc::cardinality_violation,
                "vector cardinality differs from the selected class size");
  }
  std::vector<int> image(static_cast<std::size_t>(n), -1);
  const auto on = x.support();
  for (std::size_t k = 0; k < members.size(); ++k) image[members[k]] = on[k];
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (image[i] >= 0) continue;
    while (x[next]) ++next;
    image[i] = next++;
  }
  return Permutation(std::move(image));
}

}  // namespace qapbb
