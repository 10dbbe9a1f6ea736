#pragma once

// Clone facilities and the QAP -> cardinality-BQOP reduction.
//
// Facilities i and k are clones when their flow rows agree everywhere except
// at positions i and k. Clone classes collapse the n x n assignment into an
// n x |classes| one; when exactly one class carries flow (among its own
// members only), the QAP is a subset-selection problem over locations.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qapbb/instance.hpp"

namespace qapbb {

struct CloneClasses {
  /// Each class sorted ascending; classes ordered by smallest member.
  std::vector<std::vector<int>> classes;
  /// class_of[i] is the class index of facility i.
  std::vector<int> class_of;
  /// Flow between classes; diagonal is the within-class flow (0 for
  /// singleton classes).
  SymMatrix reduced;

  int count() const noexcept { return static_cast<int>(classes.size()); }
  int size_of(int u) const noexcept { return static_cast<int>(classes[u].size()); }
};

CloneClasses find_clones(const SymMatrix& flows);

/// Class index u when `reduced` has exactly one nonzero entry, located at
/// (u,u) and positive.
std::optional<int> selector_class(const CloneClasses& classes);

struct SelectorReduction {
  CardBqop bqop;
  CloneClasses classes;
  int selected = 0;
};

/// Throws not_selector_structure when the flow matrix is not of selector type.
SelectorReduction reduce_selector(const QapInstance& inst);
CardBqop reduce_to_bqop(const QapInstance& inst);

// General reduced model -----------------------------------------------------

/// One objective coefficient on x_{iu} * x_{jv} (0-based).
struct ModelTerm {
  int location_i = 0;
  int class_u = 0;
  int location_j = 0;
  int class_v = 0;
  Value coef = 0;
  friend bool operator==(const ModelTerm&, const ModelTerm&) = default;
};

/// Binary variables x_{iu} (location i hosts a facility of class u):
///   min  sum a~_uv b_ij x_iu x_jv
///   s.t. sum_i x_iu = mu_u  for every class u
///        sum_u x_iu = 1     for every location i
struct GeneralReducedModel {
  int locations = 0;
  std::vector<int> class_sizes;
  std::vector<ModelTerm> objective;

  int class_count() const noexcept { return static_cast<int>(class_sizes.size()); }
  int variable_count() const noexcept { return locations * class_count(); }
  int class_size_rows() const noexcept { return class_count(); }
  int assignment_rows() const noexcept { return locations; }

  friend bool operator==(const GeneralReducedModel&, const GeneralReducedModel&) = default;
};

GeneralReducedModel emit_general_model(const QapInstance& inst);

/// Objective of the assignment where location i hosts class class_at[i].
/// Throws cardinality_violation when the class sizes are not met.
Value evaluate_general_model(const GeneralReducedModel& model,
                             std::span<const int> class_at);

/// Sparse text layout (1-based):
///   general-model <locations> <classes>
///   class <u> <mu_u>                      one per class
///   objective <count>
///   <i> <u> <j> <v> <coef>                one per nonzero term
///   end
std::string serialize_general_model(const GeneralReducedModel& model);
GeneralReducedModel parse_general_model(std::istream& in);

// Solution translation -------------------------------------------------------

/// x_j = 1 iff location j hosts a member of class `selected`.
BinaryVector permutation_to_binary(const Permutation& perm, const CloneClasses& classes,
                                   int selected);

/// Canonical permutation: members of `selected` ascending onto support(x)
/// ascending, the other facilities ascending onto the remaining locations.
Permutation binary_to_permutation(const BinaryVector& x, const CloneClasses& classes,
                                  int selected);

}  // namespace qapbb
