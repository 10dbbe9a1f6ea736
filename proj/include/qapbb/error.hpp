#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qapbb {

enum class Errc {
  malformed_token,
  count_mismatch,
  asymmetric_matrix,
  nonzero_diagonal,
  dimension_mismatch,
  cardinality_violation,
  invalid_permutation,
  not_selector_structure,
  group_cap_exceeded,
  infeasible_node,
  zero_matrix,
  eigensolver_failure,
  enumeration_budget,
  budget_exhausted,
  unknown_bounder,
  invalid_argument,
  io_error,
};

std::string_view to_string(Errc code);

/// Every library failure is reported through this type; `code()` tells the
/// failure classes apart.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qapbb
