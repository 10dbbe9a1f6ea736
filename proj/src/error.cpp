#include "qapbb/error.hpp"

namespace qapbb {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::malformed_token: return "malformed_token";
    case Errc::count_mismatch: return "count_mismatch";
    case Errc::asymmetric_matrix: return "asymmetric_matrix";
    case Errc::nonzero_diagonal: return "nonzero_diagonal";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::cardinality_violation: return "cardinality_violation";
    case Errc::invalid_permutation: return "invalid_permutation";
    case Errc::not_selector_structure: return "not_selector_structure";
    case Errc::group_cap_exceeded: return "group_cap_exceeded";
    case Errc::infeasible_node: return "infeasible_node";
    case Errc::zero_matrix: return "zero_matrix";
    case Errc::eigensolver_failure: return "eigensolver_failure";
    case Errc::enumeration_budget: return "enumeration_budget";
    case Errc::budget_exhausted: return "budget_exhausted";
    case Errc::unknown_bounder: return "unknown_bounder";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace qapbb
