#pragma once

// Machine (JSON, CSV) and human (text) renderings of search results. None of
// them carry timing or thread counts, so equal results print identically.

#include <string>

#include "json.hpp"
#include "qapbb/bb.hpp"
#include "qapbb/estimator.hpp"

namespace qapbb {

std::string to_string(Outcome outcome);
std::string to_string(NodeStatus status);

nlohmann::ordered_json to_json(const BbReport& report);
nlohmann::ordered_json to_json(const EstimatorReport& report);

/// One line per depth.
std::string to_csv(const BbReport& report);
/// One line per depth: exact levels have empty sample columns.
std::string to_csv(const EstimatorReport& report);

std::string to_text(const BbReport& report);
std::string to_text(const EstimatorReport& report);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double v);

}  // namespace qapbb
