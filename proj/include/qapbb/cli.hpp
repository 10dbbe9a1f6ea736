#pragma once

// Command-line front end. Exit codes: 0 certified or ok, 1 refuted,
// 2 budget exhausted, 3 usage error, 4 invalid input or failed computation,
// 5 file error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qapbb/instance.hpp"
#include "qapbb/reduction.hpp"

namespace qapbb {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_refuted = 1,
  exit_budget = 2,
  exit_usage = 3,
  exit_invalid = 4,
  exit_io = 5,
};

/// A problem read from disk: either a cardinality BQOP file or a QAPLIB
/// instance with selector structure (then `qap` and `reduction` are set).
struct Problem {
  CardBqop bqop;
  std::optional<QapInstance> qap;
  std::optional<SelectorReduction> reduction;
};

/// Detects the format from the first token. A QAPLIB instance without
/// selector structure fails with not_selector_structure.
Problem load_problem(const std::filesystem::path& path);

/// Parses "3,7,12" (1-based) into 0-based indices.
std::vector<int> parse_index_list(const std::string& text, int n);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qapbb
