#include "qapbb/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qapbb {

using Json = nlohmann::ordered_json;

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::certified: return "certified";
    case Outcome::refuted: return "refuted";
    case Outcome::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

std::string to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::infeasible: return "infeasible";
    case NodeStatus::leaf: return "leaf";
    case NodeStatus::refuted: return "refuted";
    case NodeStatus::pruned: return "pruned";
    case NodeStatus::active: return "active";
  }
  return "unknown";
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

Json real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json termination(const std::map<int, TerminationStats>& by_step) {
  Json rows = Json::array();
  for (const auto& [step, s] : by_step) {
    const double count = static_cast<double>(s.count);
    rows.push_back({{"step", step},
                    {"count", s.count},
                    {"mean_a", real(s.sum_a / count)},
                    {"mean_b", real(s.sum_b / count)}});
  }
  return rows;
}

}  // namespace

Json to_json(const BbReport& report) {
  Json j;
  j["kind"] = "certify";
  j["outcome"] = to_string(report.outcome);
  j["target"] = real(report.target);
  j["bounder"] = report.bounder;
  j["total_nodes"] = report.total_nodes();
  j["bound_calls"] = report.bound_calls;
  j["bracket_steps"] = report.bracket_steps;
  j["spilled_nodes"] = report.spilled_nodes;
  if (report.witness) {
    Json support = Json::array();
    for (int i : report.witness->support()) support.push_back(i + 1);
    j["witness"] = {{"value", report.witness_value}, {"support", support}};
  } else {
    j["witness"] = nullptr;
  }
  Json depths = Json::array();
  for (std::size_t d = 0; d < report.depths.size(); ++d) {
    const auto& s = report.depths[d];
    Json orbit_sizes = Json::object();
    for (const auto& [size, count] : s.orbit_sizes) orbit_sizes[std::to_string(size)] = count;
    depths.push_back({{"depth", d},
                      {"nodes", s.nodes},
                      {"infeasible", s.infeasible},
                      {"leaves", s.leaves},
                      {"refuted", s.refuted},
                      {"pruned", s.pruned},
                      {"active", s.active},
                      {"degraded", s.degraded},
                      {"orbit_sizes", orbit_sizes}});
  }
  j["depths"] = depths;
  j["termination"] = {{"pruned", termination(report.pruned_by_step)},
                      {"active", termination(report.active_by_step)}};
  return j;
}

Json to_json(const EstimatorReport& report) {
  Json j;
  j["kind"] = "estimate";
  j["target"] = real(report.target);
  j["bounder"] = report.bounder;
  j["seed"] = report.seed;
  j["switch_depth"] = report.switch_depth ? Json(*report.switch_depth) : Json(nullptr);
  j["exact_counts"] = report.exact_counts;
  Json rows = Json::array();
  for (const auto& s : report.sampled) {
    rows.push_back({{"depth", s.depth},
                    {"carried", s.carried},
                    {"sampled", s.sampled},
                    {"active", s.active},
                    {"estimate", real(s.estimate)},
                    {"rate", real(s.rate())}});
  }
  j["sampled"] = rows;
  j["total_estimate"] = real(report.total_estimate);
  j["expanded_nodes"] = report.expanded_nodes;
  j["budget_exhausted"] = report.budget_exhausted;
  return j;
}

std::string to_csv(const BbReport& report) {
  std::ostringstream out;
  out << "depth,nodes,infeasible,leaves,refuted,pruned,active,degraded\n";
  for (std::size_t d = 0; d < report.depths.size(); ++d) {
    const auto& s = report.depths[d];
    out << d << ',' << s.nodes << ',' << s.infeasible << ',' << s.leaves << ',' << s.refuted << ','
        << s.pruned << ',' << s.active << ',' << s.degraded << '\n';
  }
  return out.str();
}

std::string to_csv(const EstimatorReport& report) {
  std::ostringstream out;
  out << "depth,nodes,carried,sampled,active,estimate,rate\n";
  for (std::size_t d = 0; d < report.exact_counts.size(); ++d) {
    out << d << ',' << report.exact_counts[d] << ",,,,,\n";
  }
  for (const auto& s : report.sampled) {
    out << s.depth << ",," << s.carried << ',' << s.sampled << ',' << s.active << ','
        << format_real(s.estimate) << ',' << format_real(s.rate()) << '\n';
  }
  return out.str();
}

std::string to_text(const BbReport& report) {
  std::ostringstream out;
  out << "outcome      " << to_string(report.outcome) << '\n'
      << "target       " << format_real(report.target) << '\n'
      << "bounder      " << report.bounder << '\n'
      << "nodes        " << report.total_nodes() << '\n'
      << "depth        " << report.depths.size() << '\n'
      << "pruned       " << report.count(NodeStatus::pruned) << '\n'
      << "active       " << report.count(NodeStatus::active) << '\n'
      << "leaves       " << report.count(NodeStatus::leaf) << '\n';
  if (report.witness) {
    out << "witness      " << report.witness_value << " at";
    for (int i : report.witness->support()) out << ' ' << i + 1;
    out << '\n';
  }
  return out.str();
}

std::string to_text(const EstimatorReport& report) {
  std::ostringstream out;
  out << "target       " << format_real(report.target) << '\n'
      << "bounder      " << report.bounder << '\n'
      << "seed         " << report.seed << '\n'
      << "switch depth " << (report.switch_depth ? std::to_string(*report.switch_depth) : "none")
      << '\n'
      << "estimate     " << format_real(report.total_estimate) << '\n'
      << "expanded     " << report.expanded_nodes << '\n';
  if (report.budget_exhausted) out << "budget exhausted before the tree was finished\n";
  return out.str();
}

}  // namespace qapbb
