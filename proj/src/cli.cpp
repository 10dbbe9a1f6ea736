#include "qapbb/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qapbb/bb.hpp"
#include "qapbb/error.hpp"
#include "qapbb/estimator.hpp"
#include "qapbb/report.hpp"
#include "qapbb/symmetry.hpp"

namespace qapbb {

using Json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(Errc::io_error, "cannot write " + path.string());
}

std::string join_one_based(std::span<const int> idx, const char* sep = " ") {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(idx[k] + 1);
  }
  return s;
}

ScoreRule parse_rule(const std::string& name) {
  if (name == "reduced") return ScoreRule::reduced_uniform;
  if (name == "literal") return ScoreRule::literal;
  if (name == "exact-average") return ScoreRule::exact_average;
  throw Error(Errc::invalid_argument, "unknown score rule '" + name + "'");
}

/// Options shared by the subcommands that work on a node of a problem.
struct Common {
  std::string input;
  std::string fix;
  std::string zeros;
  int workers = 1;
  std::size_t max_elements = 1'000'000;
  bool no_symmetry = false;
  std::string format = "text";
  std::string report;
  std::string manifest;
  std::string rule = "reduced";

  NodeKey key(int n) const {
    return NodeKey(n, parse_index_list(zeros, n), parse_index_list(fix, n));
  }
  PermutationGroup group(const CardBqop& bqop) const {
    if (no_symmetry) return PermutationGroup(bqop.size());
    DiscoveryOptions opt;
    opt.max_elements = max_elements;
    opt.workers = workers;
    return discover_automorphisms(bqop.matrix, opt);
  }
};

void add_input(CLI::App* cmd, Common& c) {
  cmd->add_option("input", c.input, "QAPLIB instance or cardbqop file")->required();
}
void add_node(CLI::App* cmd, Common& c) {
  cmd->add_option("--fix", c.fix, "Comma-separated 1-based indices fixed to 1");
  cmd->add_option("--zeros", c.zeros, "Comma-separated 1-based indices fixed to 0");
}
void add_group(CLI::App* cmd, Common& c) {
  cmd->add_option("--max-elements", c.max_elements, "Cap on the automorphism group size");
  cmd->add_flag("--no-symmetry", c.no_symmetry, "Use the trivial group");
  cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}
void add_output(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--report", c.report, "Write the report here instead of stdout");
  cmd->add_option("--manifest", c.manifest,
                  "Run manifest path (default: <report>.manifest.json when --report is given)");
}

/// Writes `body` to the report file or stdout, plus the run manifest.
void emit(const Common& c, const std::string& body, const std::vector<std::string>& args,
          const Json& config, double seconds, std::ostream& out) {
  if (c.report.empty()) {
    out << body;
  } else {
    write_file(c.report, body);
  }
  std::string manifest = c.manifest;
  if (manifest.empty() && !c.report.empty()) manifest = c.report + ".manifest.json";
  if (manifest.empty()) return;
  Json m;
  m["command"] = args.size() > 1 ? args[1] : "";
  m["arguments"] = args;
  m["inputs"] = Json::array({c.input});
  m["version"] = kVersion;
  m["config"] = config;
  m["wall_time_seconds"] = seconds;
  m["report"] = c.report.empty() ? Json(nullptr) : Json(c.report);
  write_file(manifest, m.dump(2) + "\n");
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Subcommands -----------------------------------------------------------------

int cmd_convert(const std::string& input, const std::string& output, std::ostream& out) {
  const QapInstance inst = parse_qaplib(read_file(input));
  const CloneClasses classes = find_clones(inst.flows);
  out << "n " << inst.size() << '\n' << "classes " << classes.classes.size() << '\n';
  for (std::size_t u = 0; u < classes.classes.size(); ++u) {
    const auto& members = classes.classes[u];
    out << "class " << u + 1 << " size " << members.size() << " first " << members.front() + 1
        << " last " << members.back() + 1 << '\n';
  }
  if (const auto sel = selector_class(classes)) {
    const SelectorReduction red = reduce_selector(inst);
    out << "selector class " << *sel + 1 << " m " << red.bqop.cardinality << " scale "
        << red.bqop.scale << '\n';
    write_file(output, serialize_bqop(red.bqop));
    out << "wrote cardbqop " << output << '\n';
  } else {
    out << "no selector structure; writing the general reduced model\n";
    write_file(output, serialize_general_model(emit_general_model(inst)));
    out << "wrote general-model " << output << '\n';
  }
  return exit_ok;
}

int cmd_generate(const std::string& name, const std::string& output, std::ostream& out) {
  if (name != "tai256c") throw Error(Errc::invalid_argument, "unknown instance '" + name + "'");
  const QapInstance inst{generate_tai256c_A(), grey_pattern_distances(16, 16)};
  write_file(output, serialize_qaplib(inst));
  out << "wrote " << output << '\n';
  return exit_ok;
}

struct OrbitRow {
  std::vector<int> members;
  double score = 0;
};

int cmd_symmetry(const Common& c, const std::string& solution,
                 const std::vector<std::string>& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Problem p = load_problem(c.input);
  const int n = p.bqop.size();
  const NodeKey key = c.key(n);
  const PermutationGroup group = c.group(p.bqop);
  const PermutationGroup stab = setwise_stabilizer(group, key.zeros(), key.ones());

  std::vector<OrbitRow> rows;
  if (is_feasible(p.bqop, key) && key.free_count() > 0) {
    const OrbitSet os = free_orbits(stab, key);
    const ScoreContext ctx(p.bqop, key, parse_rule(c.rule));
    for (std::size_t k = 0; k < os.count(); ++k) {
      const int rep = os.representative(k);
      const bool feasible = residual_cardinality(p.bqop, key) >= 1;
      rows.push_back({os.orbits[k], feasible ? ctx.with_one(rep).value() : 0.0});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const OrbitRow& a, const OrbitRow& b) { return a.score > b.score; });
  }
  std::map<std::size_t, std::size_t, std::greater<>> profile;
  for (const auto& r : rows) ++profile[r.members.size()];

  std::optional<std::size_t> images;
  if (!solution.empty()) {
    const Solution sol = load_solution(solution, n);
    BinaryVector x;
    if (const auto* perm = std::get_if<Permutation>(&sol)) {
      if (!p.reduction) throw Error(Errc::invalid_argument, "a permutation needs a QAPLIB input");
      x = permutation_to_binary(*perm, p.reduction->classes, p.reduction->selected);
    } else {
      x = std::get<BinaryVector>(sol);
    }
    images = expand_solution(group, x, &p.bqop.matrix).size();
  }

  std::string body;
  if (c.format == "json") {
    Json j;
    j["kind"] = "symmetry";
    j["order"] = group.order();
    j["ones"] = Json::array();
    for (int i : key.ones()) j["ones"].push_back(i + 1);
    j["zeros"] = Json::array();
    for (int i : key.zeros()) j["zeros"].push_back(i + 1);
    j["stabilizer_order"] = stab.order();
    Json orbits = Json::array();
    for (const auto& r : rows) {
      Json members = Json::array();
      for (int i : r.members) members.push_back(i + 1);
      orbits.push_back({{"representative", r.members.front() + 1},
                        {"size", r.members.size()},
                        {"score", r.score},
                        {"members", members}});
    }
    j["orbits"] = orbits;
    Json prof = Json::object();
    for (const auto& [size, count] : profile) prof[std::to_string(size)] = count;
    j["size_profile"] = prof;
    j["solution_images"] = images ? Json(*images) : Json(nullptr);
    body = j.dump(2) + "\n";
  } else if (c.format == "csv") {
    std::ostringstream s;
    s << "rank,representative,size,score,members\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      s << k + 1 << ',' << rows[k].members.front() + 1 << ',' << rows[k].members.size() << ','
        << format_real(rows[k].score) << ',' << join_one_based(rows[k].members) << '\n';
    }
    body = s.str();
  } else {
    std::ostringstream s;
    s << "|G| = " << group.order() << '\n';
    if (key.one_count() + key.zero_count() > 0) {
      s << "stabilizer order " << stab.order() << '\n';
    }
    s << "orbits " << rows.size() << " profile";
    for (const auto& [size, count] : profile) s << ' ' << size << ':' << count;
    s << '\n';
    char line[64];
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::snprintf(line, sizeof line, "%4zu %5d %4zu %16.2f  ", k + 1, rows[k].members.front() + 1,
                    rows[k].members.size(), rows[k].score);
      s << line << join_one_based(rows[k].members) << '\n';
    }
    if (images) {
      s << "solution images " << *images << '\n';
    }
    body = s.str();
  }
  Json config{{"fix", c.fix}, {"zeros", c.zeros}, {"no_symmetry", c.no_symmetry},
              {"max_elements", c.max_elements}, {"rule", c.rule}, {"solution", solution}};
  emit(c, body, args, config, elapsed(start), out);
  return exit_ok;
}

struct SearchOptions {
  double target = 0;
  std::string bounder = "spectral";
  std::uint64_t max_nodes = 10'000'000;
  int max_depth = 1'000'000;
};

void add_search(CLI::App* cmd, SearchOptions& s) {
  cmd->add_option("--target", s.target, "Target lower bound")->required();
  cmd->add_option("--bounder", s.bounder, "Bounder spec, e.g. spectral or exact:budget=1e6");
  cmd->add_option("--max-nodes", s.max_nodes, "Node budget");
  cmd->add_option("--max-depth", s.max_depth, "Depth budget");
}

std::string render(const Common& c, const BbReport& r) {
  if (c.format == "json") return to_json(r).dump(2) + "\n";
  if (c.format == "csv") return to_csv(r);
  return to_text(r);
}

std::string render(const Common& c, const EstimatorReport& r) {
  if (c.format == "json") return to_json(r).dump(2) + "\n";
  if (c.format == "csv") return to_csv(r);
  return to_text(r);
}

int cmd_certify(const Common& c, const SearchOptions& s, std::size_t memory_nodes,
                const std::string& witness, const std::vector<std::string>& args,
                std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Problem p = load_problem(c.input);
  BbConfig cfg;
  cfg.target = s.target;
  cfg.bounder = BounderSpec::parse(s.bounder);
  cfg.max_nodes = s.max_nodes;
  cfg.max_depth = s.max_depth;
  cfg.workers = c.workers;
  cfg.rule = parse_rule(c.rule);
  cfg.memory_nodes = memory_nodes;
  cfg.start = c.key(p.bqop.size());
  const BbReport report = certify(p.bqop, cfg, c.group(p.bqop));
  if (report.witness) {
    write_file(witness, format_binary(*report.witness) + "\n");
    err << "refuted: witness with value " << report.witness_value << " written to " << witness
        << '\n';
  }
  Json config{{"target", s.target},       {"bounder", cfg.bounder.to_string()},
              {"max_nodes", s.max_nodes}, {"max_depth", s.max_depth},
              {"fix", c.fix},             {"zeros", c.zeros},
              {"rule", c.rule},           {"no_symmetry", c.no_symmetry},
              {"workers", c.workers}};
  emit(c, render(c, report), args, config, elapsed(start), out);
  switch (report.outcome) {
    case Outcome::certified: return exit_ok;
    case Outcome::refuted: return exit_refuted;
    case Outcome::budget_exhausted: return exit_budget;
  }
  return exit_invalid;
}

int cmd_estimate(const Common& c, const SearchOptions& s, EstimatorConfig cfg,
                 const std::vector<std::string>& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Problem p = load_problem(c.input);
  cfg.target = s.target;
  cfg.bounder = BounderSpec::parse(s.bounder);
  cfg.max_nodes = s.max_nodes;
  cfg.max_depth = s.max_depth;
  cfg.workers = c.workers;
  cfg.rule = parse_rule(c.rule);
  cfg.start = c.key(p.bqop.size());
  const EstimatorReport report = estimate(p.bqop, c.group(p.bqop), cfg);
  Json config{{"target", s.target},
              {"bounder", cfg.bounder.to_string()},
              {"seed", cfg.seed},
              {"threshold", cfg.full_width_threshold},
              {"sample_size", cfg.sample_size},
              {"sample_cutoff", cfg.sample_cutoff},
              {"max_nodes", s.max_nodes},
              {"fix", c.fix},
              {"zeros", c.zeros},
              {"rule", c.rule},
              {"workers", c.workers}};
  emit(c, render(c, report), args, config, elapsed(start), out);
  return report.budget_exhausted ? exit_budget : exit_ok;
}

int cmd_evaluate(const std::string& input, const std::string& solution, std::ostream& out) {
  const Problem p = load_problem(input);
  const Solution sol = load_solution(solution, p.bqop.size());
  if (const auto* perm = std::get_if<Permutation>(&sol)) {
    if (!p.qap) throw Error(Errc::invalid_argument, "a permutation needs a QAPLIB input");
    const Value qap = qap_objective(*p.qap, *perm);
    const BinaryVector x = permutation_to_binary(*perm, p.reduction->classes, p.reduction->selected);
    out << "qap " << qap << '\n' << "bqop " << bqop_objective(p.bqop, x) << '\n';
  } else {
    const auto& x = std::get<BinaryVector>(sol);
    out << "bqop " << bqop_objective(p.bqop, x) << '\n';
    if (p.qap) {
      const Permutation perm =
          binary_to_permutation(x, p.reduction->classes, p.reduction->selected);
      out << "qap " << qap_objective(*p.qap, perm) << '\n';
    }
  }
  return exit_ok;
}

int cmd_qubo(const Common& c, std::optional<double> lambda, std::ostream& out) {
  const Problem p = load_problem(c.input);
  const ReducedBqop r = reduce(p.bqop, c.key(p.bqop.size()));
  const QuboInstance q = to_qubo(r, lambda.value_or(default_lambda(r)));
  if (c.report.empty()) {
    out << serialize_qubo(q);
  } else {
    write_file(c.report, serialize_qubo(q));
  }
  return exit_ok;
}

}  // namespace

Problem load_problem(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string first;
  in >> first;
  Problem p;
  if (first == "cardbqop") {
    std::istringstream again(text);
    p.bqop = parse_bqop(again);
    return p;
  }
  p.qap = parse_qaplib(text);
  p.reduction = reduce_selector(*p.qap);
  p.bqop = p.reduction->bqop;
  return p;
}

std::vector<int> parse_index_list(const std::string& text, int n) {
  std::vector<int> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(Errc::malformed_token, "bad index '" + item + "'");
    if (v < 1 || v > n) throw Error(Errc::invalid_argument, "index " + item + " out of range");
    out.push_back(v - 1);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clone-reduced QAP symmetry analysis and target lower-bound branch and bound"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string input, output, solution, witness = "witness.sol";
  Common common;
  SearchOptions search;
  EstimatorConfig est;
  std::size_t memory_nodes = 1'000'000;
  std::optional<double> lambda;

  auto* convert = app.add_subcommand("convert", "Reduce a QAPLIB instance");
  convert->add_option("input", input, "QAPLIB instance")->required();
  convert->add_option("-o,--output", output, "Output file")->required();

  auto* generate = app.add_subcommand("generate", "Write a built-in instance in QAPLIB format");
  generate->add_option("name", input, "Instance name (tai256c)")->required();
  generate->add_option("-o,--output", output, "Output file")->required();

  auto* symmetry = app.add_subcommand("symmetry", "Automorphism group and orbit table");
  add_input(symmetry, common);
  add_node(symmetry, common);
  add_group(symmetry, common);
  add_output(symmetry, common);
  symmetry->add_option("--solution", solution, "Count the distinct images of this solution");
  symmetry->add_option("--score", common.rule, "Orbit score rule")
      ->check(CLI::IsMember({"reduced", "literal", "exact-average"}));

  auto* certify_cmd = app.add_subcommand("certify", "Prove that no solution is below a target");
  add_input(certify_cmd, common);
  add_node(certify_cmd, common);
  add_group(certify_cmd, common);
  add_output(certify_cmd, common);
  add_search(certify_cmd, search);
  certify_cmd->add_option("--witness", witness, "Where a refuting solution is written");
  certify_cmd->add_option("--memory-nodes", memory_nodes, "Level nodes kept in memory");
  certify_cmd->add_option("--score", common.rule, "Orbit score rule")
      ->check(CLI::IsMember({"reduced", "literal", "exact-average"}));

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the search tree size");
  add_input(estimate_cmd, common);
  add_node(estimate_cmd, common);
  add_group(estimate_cmd, common);
  add_output(estimate_cmd, common);
  add_search(estimate_cmd, search);
  estimate_cmd->add_option("--seed", est.seed, "Sampling seed");
  estimate_cmd->add_option("--threshold", est.full_width_threshold, "Widest fully expanded level");
  estimate_cmd->add_option("--sample-size", est.sample_size, "Nodes sampled per wide level");
  estimate_cmd->add_option("--sample-cutoff", est.sample_cutoff, "Width from which to sample");
  estimate_cmd->add_option("--score", common.rule, "Orbit score rule")
      ->check(CLI::IsMember({"reduced", "literal", "exact-average"}));

  auto* evaluate = app.add_subcommand("evaluate", "Objective value of a solution file");
  evaluate->add_option("input", input, "QAPLIB instance or cardbqop file")->required();
  evaluate->add_option("solution", solution, "Permutation or 0/1 vector")->required();

  auto* qubo = app.add_subcommand("qubo", "Export the penalty QUBO of a node");
  add_input(qubo, common);
  add_node(qubo, common);
  qubo->add_option("--lambda", lambda, "Penalty weight (default 1e8 / Frobenius norm)");
  qubo->add_option("-o,--output", common.report, "Output file");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*convert) return cmd_convert(input, output, out);
    if (*generate) return cmd_generate(input, output, out);
    if (*symmetry) return cmd_symmetry(common, solution, args, out);
    if (*certify_cmd) return cmd_certify(common, search, memory_nodes, witness, args, out, err);
    if (*estimate_cmd) return cmd_estimate(common, search, est, args, out);
    if (*evaluate) return cmd_evaluate(input, solution, out);
    if (*qubo) return cmd_qubo(common, lambda, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::io_error ? exit_io : exit_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return exit_usage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace qapbb
