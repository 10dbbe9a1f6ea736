#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "qapbb/cli.hpp"

using namespace qapbb;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qapbb");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qapbb-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("convert, evaluate and certify a small selector instance") {
  TempDir dir;
  std::mt19937_64 rng(77);
  const QapInstance inst =
      oracle::selector_qap(rng, oracle::random_symmetric(rng, 7, 1, 30, true), 3, 2);
  write(dir.file("small.dat"), serialize_qaplib(inst));
  const Value opt = oracle::qap_minimum(inst);

  const Run conv = run({"convert", dir.file("small.dat"), "-o", dir.file("small.bqop")});
  CHECK(conv.code == exit_ok);
  CHECK(conv.out.find("m 3 scale 2") != std::string::npos);

  const Run ok = run({"certify", dir.file("small.bqop"), "--target", std::to_string(opt)});
  CHECK(ok.code == exit_ok);
  CHECK(ok.out.find("certified") != std::string::npos);

  const Run no = run({"certify", dir.file("small.dat"), "--target", std::to_string(opt + 1),
                      "--witness", dir.file("w.sol"), "--format", "json", "--report",
                      dir.file("r.json")});
  CHECK(no.code == exit_refuted);
  const auto report = nlohmann::json::parse(slurp(dir.file("r.json")));
  CHECK(report["outcome"] == "refuted");
  CHECK(report["witness"]["value"] == opt);
  CHECK(fs::exists(dir.file("r.json.manifest.json")));

  const Run eval = run({"evaluate", dir.file("small.dat"), dir.file("w.sol")});
  CHECK(eval.code == exit_ok);
  CHECK(eval.out.find("bqop " + std::to_string(opt)) != std::string::npos);
  CHECK(eval.out.find("qap " + std::to_string(opt)) != std::string::npos);

  const Run budget = run({"certify", dir.file("small.dat"), "--target", std::to_string(opt),
                          "--max-nodes", "1"});
  CHECK(budget.code == exit_budget);
}

TEST_CASE("symmetry of a rigid instance") {
  TempDir dir;
  SymMatrix b(4);
  b.set(0, 1, 1);
  b.set(1, 2, 2);
  b.set(2, 3, 4);
  b.set(0, 3, 8);
  b.set(0, 2, 16);
  b.set(1, 3, 32);
  write(dir.file("rigid.bqop"), serialize_bqop(CardBqop(b, 2, 1, BqopSource::raw)));
  const Run r = run({"symmetry", dir.file("rigid.bqop")});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("|G| = 1\n") != std::string::npos);
}

TEST_CASE("non-selector instances convert to the general model") {
  TempDir dir;
  std::mt19937_64 rng(4);
  const QapInstance inst(oracle::random_symmetric(rng, 5, 1, 5, true),
                         oracle::random_symmetric(rng, 5, 1, 9, true));
  write(dir.file("g.dat"), serialize_qaplib(inst));
  const Run r = run({"convert", dir.file("g.dat"), "-o", dir.file("g.model")});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("no selector structure") != std::string::npos);
  CHECK(slurp(dir.file("g.model")).rfind("general-model 5", 0) == 0);
  CHECK(run({"certify", dir.file("g.dat"), "--target", "0"}).code == exit_invalid);
}

TEST_CASE("errors map to exit codes") {
  CHECK(run({"convert", "/nonexistent/x.dat", "-o", "/tmp/never"}).code == exit_io);
  CHECK(run({"certify"}).code == exit_usage);
  CHECK(run({"frobnicate"}).code == exit_usage);
  CHECK(run({"--help"}).code == exit_ok);
  CHECK_THROWS(parse_index_list("1,x", 4));
  CHECK_THROWS(parse_index_list("5", 4));
  CHECK(parse_index_list(" 2, 4 ,", 4) == std::vector<int>{1, 3});
}

TEST_CASE("qubo export and estimate run from the command line") {
  TempDir dir;
  std::mt19937_64 rng(8);
  write(dir.file("p.bqop"),
        serialize_bqop(CardBqop(oracle::random_symmetric(rng, 8, 0, 20, true), 3, 1,
                                BqopSource::raw)));
  const Run q = run({"qubo", dir.file("p.bqop"), "--fix", "1", "--lambda", "2"});
  CHECK(q.code == exit_ok);
  CHECK(q.out.rfind("qubo 7 2 ", 0) == 0);
  const Run e = run({"estimate", dir.file("p.bqop"), "--target", "100", "--seed", "3",
                     "--format", "csv"});
  CHECK(e.code == exit_ok);
  CHECK(e.out.rfind("depth,nodes,carried", 0) == 0);
}
