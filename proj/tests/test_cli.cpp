#include "doctest.h"
#include "support.h"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "elq/cli.h"

using namespace elq;
using namespace elqtest;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int exit;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("elq_cli_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name, const std::string& text) const {
    fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream ss(text);
  std::string l;
  while (std::getline(ss, l))
    if (l == line) return true;
  return false;
}

std::string ex1_file(const TempDir& td) {
  return td.file("ex1.kb", serialize_kb(ex1_kb()));
}

constexpr const char* kUnsatKb = "TBOX\nA SubClassOf Bot\nABOX\nA(a)\n";

}  // namespace

TEST_CASE("cli check reports satisfiability in both formats") {
  TempDir td;
  std::string kb = ex1_file(td);
  CliRun r = run({"check", kb});
  CHECK(r.exit == 0);
  CHECK(r.out == "satisfiable\n");

  CliRun j = run({"check", kb, "--format", "json"});
  CHECK(j.exit == 0);
  CHECK(json::parse(j.out)["satisfiable"] == true);

  std::string bad = td.file("bad.kb", kUnsatKb);
  CliRun u = run({"check", bad});
  CHECK(u.exit == 0);
  CHECK(u.out == "unsatisfiable\n");
}

TEST_CASE("cli materialize dumps the store with summary comments") {
  TempDir td;
  std::string kb = ex1_file(td);
  CliRun r = run({"materialize", kb});
  CHECK(r.exit == 0);
  CHECK(has_line(r.out, "A(a)"));
  CHECK(has_line(r.out, "eq aux:T:G a"));
  CHECK(has_line(r.out, "selfS(aux:S:C)"));
  CHECK(r.out.find("# before ") != std::string::npos);
  CHECK(r.out.find("# after ") != std::string::npos);
  CHECK(r.out.find("# ratio ") != std::string::npos);

  CliRun j = run({"materialize", kb, "--format", "json"});
  CHECK(j.exit == 0);
  json doc = json::parse(j.out);
  CHECK(doc["after"].get<uint64_t>() > doc["before"].get<uint64_t>());
  CHECK(doc["merges"].get<uint64_t>() >= 1);
  std::vector<std::string> facts = doc["facts"];
  CHECK(std::find(facts.begin(), facts.end(), "G(a)") != facts.end());
}

TEST_CASE("cli answer prints tuples, stats, and exact json keys") {
  TempDir td;
  std::string kb = ex1_file(td);
  std::string q3 = td.file("ex3.q", kEx3Text);
  CliRun r = run({"answer", kb, q3});
  CHECK(r.exit == 0);
  CHECK(r.out.rfind("(a, b)\n", 0) == 0);
  CHECK(has_line(r.out, "# candidates 1"));
  CHECK(has_line(r.out, "# unsound 0"));
  CHECK(has_line(r.out, "# fast_path_hits 0"));
  CHECK(has_line(r.out, "# choices_avg 4.00"));
  CHECK(r.out.find("# filter_ms_avg ") != std::string::npos);

  CliRun j = run({"answer", kb, q3, "--format", "json"});
  CHECK(j.exit == 0);
  json doc = json::parse(j.out);
  std::set<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.insert(it.key());
  CHECK(keys == std::set<std::string>{"answers", "candidates", "unsound",
                                      "filter_ms_avg", "choices_avg",
                                      "fast_path_hits", "unsat"});
  CHECK(doc["answers"] == json::parse(R"([["a","b"]])"));
  CHECK(doc["candidates"] == 1);
  CHECK(doc["unsound"] == 0);
  CHECK(doc["unsat"] == false);

  // Boolean queries answer true/false
  std::string bq = td.file("b.q", "b1() :- D(?y).");
  CliRun rb = run({"answer", kb, bq});
  CHECK(rb.exit == 0);
  CHECK(rb.out.rfind("true\n", 0) == 0);
  std::string nq = td.file("n.q", "b0() :- G(?x), B(?x).");
  CliRun rn = run({"answer", kb, nq});
  CHECK(rn.out.rfind("false\n", 0) == 0);

  // the walkthrough query
  std::string q4 = td.file("ex4.q", kEx4Text);
  CliRun r4 = run({"answer", kb, q4});
  CHECK(r4.exit == 0);
  CHECK(r4.out.rfind("(a)\n", 0) == 0);
}

TEST_CASE("cli answer flags the inconsistent case prominently") {
  TempDir td;
  std::string kb = td.file("u.kb", kUnsatKb);
  std::string q = td.file("q.q", "q(?x) :- A(?x).");
  CliRun r = run({"answer", kb, q});
  CHECK(r.exit == 0);
  CHECK(r.out.rfind("unsatisfiable: every tuple is a certain answer\n", 0) ==
        0);
  CliRun j = run({"answer", kb, q, "--format", "json"});
  CHECK(json::parse(j.out)["unsat"] == true);
}

TEST_CASE("cli classify names the query shape") {
  TempDir td;
  std::string t = td.file("t.q", kEx3Text);
  CliRun r = run({"classify", t});
  CHECK(r.exit == 0);
  CHECK(r.out == "arborescent\n");
  std::string c =
      td.file("c.q", "c() :- r(?x, ?y), r(?y, ?z), r(?z, ?x).");
  CHECK(run({"classify", c}).out == "cyclic\n");
  std::string a = td.file("a.q", "a() :- r(?x, b).");
  CHECK(run({"classify", a}).out == "acyclic\n");
  CliRun j = run({"classify", t, "--format", "json"});
  CHECK(json::parse(j.out)["shape"] == "arborescent");
}

TEST_CASE("cli oracle answers and dumps the chased instance") {
  TempDir td;
  std::string kb = ex1_file(td);
  std::string q3 = td.file("ex3.q", kEx3Text);
  CliRun r = run({"oracle", kb, q3, "--depth", "4"});
  CHECK(r.exit == 0);
  CHECK(r.out.rfind("(a, b)\n", 0) == 0);
  CHECK(has_line(r.out, "# complete false"));

  CliRun d = run({"oracle", kb, "--dump", "--depth", "3"});
  CHECK(d.exit == 0);
  CHECK(has_line(d.out, "T(a, f[T,E,A](a))"));
  CHECK(has_line(d.out, "eq f[T,G,F](f[T,F,B](b)) a"));
  CHECK(has_line(d.out, "# saturated false"));

  CliRun missing = run({"oracle", kb});
  CHECK(missing.exit == 1);
  CHECK(!missing.err.empty());
}

TEST_CASE("cli gen-hard writes a verifiable instance pair") {
  TempDir td;
  std::string cnf = td.file("phi.cnf", "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n");
  std::string prefix = td.path("inst");
  CliRun r = run({"gen-hard", "filter", "--cnf", cnf, "--out", prefix});
  CHECK(r.exit == 0);
  CHECK(has_line(r.out, prefix + ".kb"));
  CHECK(has_line(r.out, prefix + ".q"));
  CHECK(has_line(r.out, "# brute_sat false"));
  CHECK(r.out.find("# expected_tau ") != std::string::npos);

  KB kb = parse_kb(slurp(prefix + ".kb"));
  CHECK(validate_kb(kb).empty());
  CliRun ans = run({"answer", prefix + ".kb", prefix + ".q"});
  CHECK(ans.exit == 0);
  CHECK(ans.out.rfind("false\n", 0) == 0);

  // a satisfiable formula flips the verdict
  std::string cnf2 = td.file("sat.cnf", "p cnf 2 1\n1 -2 2 0\n");
  std::string p2 = td.path("inst2");
  CliRun r2 = run({"gen-hard", "trans", "--cnf", cnf2, "--out", p2});
  CHECK(r2.exit == 0);
  CHECK(has_line(r2.out, "# brute_sat true"));
  CliRun ans2 = run({"answer", p2 + ".kb", p2 + ".q"});
  CHECK(ans2.out.rfind("true\n", 0) == 0);

  CHECK(run({"gen-hard", "bogus", "--cnf", cnf}).exit == 1);
  CHECK(run({"gen-hard", "filter", "--cnf",
             td.file("bad.cnf", "p cnf 1 1\n1 1 0\n")})
            .exit == 1);  // not 3CNF: ShapeError maps to exit 1
}

TEST_CASE("cli gen-bench is deterministic and self-describing") {
  TempDir td;
  std::string p1 = td.path("b1");
  CliRun r = run({"gen-bench", "--scale", "2", "--out", p1});
  CHECK(r.exit == 0);
  CHECK(has_line(r.out, p1 + ".kb"));
  for (const char* name : {"members", "universe", "chain", "heads", "self"})
    CHECK(has_line(r.out, p1 + "_" + std::string(name) + ".q"));

  std::string p2 = td.path("b2");
  CHECK(run({"gen-bench", "--scale", "2", "--out", p2}).exit == 0);
  CHECK(slurp(p1 + ".kb") == slurp(p2 + ".kb"));
  CHECK(slurp(p1 + "_chain.q") == slurp(p2 + "_chain.q"));

  KB kb = parse_kb(slurp(p1 + ".kb"));
  CHECK(validate_kb(kb).empty());
  // a scaled KB strictly grows the ABox
  std::string p4 = td.path("b4");
  CHECK(run({"gen-bench", "--scale", "4", "--out", p4}).exit == 0);
  KB kb4 = parse_kb(slurp(p4 + ".kb"));
  CHECK(kb4.concept_abox.size() > kb.concept_abox.size());
  CHECK(kb4.role_abox.size() > kb.role_abox.size());
}

TEST_CASE("cli exit codes distinguish failure classes") {
  TempDir td;
  CHECK(run({}).exit == 1);                      // missing subcommand
  CHECK(run({"frobnicate"}).exit == 1);          // unknown subcommand
  CHECK(run({"check", td.path("nope.kb")}).exit == 1);  // unreadable file

  std::string bad = td.file("bad.kb", "TBOX\nA SubClassOf\n");
  CHECK(run({"check", bad}).exit == 2);  // KB parse error

  std::string kb = ex1_file(td);
  std::string badq = td.file("bad.q", "q(?x) :- A(?x)");
  CHECK(run({"answer", kb, badq}).exit == 2);  // query parse error

  std::string q4 = td.file("ex4.q", kEx4Text);
  CliRun capped = run({"answer", kb, q4, "--branch-cap", "1"});
  CHECK(capped.exit == 3);  // resource limit
  CHECK(!capped.err.empty());

  std::string zq = td.file("z.q", "z(?x) :- Zebra(?x).");
  CHECK(run({"answer", kb, zq, "--strict"}).exit == 1);
  CHECK(run({"answer", kb, zq}).exit == 0);  // lenient by default

  CliRun help = run({"--help"});
  CHECK(help.exit == 0);
  CHECK(help.out.find("answer") != std::string::npos);
  CHECK(help.out.find("gen-bench") != std::string::npos);
}
