#include "elq/cli.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "elq/answer.h"
#include "elq/arborescent.h"
#include "elq/bench.h"
#include "elq/chase.h"
#include "elq/hardgen.h"
#include "elq/rules.h"
#include "elq/store.h"
#include "elq/text.h"

namespace elq {

namespace {

using nlohmann::json;

constexpr const char* kUnsatBanner =
    "unsatisfiable: every tuple is a certain answer";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::string ms2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// --strict: a query may not invent symbols the KB does not mention.
void check_strict(const CQ& q, const Symbols& sym, uint32_t nc, uint32_t nr,
                  uint32_t ni) {
  for (const QAtom& at : q.atoms) {
    if (!at.binary && at.c >= nc)
      throw std::runtime_error("--strict: unknown concept in query: " +
                               sym.concept_name(at.c));
    if (at.binary && at.r >= nr)
      throw std::runtime_error("--strict: unknown role in query: " +
                               sym.role_name(at.r));
    for (const QTerm& t : {at.t0, at.t1})
      if (!t.is_var && t.id != kNone && t.id >= ni)
        throw std::runtime_error("--strict: unknown individual in query: " +
                                 sym.individual_name(t.id));
  }
}

std::string tuple_line(const std::vector<IndId>& tup, const Symbols& sym) {
  std::string s = "(";
  for (size_t i = 0; i < tup.size(); ++i) {
    if (i) s += ", ";
    s += sym.individual_name(tup[i]);
  }
  s += ")";
  return s;
}

struct Args {
  std::string kb_path, q_path, cnf, kind, out_prefix;
  std::string format = "text";
  uint64_t branch_cap = 10'000'000;
  uint32_t depth = 6;
  uint64_t max_facts = 1'000'000;
  uint32_t jobs = 1;
  bool strict = false;
  bool dump = false;
  uint64_t seed = 7;
  uint32_t scale = 1;
  uint32_t chain_depth = 4;
};

int cmd_check(const Args& a, std::ostream& out) {
  KB kb = parse_kb(read_file(a.kb_path));
  DatalogProgram d = build_datalog(kb);
  auto [st, stats] = materialize(d);
  (void)stats;
  if (a.format == "json") {
    json j;
    j["satisfiable"] = !st.unsat();
    out << j.dump(2) << "\n";
  } else {
    out << (st.unsat() ? "unsatisfiable" : "satisfiable") << "\n";
  }
  return 0;
}

int cmd_materialize(const Args& a, std::ostream& out) {
  KB kb = parse_kb(read_file(a.kb_path));
  DatalogProgram d = build_datalog(kb);
  uint64_t before = d.facts.size();
  auto [st, stats] = materialize(d);
  uint64_t after = st.fact_count();
  double ratio = before ? (double)after / (double)before : 0.0;
  if (a.format == "json") {
    json j;
    j["facts"] = json::array();
    std::istringstream lines(serialize_facts(st));
    std::string line;
    while (std::getline(lines, line)) j["facts"].push_back(line);
    j["before"] = before;
    j["after"] = after;
    j["ratio"] = ratio;
    j["merges"] = stats.merges;
    j["wall_ms"] = round2(stats.wall_ms);
    out << j.dump(2) << "\n";
  } else {
    out << serialize_facts(st);
    out << "# before " << before << "\n";
    out << "# after " << after << "\n";
    out << "# ratio " << ms2(ratio) << "\n";
    out << "# merges " << stats.merges << "\n";
    out << "# wall_ms " << ms2(stats.wall_ms) << "\n";
  }
  return 0;
}

int cmd_answer(const Args& a, std::ostream& out) {
  KB kb = parse_kb(read_file(a.kb_path));
  DatalogProgram d = build_datalog(kb);
  uint32_t nc = d.sym.n_concepts(), nr = d.sym.n_roles(),
           ni = d.sym.n_individuals();
  CQ q = parse_query(read_file(a.q_path), d.sym);
  if (a.strict) check_strict(q, d.sym, nc, nr, ni);
  auto [st, mstats] = materialize(d);
  (void)mstats;
  AnswerOptions opt;
  opt.branch_cap = a.branch_cap;
  opt.jobs = a.jobs;
  AnswerSet res = certain_answers(st, q, opt);

  if (a.format == "json") {
    json j;
    j["answers"] = json::array();
    for (const auto& tup : res.tuples) {
      json row = json::array();
      for (IndId i : tup) row.push_back(d.sym.individual_name(i));
      j["answers"].push_back(row);
    }
    j["candidates"] = res.stats.candidates;
    j["unsound"] = res.stats.unsound;
    j["filter_ms_avg"] = round2(res.stats.filter_ms_avg());
    j["choices_avg"] = res.stats.choices_avg();
    j["fast_path_hits"] = res.stats.fast_path_hits;
    j["unsat"] = res.unsatisfiable;
    out << j.dump(2) << "\n";
    return 0;
  }
  if (res.unsatisfiable) {
    out << kUnsatBanner << "\n";
  } else if (q.answer_vars.empty()) {
    out << (res.tuples.empty() ? "false" : "true") << "\n";
  } else {
    for (const auto& tup : res.tuples) out << tuple_line(tup, d.sym) << "\n";
  }
  out << "# candidates " << res.stats.candidates << "\n";
  out << "# unsound " << res.stats.unsound << "\n";
  out << "# fast_path_hits " << res.stats.fast_path_hits << "\n";
  out << "# choices_avg " << ms2(res.stats.choices_avg()) << "\n";
  out << "# filter_ms_avg " << ms2(res.stats.filter_ms_avg()) << "\n";
  return 0;
}

int cmd_classify(const Args& a, std::ostream& out) {
  Symbols sym;
  CQ q = parse_query(read_file(a.q_path), sym);
  QueryShape s = classify_query(q);
  const char* name = s.kind == QueryShape::Cyclic       ? "cyclic"
                     : s.kind == QueryShape::Acyclic    ? "acyclic"
                                                        : "arborescent";
  if (a.format == "json") {
    json j;
    j["shape"] = name;
    out << j.dump(2) << "\n";
  } else {
    out << name << "\n";
  }
  return 0;
}

int cmd_oracle(const Args& a, std::ostream& out) {
  KB kb = parse_kb(read_file(a.kb_path));
  RuleBase xi = build_xi(kb);
  ChaseOptions copt;
  copt.depth_limit = a.depth;
  copt.fact_limit = a.max_facts;
  if (a.dump) {
    ChaseInstance ci = chase(xi, kb.sym, copt);
    out << dump_instance(ci, kb.sym);
    out << "# saturated " << (ci.saturated ? "true" : "false") << "\n";
    out << "# truncated " << (ci.truncated ? "true" : "false") << "\n";
    out << "# depth_reached " << ci.depth_reached << "\n";
    return 0;
  }
  if (a.q_path.empty())
    throw std::runtime_error("oracle needs a query file (or --dump)");
  uint32_t nc = kb.sym.n_concepts(), nr = kb.sym.n_roles(),
           ni = kb.sym.n_individuals();
  CQ q = parse_query(read_file(a.q_path), kb.sym);
  if (a.strict) check_strict(q, kb.sym, nc, nr, ni);
  OracleResult res = oracle_answers(xi, kb.sym, q, copt);
  if (a.format == "json") {
    json j;
    j["answers"] = json::array();
    for (const auto& tup : res.tuples) {
      json row = json::array();
      for (IndId i : tup) row.push_back(kb.sym.individual_name(i));
      j["answers"].push_back(row);
    }
    j["complete"] = res.complete;
    j["unsat"] = res.unsat;
    out << j.dump(2) << "\n";
    return 0;
  }
  if (res.unsat) {
    out << kUnsatBanner << "\n";
  } else if (q.answer_vars.empty()) {
    out << (res.tuples.empty() ? "false" : "true") << "\n";
  } else {
    for (const auto& tup : res.tuples) out << tuple_line(tup, kb.sym) << "\n";
  }
  out << "# complete " << (res.complete ? "true" : "false") << "\n";
  return 0;
}

int cmd_gen_hard(const Args& a, std::ostream& out) {
  std::string text = a.cnf;
  {
    std::ifstream probe(a.cnf);
    if (probe) text = read_file(a.cnf);
  }
  CNF phi = parse_dimacs(text);
  HardInstance inst;
  if (a.kind == "filter")
    inst = gen_filter_hard(phi);
  else if (a.kind == "acyclic")
    inst = gen_acyclic_hard(phi);
  else if (a.kind == "trans")
    inst = gen_trans_hard(phi);
  else if (a.kind == "refl")
    inst = gen_refl_hard(phi);
  else
    throw std::runtime_error("gen-hard kind must be filter|acyclic|trans|refl");
  std::string prefix = a.out_prefix.empty() ? "hard" : a.out_prefix;
  write_file(prefix + ".kb", serialize_kb(inst.kb));
  write_file(prefix + ".q", print_query(inst.query, inst.kb.sym));
  out << prefix << ".kb\n" << prefix << ".q\n";
  out << "# brute_sat " << (brute_sat(phi) ? "true" : "false") << "\n";
  if (!inst.expected_tau.empty()) {
    out << "# expected_tau";
    for (const auto& name : inst.expected_tau) out << " " << name;
    out << "\n";
  }
  return 0;
}

int cmd_gen_bench(const Args& a, std::ostream& out) {
  BenchSpec spec;
  spec.scale = a.scale;
  spec.seed = a.seed;
  spec.depth = a.chain_depth;
  BenchOutput b = gen_bench(spec);
  std::string prefix = a.out_prefix.empty() ? "bench" : a.out_prefix;
  write_file(prefix + ".kb", serialize_kb(b.kb));
  out << prefix << ".kb\n";
  for (const CQ& q : b.queries) {
    std::string path = prefix + "_" + q.name + ".q";
    write_file(path, print_query(q, b.kb.sym));
    out << path << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"conjunctive-query answering over EL-family knowledge bases"};
  app.require_subcommand(1);
  Args a;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* check = app.add_subcommand("check", "decide KB satisfiability");
  check->add_option("kb", a.kb_path, "KB file")->required();
  add_format(check);

  CLI::App* mat =
      app.add_subcommand("materialize", "dump the materialized store");
  mat->add_option("kb", a.kb_path, "KB file")->required();
  add_format(mat);

  CLI::App* ans = app.add_subcommand("answer", "compute certain answers");
  ans->add_option("kb", a.kb_path, "KB file")->required();
  ans->add_option("query", a.q_path, "query file")->required();
  ans->add_option("--branch-cap", a.branch_cap, "soundness search budget");
  ans->add_option("--jobs", a.jobs, "parallel filter workers");
  ans->add_flag("--strict", a.strict, "reject queries with unknown symbols");
  add_format(ans);

  CLI::App* cls = app.add_subcommand("classify", "print the query shape");
  cls->add_option("query", a.q_path, "query file")->required();
  add_format(cls);

  CLI::App* orc =
      app.add_subcommand("oracle", "answer via the bounded chase oracle");
  orc->add_option("kb", a.kb_path, "KB file")->required();
  orc->add_option("query", a.q_path, "query file");
  orc->add_option("--depth", a.depth, "chase term-depth limit");
  orc->add_option("--max-facts", a.max_facts, "chase fact limit");
  orc->add_flag("--dump", a.dump, "print the chased instance instead");
  orc->add_flag("--strict", a.strict, "reject queries with unknown symbols");
  add_format(orc);

  CLI::App* gh = app.add_subcommand("gen-hard", "emit a hardness instance");
  gh->add_option("kind", a.kind, "filter|acyclic|trans|refl")->required();
  gh->add_option("--cnf", a.cnf, "DIMACS file or inline text")->required();
  gh->add_option("--out", a.out_prefix, "output file prefix");

  CLI::App* gb = app.add_subcommand("gen-bench", "emit the benchmark KB");
  gb->add_option("--scale", a.scale, "number of organizations");
  gb->add_option("--seed", a.seed, "generator seed");
  gb->add_option("--depth", a.chain_depth, "sub-organization chain length");
  gb->add_option("--out", a.out_prefix, "output file prefix");

  std::vector<const char*> argv;
  argv.push_back("elq");
  for (const std::string& s : args) argv.push_back(s.c_str());

  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (check->parsed()) return cmd_check(a, out);
    if (mat->parsed()) return cmd_materialize(a, out);
    if (ans->parsed()) return cmd_answer(a, out);
    if (cls->parsed()) return cmd_classify(a, out);
    if (orc->parsed()) return cmd_oracle(a, out);
    if (gh->parsed()) return cmd_gen_hard(a, out);
    if (gb->parsed()) return cmd_gen_bench(a, out);
    err << "no subcommand\n";
    return 1;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const ResourceLimitError& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

}  // namespace elq
