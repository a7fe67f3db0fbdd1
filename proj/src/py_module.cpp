// Python bindings: text-in/text-out wrappers over the core operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "elq/answer.h"
#include "elq/arborescent.h"
#include "elq/chase.h"
#include "elq/cli.h"
#include "elq/rules.h"
#include "elq/store.h"
#include "elq/text.h"

namespace py = pybind11;
using namespace elq;

namespace {

py::dict answer_text(const std::string& kb_text, const std::string& q_text,
                     uint64_t branch_cap, uint32_t jobs) {
  KB kb = parse_kb(kb_text);
  DatalogProgram d = build_datalog(kb);
  CQ q = parse_query(q_text, d.sym);
  auto [st, mstats] = materialize(d);
  (void)mstats;
  AnswerOptions opt;
  opt.branch_cap = branch_cap;
  opt.jobs = jobs;
  AnswerSet res = certain_answers(st, q, opt);
  py::list answers;
  for (const auto& tup : res.tuples) {
    py::list row;
    for (IndId i : tup) row.append(d.sym.individual_name(i));
    answers.append(row);
  }
  py::dict out;
  out["answers"] = answers;
  out["candidates"] = res.stats.candidates;
  out["unsound"] = res.stats.unsound;
  out["filter_ms_avg"] = res.stats.filter_ms_avg();
  out["choices_avg"] = res.stats.choices_avg();
  out["fast_path_hits"] = res.stats.fast_path_hits;
  out["unsat"] = res.unsatisfiable;
  return out;
}

std::string materialize_text(const std::string& kb_text) {
  KB kb = parse_kb(kb_text);
  DatalogProgram d = build_datalog(kb);
  auto [st, stats] = materialize(d);
  (void)stats;
  return serialize_facts(st);
}

bool check_text(const std::string& kb_text) {
  KB kb = parse_kb(kb_text);
  DatalogProgram d = build_datalog(kb);
  auto [st, stats] = materialize(d);
  (void)stats;
  return !st.unsat();
}

std::string classify_text(const std::string& q_text) {
  Symbols sym;
  CQ q = parse_query(q_text, sym);
  QueryShape s = classify_query(q);
  return s.kind == QueryShape::Cyclic    ? "cyclic"
         : s.kind == QueryShape::Acyclic ? "acyclic"
                                         : "arborescent";
}

py::dict oracle_text(const std::string& kb_text, const std::string& q_text,
                     uint32_t depth, uint64_t max_facts) {
  KB kb = parse_kb(kb_text);
  RuleBase xi = build_xi(kb);
  CQ q = parse_query(q_text, kb.sym);
  ChaseOptions opt;
  opt.depth_limit = depth;
  opt.fact_limit = max_facts;
  OracleResult res = oracle_answers(xi, kb.sym, q, opt);
  py::list answers;
  for (const auto& tup : res.tuples) {
    py::list row;
    for (IndId i : tup) row.append(kb.sym.individual_name(i));
    answers.append(row);
  }
  py::dict out;
  out["answers"] = answers;
  out["complete"] = res.complete;
  out["unsat"] = res.unsat;
  return out;
}

int cli_main(const std::vector<std::string>& args) {
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace

PYBIND11_MODULE(_elq, m) {
  m.doc() = "conjunctive-query answering over EL-family knowledge bases";
  py::register_exception<ParseError>(m, "KbParseError");
  py::register_exception<ShapeError>(m, "ShapeError");
  py::register_exception<DialectError>(m, "DialectError");
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError");
  m.def("answer", &answer_text, py::arg("kb"), py::arg("query"),
        py::arg("branch_cap") = 10'000'000, py::arg("jobs") = 1,
        "certain answers of a query over a KB, with filter statistics");
  m.def("materialize", &materialize_text, py::arg("kb"),
        "sorted fact dump of the materialized store");
  m.def("check", &check_text, py::arg("kb"), "True when the KB is satisfiable");
  m.def("classify", &classify_text, py::arg("query"),
        "query shape: cyclic | acyclic | arborescent");
  m.def("oracle", &oracle_text, py::arg("kb"), py::arg("query"),
        py::arg("depth") = 6, py::arg("max_facts") = 1'000'000,
        "bounded-chase certain answers (complete=True when saturated)");
  m.def("cli", &cli_main, py::arg("args"), "run the command-line front end");
}
