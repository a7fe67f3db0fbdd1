#include "doctest.h"
#include "support.h"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "elq/hardgen.h"

using namespace elq;
using namespace elqtest;

namespace {

CNF cnf(uint32_t n, std::vector<std::vector<int32_t>> cl) {
  return CNF{n, std::move(cl)};
}

bool engine_verdict(const HardInstance& hi) {
  return bool_verdict(certain_answers(hi.kb, hi.query));
}

// Remaps variables and flips polarities; sat-equivalent to the input.
CNF scramble(const CNF& phi, std::mt19937_64& rng) {
  std::vector<uint32_t> perm(phi.n);
  for (uint32_t i = 0; i < phi.n; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<bool> flip(phi.n + 1);
  for (uint32_t v = 1; v <= phi.n; ++v) flip[v] = rng() & 1;
  CNF out;
  out.n = phi.n;
  for (const auto& c : phi.clauses) {
    std::vector<int32_t> nc;
    for (int32_t lit : c) {
      uint32_t v = (uint32_t)std::abs(lit);
      int32_t m = (int32_t)perm[v - 1];
      bool neg = (lit < 0) ^ flip[v];
      nc.push_back(neg ? -m : m);
    }
    std::shuffle(nc.begin(), nc.end(), rng);
    out.clauses.push_back(std::move(nc));
  }
  std::shuffle(out.clauses.begin(), out.clauses.end(), rng);
  return out;
}

}  // namespace

TEST_CASE("DIMACS parsing accepts the standard format") {
  CNF phi = parse_dimacs("c a comment\np cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n");
  CHECK(phi.n == 3);
  REQUIRE(phi.clauses.size() == 2);
  CHECK(phi.clauses[0] == std::vector<int32_t>{1, -2, 3});
  CHECK(phi.clauses[1] == std::vector<int32_t>{-1, 2, -3});
  CHECK(phi.three_cnf());

  // clauses may span lines; zero terminates each clause
  CNF multi = parse_dimacs("p cnf 2 1\n1\n2 -1 0\n");
  REQUIRE(multi.clauses.size() == 1);
  CHECK(multi.clauses[0].size() == 3);

  CHECK_THROWS_AS(parse_dimacs(""), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf x 1\n1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("1 -2 0\n"), ParseError);       // no header
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n3 0\n"), ParseError);  // range
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 2\n1 0\n"), ParseError);  // count
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2\n"), ParseError);  // no zero
}

TEST_CASE("the brute-force oracle handles edge cases") {
  CHECK(brute_sat(cnf(0, {})));             // empty formula
  CHECK(!brute_sat(cnf(1, {{}})));          // empty clause
  CHECK(brute_sat(cnf(2, {{1, 2}})));
  CHECK(!brute_sat(cnf(1, {{1}, {-1}})));
  CHECK(brute_sat(cnf(2, {{1, -2}, {-1, 2}})));
  // the complete set of clauses over two variables is unsatisfiable
  CHECK(!brute_sat(
      cnf(2, {{1, 2}, {1, -2}, {-1, 2}, {-1, -2}})));
  CNF big;
  big.n = 21;
  big.clauses = {{1, 2, 3}};
  CHECK_THROWS_AS(brute_sat(big), ResourceLimitError);
}

TEST_CASE("formula enumeration is exhaustive up to symmetry") {
  // over one variable the clause classes are {v,v,v} and {v,v,¬v}
  CHECK(exhaustive_3cnf(1, 1).size() == 2);
  // with two clauses: 6 unordered pairs survive the polarity flip
  CHECK(exhaustive_3cnf(1, 2).size() == 8);  // 2 singletons + 6 pairs

  auto all = exhaustive_3cnf(3, 3);
  CHECK(all.size() > 50);
  std::set<std::pair<uint32_t, std::vector<std::vector<int32_t>>>> seen;
  std::mt19937_64 rng(31337);
  for (const CNF& phi : all) {
    CHECK(phi.three_cnf());
    CHECK(phi.n >= 1);
    CHECK(phi.n <= 3);
    CHECK(phi.clauses.size() <= 3);
    CHECK(seen.insert({phi.n, phi.clauses}).second);  // no duplicates
    // symmetry operations used for deduplication preserve satisfiability
    CNF twin = scramble(phi, rng);
    CHECK(brute_sat(twin) == brute_sat(phi));
  }
  // both satisfiable and unsatisfiable formulas are represented
  bool any_sat = false, any_unsat = false;
  for (const CNF& phi : all) (brute_sat(phi) ? any_sat : any_unsat) = true;
  CHECK(any_sat);
  CHECK(any_unsat);
}

TEST_CASE("random formulas are deterministic per seed and well-formed") {
  CNF a = random_3cnf(4, 5, 99), b = random_3cnf(4, 5, 99);
  CHECK(a.clauses == b.clauses);
  CHECK(a.n == 4);
  CHECK(a.clauses.size() == 5);
  CHECK(a.three_cnf());
  for (const auto& c : a.clauses)
    for (int32_t lit : c) {
      CHECK(std::abs(lit) >= 1);
      CHECK(std::abs(lit) <= 4);
    }
  CNF c = random_3cnf(4, 5, 100);
  CHECK(a.clauses != c.clauses);
}

TEST_CASE("the filtering-hardness instance has exactly one candidate") {
  CNF sat = cnf(2, {{1, 2, 2}, {-1, -2, -2}});
  REQUIRE(brute_sat(sat));
  HardInstance hi = gen_filter_hard(sat);
  REQUIRE(validate_kb(hi.kb).empty());
  CHECK(hi.query.answer_vars.empty());
  REQUIRE(hi.expected_tau.size() == hi.query.n_vars());

  DatalogProgram d = build_datalog(hi.kb);
  FactStore st = materialize(d).first;
  REQUIRE(!st.unsat());
  CQ q = hi.query;
  Substitution tau;
  CandidateStream cs(q, st);
  REQUIRE(cs.next(tau));
  CHECK(tuple_names(st, tau) == hi.expected_tau);
  Substitution other;
  CHECK(!cs.next(other));  // unique candidate
  CHECK(is_sound(q, st, tau).sound() == true);

  CNF unsat = cnf(1, {{1, 1, 1}, {-1, -1, -1}});
  REQUIRE(!brute_sat(unsat));
  HardInstance lo = gen_filter_hard(unsat);
  DatalogProgram d2 = build_datalog(lo.kb);
  FactStore st2 = materialize(d2).first;
  CQ q2 = lo.query;
  Substitution tau2;
  CandidateStream cs2(q2, st2);
  REQUIRE(cs2.next(tau2));
  CHECK(tuple_names(st2, tau2) == lo.expected_tau);
  CHECK(!cs2.next(tau2));
  CHECK(!is_sound(q2, st2, tau2).sound());

  CHECK_THROWS_AS(gen_filter_hard(cnf(2, {{1, 2}})), ShapeError);
}

TEST_CASE("generator dialects and query shapes are as advertised") {
  CNF phi = cnf(2, {{1, -2, 2}, {-1, 2, 1}});
  auto count_kind = [](const KB& kb, AxiomKind k) {
    int n = 0;
    for (const Axiom& ax : kb.tbox) n += ax.kind == k;
    return n;
  };

  HardInstance ac = gen_acyclic_hard(phi);
  CHECK(validate_kb(ac.kb).empty());
  CHECK(count_kind(ac.kb, AxiomKind::Trans) == 0);
  CHECK(count_kind(ac.kb, AxiomKind::Refl) == 0);
  CHECK(count_kind(ac.kb, AxiomKind::SelfRhs) == 0);
  CHECK(count_kind(ac.kb, AxiomKind::SelfLhs) == 0);
  DatalogProgram dac = build_datalog(ac.kb);
  CHECK(!dac.has_trans);
  CHECK(!dac.has_refl);
  CHECK(!dac.has_self_axioms);
  CHECK(classify_query(ac.query).kind == QueryShape::Acyclic);

  HardInstance tr = gen_trans_hard(phi);
  CHECK(validate_kb(tr.kb).empty());
  CHECK(count_kind(tr.kb, AxiomKind::Trans) == 1);
  CHECK(count_kind(tr.kb, AxiomKind::Refl) == 0);
  CHECK(classify_query(tr.query).kind == QueryShape::Arborescent);

  HardInstance rf = gen_refl_hard(phi);
  CHECK(validate_kb(rf.kb).empty());
  CHECK(count_kind(rf.kb, AxiomKind::Trans) == 0);
  CHECK(count_kind(rf.kb, AxiomKind::Refl) == 1);
  CHECK(classify_query(rf.query).kind == QueryShape::Arborescent);
}

TEST_CASE("all four reductions agree with the SAT oracle on small formulas") {
  std::vector<CNF> suite = exhaustive_3cnf(2, 2);
  // a couple of slightly larger formulas on top
  suite.push_back(random_3cnf(3, 3, 7));
  suite.push_back(random_3cnf(3, 3, 8));
  suite.push_back(random_3cnf(4, 4, 9));
  int sat_n = 0, unsat_n = 0;
  for (const CNF& phi : suite) {
    bool want = brute_sat(phi);
    (want ? sat_n : unsat_n)++;
    CHECK(engine_verdict(gen_filter_hard(phi)) == want);
    CHECK(engine_verdict(gen_acyclic_hard(phi)) == want);
    CHECK(engine_verdict(gen_trans_hard(phi)) == want);
    CHECK(engine_verdict(gen_refl_hard(phi)) == want);
  }
  CHECK(sat_n > 0);
  CHECK(unsat_n > 0);
}
