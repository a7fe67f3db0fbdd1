#include "doctest.h"
#include "support.h"

#include <set>
#include <string>

using namespace elq;
using namespace elqtest;

namespace {

bool contains_line(const std::string& dump, const std::string& line) {
  size_t pos = 0;
  while ((pos = dump.find(line, pos)) != std::string::npos) {
    bool at_start = pos == 0 || dump[pos - 1] == '\n';
    size_t end = pos + line.size();
    bool at_end = end == dump.size() || dump[end] == '\n';
    if (at_start && at_end) return true;
    pos = end;
  }
  return false;
}

}  // namespace

TEST_CASE("an existential cycle truncates the chase but keeps sound answers") {
  KB kb = ex1_kb();
  RuleBase xi = build_xi(kb);
  ChaseInstance ci = chase(xi, kb.sym, ChaseOptions{4, 1000000});
  CHECK(ci.truncated);
  CHECK(!ci.saturated);
  CHECK(ci.depth_reached == 4);
  CHECK(!ci.unsat());

  std::string dump = dump_instance(ci, kb.sym);
  CHECK(contains_line(dump, "A(a)"));
  CHECK(contains_line(dump, "T(a, f[T,E,A](a))"));
  CHECK(contains_line(dump, "E(f[T,E,A](a))"));
  // the nominal pulls the G-child back onto a
  CHECK(contains_line(dump, "eq f[T,G,F](f[T,F,B](b)) a"));
  // transitivity composes across the merged child
  uint32_t ta = ci.term_of(kb.sym.find_individual("a"));
  uint32_t tb = ci.term_of(kb.sym.find_individual("b"));
  RoleId T = kb.sym.find_role("T"), R = kb.sym.find_role("R");
  CHECK(ci.holds_role(T, tb, ci.normalize(ta)));
  CHECK(ci.holds_role(R, tb, ci.normalize(ta)));

  // the oracle still finds the expected answer under truncation
  Symbols sym = kb.sym;
  CQ q3 = parse_query(kEx3Text, sym);
  OracleResult orc = oracle_answers(xi, sym, q3, ChaseOptions{4, 1000000});
  CHECK(!orc.complete);
  REQUIRE(orc.tuples.size() >= 1);
  IndId a = sym.find_individual("a"), b = sym.find_individual("b");
  CHECK(std::find(orc.tuples.begin(), orc.tuples.end(),
                  std::vector<IndId>{a, b}) != orc.tuples.end());
}

TEST_CASE("answers grow monotonically with the depth limit") {
  KB kb = ex1_kb();
  RuleBase xi = build_xi(kb);
  Symbols sym = kb.sym;
  CQ q3 = parse_query(kEx3Text, sym);
  std::set<std::vector<IndId>> prev;
  for (uint32_t d = 1; d <= 4; ++d) {
    OracleResult orc = oracle_answers(xi, sym, q3, ChaseOptions{d, 1000000});
    std::set<std::vector<IndId>> cur(orc.tuples.begin(), orc.tuples.end());
    for (const auto& t : prev) CHECK(cur.count(t) == 1);
    prev = cur;
    if (d >= 2) {
      IndId a = sym.find_individual("a"), b = sym.find_individual("b");
      CHECK(cur.count({a, b}) == 1);
    }
  }
}

TEST_CASE("satisfied existentials are not re-fired, even at depth zero") {
  KB kb;
  ConceptId A = kb.sym.concept_of("A"), B = kb.sym.concept_of("B");
  RoleId r = kb.sym.role_of("r");
  IndId a = kb.sym.individual_of("a"), b = kb.sym.individual_of("b");
  kb.tbox = {Axiom::exist_rhs(A, r, B)};
  kb.concept_abox = {{A, a}, {B, b}};
  kb.role_abox = {{r, a, b}};
  RuleBase xi = build_xi(kb);
  ChaseInstance ci = chase(xi, kb.sym, ChaseOptions{0, 1000000});
  CHECK(ci.saturated);
  CHECK(!ci.truncated);
  CHECK(ci.terms.size() == 2);  // only the named individuals

  Symbols sym = kb.sym;
  OracleResult orc =
      oracle_answers(xi, sym, parse_query("q(?x) :- r(a, ?x).", sym),
                     ChaseOptions{0, 1000000});
  CHECK(orc.complete);
  CHECK(orc.tuples == std::vector<std::vector<IndId>>{{b}});

  // without the named witness, depth zero cannot satisfy the existential
  KB kb2 = kb;
  kb2.role_abox.clear();
  ChaseInstance ci2 = chase(build_xi(kb2), kb2.sym, ChaseOptions{0, 1000000});
  CHECK(!ci2.saturated);
  CHECK(ci2.truncated);
}

TEST_CASE("the chase agrees with materialization on non-existential KBs") {
  KB kb;
  ConceptId A = kb.sym.concept_of("A"), B = kb.sym.concept_of("B"),
            C = kb.sym.concept_of("C"), D = kb.sym.concept_of("D");
  RoleId t = kb.sym.role_of("t"), r = kb.sym.role_of("r"),
         s = kb.sym.role_of("s"), e = kb.sym.role_of("e");
  IndId a1 = kb.sym.individual_of("a1"), a2 = kb.sym.individual_of("a2"),
        a3 = kb.sym.individual_of("a3");
  kb.tbox = {Axiom::trans(t),          Axiom::sub_role(t, r),
             Axiom::range(r, B),       Axiom::conj(A, B, C),
             Axiom::self_rhs(C, s),    Axiom::self_lhs(s, D),
             Axiom::refl(e)};
  kb.concept_abox = {{A, a1}, {A, a2}};
  kb.role_abox = {{t, a1, a2}, {t, a2, a3}};

  Fixture f = make_fixture(kb);
  RuleBase xi = build_xi(kb);
  ChaseInstance ci = chase(xi, f.d.sym, ChaseOptions{3, 1000000});
  REQUIRE(ci.saturated);
  CHECK(ci.depth_reached == 0);

  std::vector<IndId> inds{a1, a2, a3};
  for (ConceptId c = 0; c < kb.sym.n_concepts(); ++c)
    for (IndId n : inds)
      CHECK(f.st.holds_concept(c, f.st.rep(n)) ==
            ci.holds_concept(c, ci.normalize(ci.term_of(n))));
  for (RoleId rr = 0; rr < kb.sym.n_roles(); ++rr)
    for (IndId n : inds)
      for (IndId m : inds)
        CHECK(f.st.holds_role(rr, f.st.rep(n), f.st.rep(m)) ==
              ci.holds_role(rr, ci.normalize(ci.term_of(n)),
                            ci.normalize(ci.term_of(m))));

  // spot checks of the shared content
  uint32_t t2 = ci.normalize(ci.term_of(a2));
  CHECK(ci.holds_concept(C, t2));       // A(a2) ∧ B(a2) from the range
  CHECK(ci.holds_role(s, t2, t2));      // C ⊑ ∃s.Self
  CHECK(ci.holds_concept(D, t2));       // ∃s.Self ⊑ D
  CHECK(ci.holds_role(r, ci.normalize(ci.term_of(a1)),
                      ci.normalize(ci.term_of(a3))));  // trans + t ⊑ r
  std::string dump = dump_instance(ci, f.d.sym);
  CHECK(contains_line(dump, "e(a1, a1)"));  // reflexivity
  CHECK(contains_line(dump, "selfe(a3)"));
}

TEST_CASE("nominal merges keep facts on representatives") {
  KB kb;
  ConceptId A = kb.sym.concept_of("A");
  RoleId r = kb.sym.role_of("r");
  IndId a = kb.sym.individual_of("a"), b = kb.sym.individual_of("b"),
        c = kb.sym.individual_of("c");
  kb.tbox = {Axiom::nominal(A, b)};
  kb.concept_abox = {{A, a}};
  kb.role_abox = {{r, c, b}};
  RuleBase xi = build_xi(kb);
  ChaseInstance ci = chase(xi, kb.sym, {});
  REQUIRE(ci.saturated);
  uint32_t ta = ci.term_of(a), tb = ci.term_of(b), tc = ci.term_of(c);
  CHECK(ci.normalize(tb) == ta);  // merges point toward the smaller name
  CHECK(ci.holds_concept(A, ta));
  CHECK(!ci.holds_concept(A, tb));       // extents mention representatives
  CHECK(ci.holds_role(r, tc, ta));       // rewritten by the merge
  CHECK(ci.leadsto ==
        std::vector<std::pair<uint32_t, uint32_t>>{{tb, ta}});
  std::string dump = dump_instance(ci, kb.sym);
  CHECK(contains_line(dump, "eq b a"));
  CHECK(contains_line(dump, "r(c, a)"));
}

TEST_CASE("inconsistency is reported by the instance and the oracle") {
  KB kb;
  ConceptId A = kb.sym.concept_of("A"), B = kb.sym.concept_of("B");
  kb.tbox = {Axiom::sub_class(A, Symbols::kBot)};
  kb.concept_abox = {{A, kb.sym.individual_of("a")}};
  RuleBase xi = build_xi(kb);
  ChaseInstance ci = chase(xi, kb.sym, {});
  CHECK(ci.unsat());
  Symbols sym = kb.sym;
  OracleResult orc =
      oracle_answers(xi, sym, parse_query("q(?x) :- B(?x).", sym), {});
  CHECK(orc.unsat);
}

TEST_CASE("the fact limit truncates without throwing") {
  KB kb = ex1_kb();
  RuleBase xi = build_xi(kb);
  ChaseInstance ci = chase(xi, kb.sym, ChaseOptions{6, 20});
  CHECK(ci.truncated);
  CHECK(!ci.saturated);
  CHECK(ci.fact_count <= 25);  // stops promptly after crossing the cap
}

TEST_CASE("generated KBs always saturate within the test depth") {
  std::mt19937_64 rng(5150);
  for (int i = 0; i < 60; ++i) {
    KB kb = random_kb(rng);
    ChaseInstance ci = chase(build_xi(kb), kb.sym, ChaseOptions{8, 1000000});
    CHECK(ci.saturated);
    CHECK(!ci.truncated);
  }
}
