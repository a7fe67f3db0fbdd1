#include "doctest.h"
#include "support.h"

using namespace elq;
using namespace elqtest;

namespace {

const RTerm X = RTerm::var(0);
const RTerm Y = RTerm::var(1);
const RTerm Z = RTerm::var(2);

bool has_rule(const std::vector<Rule>& rules, const Rule& r) {
  return std::find(rules.begin(), rules.end(), r) != rules.end();
}

// A one-axiom KB over A, B, r, s, a so each translation can be inspected.
KB tiny(Axiom ax) {
  KB kb;
  kb.sym.concept_of("A");
  kb.sym.concept_of("B");
  kb.sym.role_of("r");
  kb.sym.role_of("s");
  kb.sym.individual_of("a");
  kb.tbox = {ax};
  kb.concept_abox = {{kb.sym.find_concept("A"), kb.sym.find_individual("a")}};
  return kb;
}

}  // namespace

TEST_CASE("each axiom form compiles to its rule") {
  KB probe = tiny(Axiom::trans(0));
  ConceptId A = probe.sym.find_concept("A"), B = probe.sym.find_concept("B");
  RoleId r = probe.sym.find_role("r"), s = probe.sym.find_role("s");
  IndId a = probe.sym.find_individual("a");

  auto xi_of = [&](Axiom ax) { return build_xi(tiny(ax)); };

  CHECK(has_rule(xi_of(Axiom::sub_class(A, B)).rules,
                 {{RAtom::cls(A, X)}, {RAtom::cls(B, X)}}));
  CHECK(has_rule(xi_of(Axiom::nominal(A, a)).rules,
                 {{RAtom::cls(A, X)}, {RAtom::eq(X, RTerm::constant(a))}}));
  CHECK(has_rule(xi_of(Axiom::conj(A, B, B)).rules,
                 {{RAtom::cls(A, X), RAtom::cls(B, X)},
                  {RAtom::cls(B, X)}}));
  CHECK(has_rule(xi_of(Axiom::exist_lhs(r, A, B)).rules,
                 {{RAtom::role(r, X, Y), RAtom::cls(A, Y)},
                  {RAtom::cls(B, X)}}));
  CHECK(has_rule(xi_of(Axiom::sub_role(s, r)).rules,
                 {{RAtom::role(s, X, Y)}, {RAtom::role(r, X, Y)}}));
  CHECK(has_rule(xi_of(Axiom::sub_role(s, r)).rules,
                 {{RAtom::self(s, X)}, {RAtom::self(r, X)}}));
  CHECK(has_rule(xi_of(Axiom::range(r, B)).rules,
                 {{RAtom::role(r, X, Y)}, {RAtom::cls(B, Y)}}));
  CHECK(has_rule(xi_of(Axiom::trans(r)).rules,
                 {{RAtom::role(r, X, Y), RAtom::role(r, Y, Z)},
                  {RAtom::role(r, X, Z)}}));
  CHECK(has_rule(xi_of(Axiom::refl(r)).rules,
                 {{RAtom::cls(Symbols::kTop, X)},
                  {RAtom::role(r, X, X), RAtom::self(r, X)}}));
  CHECK(has_rule(xi_of(Axiom::self_rhs(A, s)).rules,
                 {{RAtom::cls(A, X)},
                  {RAtom::role(s, X, X), RAtom::self(s, X)}}));
  CHECK(has_rule(xi_of(Axiom::self_lhs(s, B)).rules,
                 {{RAtom::self(s, X)}, {RAtom::cls(B, X)}}));

  // type 7 keeps its existential head in the rule base
  Rule want{{RAtom::cls(A, X)},
            {RAtom::role(r, X, Z), RAtom::cls(B, Z)},
            true,
            2};
  CHECK(has_rule(xi_of(Axiom::exist_rhs(A, r, B)).rules, want));
}

TEST_CASE("close(K) adds Top, Self, and ind scaffolding") {
  KB kb = tiny(Axiom::sub_class(2, 3));
  ConceptId A = kb.sym.find_concept("A");
  RoleId r = kb.sym.find_role("r");
  kb.role_abox = {{r, 0, 0}};
  RuleBase xi = build_xi(kb);
  CHECK(has_rule(xi.rules, {{RAtom::cls(A, X)},
                            {RAtom::cls(Symbols::kTop, X)}}));
  CHECK(has_rule(xi.rules,
                 {{RAtom::ind(X), RAtom::role(r, X, X)}, {RAtom::self(r, X)}}));
  CHECK(has_rule(xi.rules, {{RAtom::role(r, X, Y)},
                            {RAtom::cls(Symbols::kTop, X),
                             RAtom::cls(Symbols::kTop, Y)}}));
  CHECK(std::find(xi.facts.begin(), xi.facts.end(),
                  RAtom::ind(RTerm::constant(0))) != xi.facts.end());
  CHECK(std::find(xi.facts.begin(), xi.facts.end(),
                  RAtom::cls(A, RTerm::constant(0))) != xi.facts.end());
  CHECK(std::find(xi.facts.begin(), xi.facts.end(),
                  RAtom::role(r, RTerm::constant(0), RTerm::constant(0))) !=
        xi.facts.end());
}

TEST_CASE("the datalog program replaces existential heads with aux rules") {
  KB kb = tiny(Axiom::exist_rhs(2, 0, 3));  // A SubClassOf some r B
  ConceptId A = kb.sym.find_concept("A"), B = kb.sym.find_concept("B");
  RoleId r = kb.sym.find_role("r");
  DatalogProgram d = build_datalog(kb);

  REQUIRE(d.aux_individuals.size() == 1);
  const AuxIndividual& ax = d.aux_individuals[0];
  CHECK(ax.role == r);
  CHECK(ax.filler == B);
  CHECK(ax.ind >= d.first_aux);
  CHECK(d.sym.individual_name(ax.ind) == "aux:r:B");
  CHECK(d.first_aux == kb.sym.n_individuals());

  RTerm o = RTerm::constant(ax.ind);
  CHECK(has_rule(d.rules, {{RAtom::cls(A, X)},
                           {RAtom::role(r, X, o), RAtom::dir(r, X, o),
                            RAtom::cls(B, o)}}));
  for (const Rule& rl : d.rules) CHECK(!rl.exist);
}

TEST_CASE("aux individuals are shared per role-filler pair") {
  KB kb;
  ConceptId A = kb.sym.concept_of("A"), B = kb.sym.concept_of("B"),
            C = kb.sym.concept_of("C");
  RoleId r = kb.sym.role_of("r");
  kb.sym.individual_of("a");
  kb.tbox = {Axiom::exist_rhs(A, r, C), Axiom::exist_rhs(B, r, C),
             Axiom::exist_rhs(A, r, B)};
  kb.concept_abox = {{A, 0}};
  DatalogProgram d = build_datalog(kb);
  CHECK(d.aux_individuals.size() == 2);  // o_{r,C} shared, o_{r,B} separate
}

TEST_CASE("subrole axioms copy dir edges in the datalog program only") {
  KB kb = tiny(Axiom::sub_role(1, 0));  // s SubRoleOf r
  RoleId r = kb.sym.find_role("r"), s = kb.sym.find_role("s");
  DatalogProgram d = build_datalog(kb);
  RuleBase xi = build_xi(kb);
  Rule dir_copy{{RAtom::dir(s, X, Y)}, {RAtom::dir(r, X, Y)}};
  CHECK(has_rule(d.rules, dir_copy));
  CHECK(!has_rule(xi.rules, dir_copy));
}

TEST_CASE("the two programs differ exactly on type-7 and dir rules") {
  KB kb = ex1_kb();
  RuleBase xi = build_xi(kb);
  DatalogProgram d = build_datalog(kb);
  CHECK(xi.facts == d.facts);
  for (const Rule& r : xi.rules)
    if (!r.exist) CHECK(has_rule(d.rules, r));
  for (const Rule& r : d.rules) {
    bool uses_dir = false;
    for (const RAtom& a : r.body) uses_dir |= a.pred == Pred::Dir;
    for (const RAtom& a : r.head) uses_dir |= a.pred == Pred::Dir;
    if (!uses_dir) CHECK(has_rule(xi.rules, r));
  }
}

TEST_CASE("dialect markers reflect the axioms") {
  CHECK(build_datalog(ex1_kb()).has_trans);
  CHECK(!build_datalog(ex1_kb()).has_refl);
  CHECK(build_datalog(ex1_kb()).has_self_axioms);
  KB plain = tiny(Axiom::sub_class(2, 3));
  DatalogProgram d = build_datalog(plain);
  CHECK(!d.has_trans);
  CHECK(!d.has_refl);
  CHECK(!d.has_self_axioms);
  CHECK(build_datalog(tiny(Axiom::refl(0))).has_refl);
  CHECK(build_datalog(tiny(Axiom::self_lhs(0, 3))).has_self_axioms);
}

TEST_CASE("translating an invalid KB fails") {
  KB kb = tiny(Axiom::sub_class(Symbols::kBot, 2));
  CHECK_THROWS_AS(build_xi(kb), ValidationFailed);
  CHECK_THROWS_AS(build_datalog(kb), ValidationFailed);
}

TEST_CASE("program size is linear in the KB") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    KB kb = random_kb(rng);
    DatalogProgram d = build_datalog(kb);
    size_t sig = kb.sym.n_concepts() + kb.sym.n_roles() + kb.sym.n_individuals();
    size_t abox = kb.concept_abox.size() + kb.role_abox.size();
    CHECK(d.rules.size() + d.facts.size() <=
          3 * kb.tbox.size() + 3 * sig + abox);
  }
}
