#include "elq/bench.h"

#include <random>
#include <string>

namespace elq {

namespace {

std::string num(uint32_t v) { return std::to_string(v); }

}  // namespace

BenchOutput gen_bench(const BenchSpec& spec) {
  BenchOutput out;
  KB& kb = out.kb;
  Symbols& sym = kb.sym;

  ConceptId Org = sym.concept_of("Org");
  ConceptId Dept = sym.concept_of("Dept");
  ConceptId Group = sym.concept_of("Group");
  ConceptId Person = sym.concept_of("Person");
  ConceptId Professor = sym.concept_of("Professor");
  ConceptId Student = sym.concept_of("Student");
  ConceptId Universe = sym.concept_of("Universe");
  RoleId subOrgOf = sym.role_of("subOrgOf");
  RoleId partOf = sym.role_of("partOf");
  RoleId memberOf = sym.role_of("memberOf");
  RoleId headOf = sym.role_of("headOf");
  RoleId overlaps = sym.role_of("overlaps");

  // Base schema: concept hierarchy, membership range, one transitive
  // role, and a self-restriction.
  kb.tbox.push_back(Axiom::sub_class(Dept, Org));
  kb.tbox.push_back(Axiom::sub_class(Group, Org));
  kb.tbox.push_back(Axiom::sub_class(Professor, Person));
  kb.tbox.push_back(Axiom::sub_class(Student, Person));
  kb.tbox.push_back(Axiom::range(memberOf, Org));
  kb.tbox.push_back(Axiom::trans(subOrgOf));
  kb.tbox.push_back(Axiom::self_rhs(Org, overlaps));
  // The two schema extensions: sub-organizations are parts, and every
  // organization is part of some universe.
  kb.tbox.push_back(Axiom::sub_role(subOrgOf, partOf));
  kb.tbox.push_back(Axiom::exist_rhs(Org, partOf, Universe));
  kb.tbox.push_back(Axiom::sub_role(headOf, memberOf));

  std::mt19937_64 rng(spec.seed);
  const uint32_t depth = spec.depth == 0 ? 1 : spec.depth;
  for (uint32_t o = 1; o <= spec.scale; ++o) {
    std::string on = "org_" + num(o);
    IndId org = sym.individual_of(on);
    kb.concept_abox.push_back({Org, org});
    for (uint32_t d = 1; d <= 3; ++d) {
      std::string dn = on + "_dept_" + num(d);
      IndId dept = sym.individual_of(dn);
      kb.concept_abox.push_back({Dept, dept});
      kb.role_abox.push_back({subOrgOf, dept, org});

      std::vector<IndId> chain;  // dept-rooted sub-group chain
      IndId up = dept;
      for (uint32_t l = 1; l <= depth; ++l) {
        IndId g = sym.individual_of(dn + "_group_" + num(l));
        kb.concept_abox.push_back({Group, g});
        kb.role_abox.push_back({subOrgOf, g, up});
        chain.push_back(g);
        up = g;
      }

      IndId prof = sym.individual_of(dn + "_prof");
      kb.concept_abox.push_back({Professor, prof});
      kb.role_abox.push_back({headOf, prof, dept});
      kb.role_abox.push_back(
          {memberOf, prof, chain[rng() % chain.size()]});
      for (uint32_t s = 1; s <= 2; ++s) {
        IndId st = sym.individual_of(dn + "_student_" + num(s));
        kb.concept_abox.push_back({Student, st});
        kb.role_abox.push_back(
            {memberOf, st, chain[rng() % chain.size()]});
      }
    }
  }

  auto var = [](CQ& q, const std::string& name) {
    q.var_names.push_back(name);
    return (VarId)(q.var_names.size() - 1);
  };

  {
    CQ q;  // members of organizations
    q.name = "members";
    VarId x = var(q, "x"), y = var(q, "y");
    q.answer_vars = {x, y};
    q.atoms.push_back(QAtom::role(memberOf, QTerm::var(x), QTerm::var(y)));
    q.atoms.push_back(QAtom::unary(Org, QTerm::var(y)));
    out.queries.push_back(std::move(q));
  }
  {
    CQ q;  // departments and their universe
    q.name = "universe";
    VarId x = var(q, "x"), u = var(q, "u");
    q.answer_vars = {x};
    q.atoms.push_back(QAtom::unary(Dept, QTerm::var(x)));
    q.atoms.push_back(QAtom::role(partOf, QTerm::var(x), QTerm::var(u)));
    q.atoms.push_back(QAtom::unary(Universe, QTerm::var(u)));
    out.queries.push_back(std::move(q));
  }
  {
    CQ q;  // transitive chain: people whose group is part of something
    q.name = "chain";
    VarId p = var(q, "p"), g = var(q, "g"), y = var(q, "y");
    q.answer_vars = {p};
    q.atoms.push_back(QAtom::unary(Person, QTerm::var(p)));
    q.atoms.push_back(QAtom::role(memberOf, QTerm::var(p), QTerm::var(g)));
    q.atoms.push_back(QAtom::role(partOf, QTerm::var(g), QTerm::var(y)));
    out.queries.push_back(std::move(q));
  }
  {
    CQ q;  // heads are members of their department
    q.name = "heads";
    VarId x = var(q, "x"), d = var(q, "d");
    q.answer_vars = {x, d};
    q.atoms.push_back(QAtom::role(headOf, QTerm::var(x), QTerm::var(d)));
    q.atoms.push_back(QAtom::role(memberOf, QTerm::var(x), QTerm::var(d)));
    q.atoms.push_back(QAtom::unary(Dept, QTerm::var(d)));
    out.queries.push_back(std::move(q));
  }
  {
    CQ q;  // self-overlap
    q.name = "self";
    VarId x = var(q, "x");
    q.answer_vars = {x};
    q.atoms.push_back(QAtom::role(overlaps, QTerm::var(x), QTerm::var(x)));
    out.queries.push_back(std::move(q));
  }
  return out;
}

}  // namespace elq
