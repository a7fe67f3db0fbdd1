#include "elq/rules.h"

#include <set>
#include <string>

namespace elq {
namespace {

const RTerm X = RTerm::var(0);
const RTerm Y = RTerm::var(1);
const RTerm Z = RTerm::var(2);

void require_valid(const KB& kb) {
  ValidationReport rep = validate_kb(kb);
  if (!rep.empty()) {
    std::string msg = "invalid KB:";
    for (const ValidationIssue& v : rep) msg += " " + v.message + ";";
    throw ValidationFailed(msg);
  }
}

struct Occurrence {
  std::set<ConceptId> concepts;  // user concepts occurring in K
  std::set<RoleId> roles;
  std::set<IndId> inds;
};

Occurrence occurring_symbols(const KB& kb) {
  Occurrence occ;
  auto add_c = [&](ConceptId c) {
    if (c != kNone && c != Symbols::kTop && c != Symbols::kBot)
      occ.concepts.insert(c);
  };
  auto add_r = [&](RoleId r) {
    if (r != kNone) occ.roles.insert(r);
  };
  for (const Axiom& ax : kb.tbox) {
    add_c(ax.a);
    add_c(ax.b);
    add_c(ax.c);
    add_r(ax.r);
    add_r(ax.s);
    if (ax.ind != kNone) occ.inds.insert(ax.ind);
  }
  for (const ConceptAssertion& ca : kb.concept_abox) {
    add_c(ca.c);
    occ.inds.insert(ca.i);
  }
  for (const RoleAssertion& ra : kb.role_abox) {
    add_r(ra.r);
    occ.inds.insert(ra.s);
    occ.inds.insert(ra.o);
  }
  return occ;
}

// Rules shared by Ξ_K and D_K: close(K) plus the Table 1 translation of
// every axiom type except 7 (which differs between the two programs).
template <typename EmitRule, typename EmitFact>
void build_common(const KB& kb, EmitRule rule, EmitFact fact) {
  const Occurrence occ = occurring_symbols(kb);

  for (const Axiom& ax : kb.tbox) {
    switch (ax.kind) {
      case AxiomKind::SubClass:  // A(x) → B(x)
        rule({{RAtom::cls(ax.a, X)}, {RAtom::cls(ax.c, X)}});
        break;
      case AxiomKind::Nominal:  // A(x) → x ≈ a
        rule({{RAtom::cls(ax.a, X)},
              {RAtom::eq(X, RTerm::constant(ax.ind))}});
        break;
      case AxiomKind::Conj:  // A1(x) ∧ A2(x) → B(x)
        rule({{RAtom::cls(ax.a, X), RAtom::cls(ax.b, X)},
              {RAtom::cls(ax.c, X)}});
        break;
      case AxiomKind::ExistLhs:  // R(x,y) ∧ A1(y) → B(x)
        rule({{RAtom::role(ax.r, X, Y), RAtom::cls(ax.a, Y)},
              {RAtom::cls(ax.c, X)}});
        break;
      case AxiomKind::SubRole:  // S(x,y) → R(x,y); Self_S(x) → Self_R(x)
        rule({{RAtom::role(ax.s, X, Y)}, {RAtom::role(ax.r, X, Y)}});
        rule({{RAtom::self(ax.s, X)}, {RAtom::self(ax.r, X)}});
        break;
      case AxiomKind::Range:  // R(x,y) → B(y)
        rule({{RAtom::role(ax.r, X, Y)}, {RAtom::cls(ax.c, Y)}});
        break;
      case AxiomKind::ExistRhs:
        break;  // differs between Ξ_K and D_K
      case AxiomKind::Trans:  // R(x,y) ∧ R(y,z) → R(x,z)
        rule({{RAtom::role(ax.r, X, Y), RAtom::role(ax.r, Y, Z)},
              {RAtom::role(ax.r, X, Z)}});
        break;
      case AxiomKind::Refl:  // ⊤(x) → R(x,x) ∧ Self_R(x)
        rule({{RAtom::cls(Symbols::kTop, X)},
              {RAtom::role(ax.r, X, X), RAtom::self(ax.r, X)}});
        break;
      case AxiomKind::SelfRhs:  // A(x) → R(x,x) ∧ Self_R(x)
        rule({{RAtom::cls(ax.a, X)},
              {RAtom::role(ax.r, X, X), RAtom::self(ax.r, X)}});
        break;
      case AxiomKind::SelfLhs:  // Self_R(x) → B(x)
        rule({{RAtom::self(ax.r, X)}, {RAtom::cls(ax.c, X)}});
        break;
    }
  }

  // close(K)
  for (ConceptId c : occ.concepts)
    rule({{RAtom::cls(c, X)}, {RAtom::cls(Symbols::kTop, X)}});
  for (RoleId r : occ.roles) {
    rule({{RAtom::ind(X), RAtom::role(r, X, X)}, {RAtom::self(r, X)}});
    rule({{RAtom::role(r, X, Y)},
          {RAtom::cls(Symbols::kTop, X),
           RAtom::cls(Symbols::kTop, Y)}});
  }
  for (IndId i : occ.inds) fact(RAtom::ind(RTerm::constant(i)));

  // A (the ABox)
  for (const ConceptAssertion& ca : kb.concept_abox)
    fact(RAtom::cls(ca.c, RTerm::constant(ca.i)));
  for (const RoleAssertion& ra : kb.role_abox)
    fact(RAtom::role(ra.r, RTerm::constant(ra.s), RTerm::constant(ra.o)));
}

}  // namespace

RuleBase build_xi(const KB& kb) {
  require_valid(kb);
  RuleBase xi;
  build_common(
      kb, [&](Rule r) { xi.rules.push_back(std::move(r)); },
      [&](RAtom f) { xi.facts.push_back(f); });
  for (const Axiom& ax : kb.tbox)
    if (ax.kind == AxiomKind::ExistRhs) {
      // A1(x) → ∃z. R(x,z) ∧ A(z)
      Rule r{{RAtom::cls(ax.a, X)},
             {RAtom::role(ax.r, X, Z), RAtom::cls(ax.c, Z)},
             true,
             2};
      xi.rules.push_back(std::move(r));
    }
  return xi;
}

DatalogProgram build_datalog(const KB& kb) {
  require_valid(kb);
  DatalogProgram d;
  d.sym = kb.sym;
  build_common(
      kb, [&](Rule r) { d.rules.push_back(std::move(r)); },
      [&](RAtom f) { d.facts.push_back(f); });

  d.first_aux = d.sym.n_individuals();
  std::set<std::pair<RoleId, ConceptId>> seen;
  auto aux_of = [&](RoleId r, ConceptId a) -> IndId {
    IndId id = d.sym.individual_of("aux:" + d.sym.role_name(r) + ":" +
                                   d.sym.concept_name(a));
    if (seen.insert({r, a}).second) d.aux_individuals.push_back({r, a, id});
    return id;
  };

  for (const Axiom& ax : kb.tbox) {
    switch (ax.kind) {
      case AxiomKind::ExistRhs: {
        // A1(x) → R(x,o) ∧ dir_R(x,o) ∧ A(o)   with o = o_{R,A}
        RTerm o = RTerm::constant(aux_of(ax.r, ax.c));
        d.rules.push_back({{RAtom::cls(ax.a, X)},
                           {RAtom::role(ax.r, X, o), RAtom::dir(ax.r, X, o),
                            RAtom::cls(ax.c, o)}});
        break;
      }
      case AxiomKind::SubRole:  // dir_S(x,y) → dir_R(x,y)
        d.rules.push_back({{RAtom::dir(ax.s, X, Y)}, {RAtom::dir(ax.r, X, Y)}});
        break;
      case AxiomKind::Trans:
        d.has_trans = true;
        break;
      case AxiomKind::Refl:
        d.has_refl = true;
        break;
      case AxiomKind::SelfRhs:
      case AxiomKind::SelfLhs:
        d.has_self_axioms = true;
        break;
      default:
        break;
    }
  }
  d.hier = role_hierarchy(kb);
  return d;
}

}  // namespace elq
