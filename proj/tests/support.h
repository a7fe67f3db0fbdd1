#pragma once
// Shared test fixtures: the running-example KB and its queries, name-based
// lookups, and the seeded random KB / query generators behind the
// equivalence suites.

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "elq/answer.h"
#include "elq/arborescent.h"
#include "elq/chase.h"
#include "elq/filter.h"
#include "elq/kb.h"
#include "elq/rules.h"
#include "elq/store.h"
#include "elq/text.h"

namespace elqtest {

using namespace elq;

// The running example: individuals a and b, a transitive role T below R,
// a simple role S with a self restriction, and a nominal that folds one
// anonymous T-successor back onto a.
inline KB ex1_kb() {
  KB kb;
  auto c = [&](const char* n) { return kb.sym.concept_of(n); };
  auto r = [&](const char* n) { return kb.sym.role_of(n); };
  ConceptId A = c("A"), B = c("B"), C = c("C"), D = c("D");
  ConceptId E = c("E"), F = c("F"), G = c("G");
  RoleId S = r("S"), T = r("T"), R = r("R");
  IndId a = kb.sym.individual_of("a"), b = kb.sym.individual_of("b");
  kb.tbox = {
      Axiom::exist_rhs(A, S, C), Axiom::self_rhs(C, S),
      Axiom::exist_rhs(C, T, D), Axiom::exist_rhs(A, T, E),
      Axiom::exist_rhs(E, T, D), Axiom::exist_rhs(B, T, F),
      Axiom::exist_rhs(F, T, D), Axiom::exist_rhs(F, T, G),
      Axiom::nominal(G, a),      Axiom::exist_rhs(D, T, D),
      Axiom::sub_role(T, R),     Axiom::trans(T),
  };
  kb.concept_abox = {{A, a}, {B, b}};
  return kb;
}

// q3(?x1, ?x2): x1 and x2 both reach a shared D-element through R.
inline const char* kEx3Text =
    "q3(?x1, ?x2) :- A(?x1), R(?x1, ?y), B(?x2), R(?x2, ?y), D(?y).";

// q4(?x): the four-variable query whose soundness run exercises a direct
// label, a split through a named root, an aux-simple atom, and a self loop.
inline const char* kEx4Text =
    "q4(?x) :- S(?x, ?y1), S(?y1, ?y1), R(?x, ?y3), D(?y3), R(?y2, ?y3), "
    "F(?y2), T(?y2, ?x).";

struct Fixture {
  DatalogProgram d;
  FactStore st;
  MaterializeStats ms;
};

inline Fixture make_fixture(const KB& kb) {
  Fixture f;
  f.d = build_datalog(kb);
  auto [st, ms] = materialize(f.d);
  f.st = std::move(st);
  f.ms = ms;
  return f;
}

inline Fixture ex1_fixture() { return make_fixture(ex1_kb()); }

inline IndId ind(const Symbols& sym, const std::string& name) {
  IndId i = sym.find_individual(name);
  if (i == kNone) throw std::runtime_error("no individual named " + name);
  return i;
}

inline IndId aux(const Symbols& sym, const std::string& role,
                 const std::string& filler) {
  return ind(sym, "aux:" + role + ":" + filler);
}

inline VarId var_of(const CQ& q, const std::string& name) {
  for (VarId v = 0; v < q.n_vars(); ++v)
    if (q.var_names[v] == name) return v;
  throw std::runtime_error("no query variable named " + name);
}

// Builds a substitution from variable names to individual names; images
// are rewritten to their equality representatives.
inline Substitution make_tau(
    const CQ& q, const FactStore& st,
    std::vector<std::pair<std::string, std::string>> m) {
  Substitution tau(q.n_vars(), kNone);
  for (auto& [v, i] : m) tau[var_of(q, v)] = st.rep(ind(st.sym(), i));
  return tau;
}

inline std::vector<std::string> tuple_names(const FactStore& st,
                                            const std::vector<IndId>& t) {
  std::vector<std::string> row;
  for (IndId i : t) row.push_back(st.sym().individual_name(i));
  return row;
}

inline bool bool_verdict(const AnswerSet& as) {
  return as.unsatisfiable || !as.tuples.empty();
}

// --- random KB generation -------------------------------------------------
//
// Concepts are stratified by index: subsumption, conjunction, and
// existential axioms point to a strictly larger index, while the heads of
// range, left-hand existential, and left-hand Self axioms are pinned to
// the maximal index, which no axiom consumes. Anonymous chase elements
// then only ever gain indices above their entry index (or the sink), so
// entry indices grow strictly along anonymous chains and every generated
// KB has a finite chase — even through nominal merges, transitivity, and
// reflexivity, which are left unrestricted.

struct RandomKbSpec {
  uint32_t max_concepts = 6;  // user concepts, beyond Top/Bot
  uint32_t max_roles = 3;
  uint32_t max_inds = 8;
  bool with_trans = true;
  bool with_refl = true;
  bool with_self = true;
  bool with_bot = true;
};

inline KB random_kb(std::mt19937_64& rng, const RandomKbSpec& spec = {}) {
  auto pick = [&](uint32_t lo, uint32_t hi) {
    return lo + (uint32_t)(rng() % (hi - lo + 1));
  };
  KB kb;
  const uint32_t nc = pick(2, spec.max_concepts);
  const uint32_t min_roles =
      (spec.with_trans && spec.with_refl && spec.max_roles >= 2) ? 2 : 1;
  const uint32_t nr = pick(min_roles, spec.max_roles);
  const uint32_t ni = pick(1, spec.max_inds);
  std::vector<ConceptId> C(nc);
  std::vector<RoleId> R(nr);
  std::vector<IndId> I(ni);
  for (uint32_t i = 0; i < nc; ++i)
    C[i] = kb.sym.concept_of("C" + std::to_string(i));
  for (uint32_t i = 0; i < nr; ++i)
    R[i] = kb.sym.role_of("r" + std::to_string(i));
  for (uint32_t i = 0; i < ni; ++i)
    I[i] = kb.sym.individual_of("i" + std::to_string(i));

  if (spec.with_trans) kb.tbox.push_back(Axiom::trans(R[0]));
  if (spec.with_refl) kb.tbox.push_back(Axiom::refl(R[nr > 1 ? 1 : 0]));
  for (uint32_t k = pick(0, 2); k > 0; --k) {
    RoleId s = R[pick(0, nr - 1)], r = R[pick(0, nr - 1)];
    if (s != r) kb.tbox.push_back(Axiom::sub_role(s, r));
  }
  RoleHierarchy hier = role_hierarchy(kb);
  std::vector<RoleId> simple;
  for (RoleId r : R)
    if (hier.simple(r)) simple.push_back(r);

  auto role = [&]() { return R[pick(0, nr - 1)]; };
  auto bot_head = [&]() { return spec.with_bot && pick(0, 11) == 0; };
  const ConceptId sink = C[nc - 1];

  for (uint32_t k = pick(3, 12); k > 0; --k) {
    switch (pick(0, 7)) {
      case 0: {  // C_i SubClassOf C_j, i < j (or Bot)
        uint32_t i = pick(0, nc - 2);
        ConceptId head = bot_head() ? Symbols::kBot : C[pick(i + 1, nc - 1)];
        kb.tbox.push_back(Axiom::sub_class(C[i], head));
        break;
      }
      case 1: {  // C_i and C_k SubClassOf C_j, max(i,k) < j
        uint32_t j = pick(1, nc - 1);
        ConceptId head = bot_head() ? Symbols::kBot : C[j];
        kb.tbox.push_back(
            Axiom::conj(C[pick(0, j - 1)], C[pick(0, j - 1)], head));
        break;
      }
      case 2:  // left-hand existentials derive only the sink
        kb.tbox.push_back(Axiom::exist_lhs(role(), C[pick(0, nc - 1)], sink));
        break;
      case 3:
        kb.tbox.push_back(Axiom::range(role(), sink));
        break;
      case 4: {  // C_i SubClassOf some R C_j, i < j
        uint32_t i = pick(0, nc - 2);
        kb.tbox.push_back(
            Axiom::exist_rhs(C[i], role(), C[pick(i + 1, nc - 1)]));
        break;
      }
      case 5:
        kb.tbox.push_back(
            Axiom::nominal(C[pick(0, nc - 1)], I[pick(0, ni - 1)]));
        break;
      case 6:
        if (spec.with_self && !simple.empty())
          kb.tbox.push_back(Axiom::self_rhs(
              C[pick(0, nc - 1)], simple[pick(0, (uint32_t)simple.size() - 1)]));
        break;
      case 7:
        if (spec.with_self && !simple.empty())
          kb.tbox.push_back(Axiom::self_lhs(
              simple[pick(0, (uint32_t)simple.size() - 1)], sink));
        break;
    }
  }

  for (uint32_t k = pick(1, std::min<uint32_t>(6, 2 * ni)); k > 0; --k)
    kb.concept_abox.push_back({C[pick(0, nc - 1)], I[pick(0, ni - 1)]});
  for (uint32_t k = pick(0, 6); k > 0; --k)
    kb.role_abox.push_back({role(), I[pick(0, ni - 1)], I[pick(0, ni - 1)]});
  return kb;
}

// Random conjunctive query over the KB's signature: at most `max_atoms`
// atoms and `max_vars` variables; unused variables are compacted away.
inline CQ random_query(std::mt19937_64& rng, const KB& kb,
                       uint32_t max_atoms = 4, uint32_t max_vars = 3) {
  auto pick = [&](uint32_t lo, uint32_t hi) {
    return lo + (uint32_t)(rng() % (hi - lo + 1));
  };
  const Symbols& s = kb.sym;
  const uint32_t nv = pick(1, max_vars);
  CQ q;
  q.name = "q";
  auto term = [&]() -> QTerm {
    if (s.n_individuals() > 0 && pick(0, 3) == 0)
      return QTerm::constant(pick(0, s.n_individuals() - 1));
    return QTerm::var(pick(0, nv - 1));
  };
  for (uint32_t k = pick(1, max_atoms); k > 0; --k) {
    if (s.n_roles() == 0 || pick(0, 1) == 0)
      q.atoms.push_back(QAtom::unary(pick(0, s.n_concepts() - 1), term()));
    else
      q.atoms.push_back(QAtom::role(pick(0, s.n_roles() - 1), term(), term()));
  }

  std::vector<VarId> remap(nv, kNone);
  uint32_t used = 0;
  auto touch = [&](QTerm& t) {
    if (!t.is_var) return;
    if (remap[t.id] == kNone) {
      remap[t.id] = used++;
      q.var_names.push_back("x" + std::to_string(remap[t.id]));
    }
    t.id = remap[t.id];
  };
  for (QAtom& a : q.atoms) {
    touch(a.t0);
    if (a.binary) touch(a.t1);
  }
  for (VarId v = 0; v < used; ++v)
    if (pick(0, 1) == 0) q.answer_vars.push_back(v);
  return q;
}

// Random Boolean arborescent query: a variable tree with every role edge
// oriented toward the root, no constants, plus some unary decoration.
inline CQ random_arborescent_query(std::mt19937_64& rng, const KB& kb,
                                   uint32_t max_vars = 3) {
  auto pick = [&](uint32_t lo, uint32_t hi) {
    return lo + (uint32_t)(rng() % (hi - lo + 1));
  };
  const Symbols& s = kb.sym;
  const uint32_t nv = pick(1, max_vars);
  CQ q;
  q.name = "qa";
  for (uint32_t v = 0; v < nv; ++v)
    q.var_names.push_back("x" + std::to_string(v));
  q.atoms.push_back(QAtom::unary(pick(0, s.n_concepts() - 1), QTerm::var(0)));
  for (uint32_t v = 1; v < nv; ++v) {
    VarId parent = pick(0, v - 1);
    q.atoms.push_back(QAtom::role(pick(0, s.n_roles() - 1), QTerm::var(v),
                                  QTerm::var(parent)));
    if (pick(0, 1) == 0)
      q.atoms.push_back(
          QAtom::unary(pick(0, s.n_concepts() - 1), QTerm::var(v)));
  }
  return q;
}

}  // namespace elqtest
