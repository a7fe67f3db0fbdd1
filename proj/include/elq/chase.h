#pragma once
// Bounded Skolem chase with equality merging. Serves as an independent
// ground-truth oracle for certain-answer computation on small inputs: the
// rule base keeps its existential heads, which are satisfied by fresh
// functional terms instead of the shared aux individuals the datalog
// translation uses.

#include <string>
#include <utility>
#include <vector>

#include "elq/rules.h"

namespace elq {

struct ChaseOptions {
  uint32_t depth_limit = 6;       // max nesting depth of functional terms
  uint64_t fact_limit = 1000000;  // hard cap on the instance size
};

// A chase term is a named individual or a functional term f(arg) where f
// is the Skolem function of one existential rule A1 ⊑ ∃R.A (one symbol
// per rule, keyed by the triple (R, A, A1)).
struct ChaseTerm {
  uint32_t fn = kNone;   // skolem index, or kNone for named terms
  uint32_t arg = kNone;  // argument term id when functional
  IndId ind = kNone;     // individual id when named
  uint32_t depth = 0;    // named terms have depth 0
  bool named() const { return fn == kNone; }
};

struct SkolemFn {
  RoleId r = kNone;
  ConceptId a = kNone;   // filler concept
  ConceptId a1 = kNone;  // left-hand concept of the originating axiom
};

// The (possibly truncated) result of chasing a rule base. All fact
// extents are kept normalized: they mention only representative terms of
// the ⇝ (leads-to) equivalence induced by equality-rule applications.
struct ChaseInstance {
  std::vector<ChaseTerm> terms;
  std::vector<SkolemFn> skolems;

  // Extents, indexed by predicate id; pairs/ids are term ids.
  std::vector<std::vector<uint32_t>> concept_ext;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> role_ext;
  std::vector<std::vector<uint32_t>> self_ext;
  std::vector<uint32_t> ind_ext;

  // Recorded w ⇝ w' merges, in application order (w > w').
  std::vector<std::pair<uint32_t, uint32_t>> leadsto;

  bool saturated = false;   // no rule is applicable to the result
  bool truncated = false;   // some application was skipped or cut short
  uint32_t depth_reached = 0;
  uint64_t fact_count = 0;

  // ⇝ forest: parent[t] points toward the smaller merge partner.
  std::vector<uint32_t> parent;

  bool unsat() const;  // Bot has a nonempty extent
  // Representative of t's ⇝-class (facts mention only representatives).
  uint32_t normalize(uint32_t t) const;
  // Term id of a named individual (kNone if it never entered the chase).
  uint32_t term_of(IndId ind) const;

  bool holds_concept(ConceptId c, uint32_t t) const;
  bool holds_role(RoleId r, uint32_t s, uint32_t t) const;
};

ChaseInstance chase(const RuleBase& xi, const Symbols& sym,
                    const ChaseOptions& opt = {});

struct OracleResult {
  std::vector<std::vector<IndId>> tuples;  // sorted, deduplicated
  bool complete = false;  // instance was saturated: tuples are exact
  bool unsat = false;     // Bot derived: every tuple is a certain answer
};

// Certain answers of q over the chased instance: named tuples whose
// normalized image embeds into the instance. When the chase saturated
// the result is exact; otherwise it is a sound under-approximation.
OracleResult oracle_answers(const RuleBase& xi, const Symbols& sym,
                            const CQ& q, const ChaseOptions& opt = {});

// Renders a term: a named individual's name, or f[R,A,A1](w).
std::string render_term(const ChaseInstance& ci, const Symbols& sym,
                        uint32_t t);
// One line per fact plus one per recorded merge, sorted.
std::string dump_instance(const ChaseInstance& ci, const Symbols& sym);

}  // namespace elq
