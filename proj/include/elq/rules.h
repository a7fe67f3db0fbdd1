#pragma once
// Compilation of a KB into the rule base Ξ_K and the datalog program D_K.

#include <vector>

#include "elq/kb.h"

namespace elq {

// Predicates of compiled rules: user concepts (incl. Top/Bot), roles,
// direct-edge copies dir_R, Self_R markers, the named-individual marker
// ind, and equality heads.
enum class Pred : uint8_t { Concept, Role, Dir, Self, Ind, Eq };

struct RTerm {
  enum Tag : uint8_t { Var, Const } tag = Var;
  uint32_t id = 0;  // variable index (0=x, 1=y, 2=z) or IndId
  static RTerm var(uint32_t v) { return {Var, v}; }
  static RTerm constant(IndId i) { return {Const, i}; }
  bool operator==(const RTerm&) const = default;
};

struct RAtom {
  Pred pred{};
  uint32_t p = kNone;  // ConceptId or RoleId; unused for Ind/Eq
  RTerm a, b;          // unary predicates use a only; Eq uses both
  static RAtom cls(ConceptId c, RTerm t) { return {Pred::Concept, c, t, {}}; }
  static RAtom role(RoleId r, RTerm s, RTerm t) { return {Pred::Role, r, s, t}; }
  static RAtom dir(RoleId r, RTerm s, RTerm t) { return {Pred::Dir, r, s, t}; }
  static RAtom self(RoleId r, RTerm t) { return {Pred::Self, r, t, {}}; }
  static RAtom ind(RTerm t) { return {Pred::Ind, kNone, t, {}}; }
  static RAtom eq(RTerm s, RTerm t) { return {Pred::Eq, kNone, s, t}; }
  bool operator==(const RAtom&) const = default;
};

struct Rule {
  std::vector<RAtom> body;
  std::vector<RAtom> head;
  bool exist = false;        // head quantifies variable z existentially
  uint32_t exist_var = 2;    // index of z when exist
  bool operator==(const Rule&) const = default;
};

struct RuleBase {
  std::vector<Rule> rules;
  std::vector<RAtom> facts;  // ground: ABox atoms plus ind(a) markers
};

struct AuxIndividual {
  RoleId role;
  ConceptId filler;
  IndId ind;  // id interned into the program's symbol table
  bool operator==(const AuxIndividual&) const = default;
};

struct DatalogProgram {
  Symbols sym;  // the KB's symbols extended with aux individuals
  RoleHierarchy hier;
  std::vector<Rule> rules;
  std::vector<RAtom> facts;
  std::vector<AuxIndividual> aux_individuals;
  IndId first_aux = 0;  // ids >= first_aux are aux individuals
  // dialect markers used by the arborescent procedure
  bool has_trans = false, has_refl = false, has_self_axioms = false;
};

// Ξ_K = Ξ_T ∪ close(K) ∪ A (Table 1 translation; type-7 keeps its
// existential head).
RuleBase build_xi(const KB& kb);

// D_K: type-7 axioms replaced by aux-individual rules with dir edges;
// dir_S(x,y) → dir_R(x,y) added per type-5 axiom; all else as Ξ_K.
DatalogProgram build_datalog(const KB& kb);

}  // namespace elq
