#pragma once
// Knowledge-base model: signature, normalized axioms, ABox, role hierarchy,
// conjunctive queries, and structural validation.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace elq {

using ConceptId = uint32_t;
using RoleId = uint32_t;
using IndId = uint32_t;
using VarId = uint32_t;
inline constexpr uint32_t kNone = 0xffffffffu;

// Thrown when an operation requires a query shape it was not given.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown when an operation requires a KB dialect it was not given.
struct DialectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown when a KB with validation errors reaches translation.
struct ValidationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown when a configured resource cap (fact count, branch budget) is hit.
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Interning tables for concept / role / individual names.
// Concept ids 0 and 1 are reserved for Top and Bot.
class Symbols {
 public:
  Symbols() {
    concept_of("Top");
    concept_of("Bot");
  }

  static constexpr ConceptId kTop = 0;
  static constexpr ConceptId kBot = 1;

  ConceptId concept_of(const std::string& name) {
    return intern(name, concepts_, cmap_);
  }
  RoleId role_of(const std::string& name) { return intern(name, roles_, rmap_); }
  IndId individual_of(const std::string& name) {
    return intern(name, inds_, imap_);
  }

  ConceptId find_concept(const std::string& name) const {
    return find(name, cmap_);
  }
  RoleId find_role(const std::string& name) const { return find(name, rmap_); }
  IndId find_individual(const std::string& name) const {
    return find(name, imap_);
  }

  const std::string& concept_name(ConceptId c) const { return concepts_[c]; }
  const std::string& role_name(RoleId r) const { return roles_[r]; }
  const std::string& individual_name(IndId i) const { return inds_[i]; }

  uint32_t n_concepts() const { return (uint32_t)concepts_.size(); }
  uint32_t n_roles() const { return (uint32_t)roles_.size(); }
  uint32_t n_individuals() const { return (uint32_t)inds_.size(); }

 private:
  static uint32_t intern(const std::string& name, std::vector<std::string>& v,
                         std::unordered_map<std::string, uint32_t>& m) {
    auto it = m.find(name);
    if (it != m.end()) return it->second;
    uint32_t id = (uint32_t)v.size();
    v.push_back(name);
    m.emplace(name, id);
    return id;
  }
  static uint32_t find(const std::string& name,
                       const std::unordered_map<std::string, uint32_t>& m) {
    auto it = m.find(name);
    return it == m.end() ? kNone : it->second;
  }

  std::vector<std::string> concepts_, roles_, inds_;
  std::unordered_map<std::string, uint32_t> cmap_, rmap_, imap_;
};

// The eleven normalized axiom forms.
enum class AxiomKind : uint8_t {
  SubClass,  //  1: A ⊑ B
  Nominal,   //  2: A ⊑ {a}
  Conj,      //  3: A1 ⊓ A2 ⊑ B
  ExistLhs,  //  4: ∃R.A1 ⊑ B
  SubRole,   //  5: S ⊑ R
  Range,     //  6: range(R) ⊑ B
  ExistRhs,  //  7: A1 ⊑ ∃R.A
  Trans,     //  8: transitive(R)
  Refl,      //  9: reflexive(R)
  SelfRhs,   // 10: A ⊑ ∃R.Self
  SelfLhs,   // 11: ∃R.Self ⊑ B
};

struct Axiom {
  AxiomKind kind{};
  ConceptId a = kNone;  // first lhs concept (or the lhs of type 10)
  ConceptId b = kNone;  // second lhs concept (type 3 only)
  ConceptId c = kNone;  // rhs/head concept, or the filler of type 7
  RoleId r = kNone;     // the role (types 4-11); super-role of type 5
  RoleId s = kNone;     // sub-role of type 5
  IndId ind = kNone;    // nominal individual (type 2)

  static Axiom sub_class(ConceptId a, ConceptId c) {
    return {AxiomKind::SubClass, a, kNone, c, kNone, kNone, kNone};
  }
  static Axiom nominal(ConceptId a, IndId i) {
    return {AxiomKind::Nominal, a, kNone, kNone, kNone, kNone, i};
  }
  static Axiom conj(ConceptId a1, ConceptId a2, ConceptId c) {
    return {AxiomKind::Conj, a1, a2, c, kNone, kNone, kNone};
  }
  static Axiom exist_lhs(RoleId r, ConceptId filler, ConceptId c) {
    return {AxiomKind::ExistLhs, filler, kNone, c, r, kNone, kNone};
  }
  static Axiom sub_role(RoleId sub, RoleId super) {
    return {AxiomKind::SubRole, kNone, kNone, kNone, super, sub, kNone};
  }
  static Axiom range(RoleId r, ConceptId c) {
    return {AxiomKind::Range, kNone, kNone, c, r, kNone, kNone};
  }
  static Axiom exist_rhs(ConceptId a1, RoleId r, ConceptId filler) {
    return {AxiomKind::ExistRhs, a1, kNone, filler, r, kNone, kNone};
  }
  static Axiom trans(RoleId r) {
    return {AxiomKind::Trans, kNone, kNone, kNone, r, kNone, kNone};
  }
  static Axiom refl(RoleId r) {
    return {AxiomKind::Refl, kNone, kNone, kNone, r, kNone, kNone};
  }
  static Axiom self_rhs(ConceptId a, RoleId r) {
    return {AxiomKind::SelfRhs, a, kNone, kNone, r, kNone, kNone};
  }
  static Axiom self_lhs(RoleId r, ConceptId c) {
    return {AxiomKind::SelfLhs, kNone, kNone, c, r, kNone, kNone};
  }

  bool operator==(const Axiom& o) const = default;
};

struct ConceptAssertion {
  ConceptId c;
  IndId i;
  bool operator==(const ConceptAssertion&) const = default;
};
struct RoleAssertion {
  RoleId r;
  IndId s, o;
  bool operator==(const RoleAssertion&) const = default;
};

struct KB {
  Symbols sym;
  std::vector<Axiom> tbox;
  std::vector<ConceptAssertion> concept_abox;
  std::vector<RoleAssertion> role_abox;
};

// Reflexive-transitive closure of the declared role inclusions, plus the
// transitivity/reflexivity markers and derived simplicity flags.
class RoleHierarchy {
 public:
  RoleHierarchy() = default;
  explicit RoleHierarchy(uint32_t n_roles) { reset(n_roles); }

  void reset(uint32_t n_roles);
  void add_inclusion(RoleId sub, RoleId super);  // declared S ⊑ R
  void mark_transitive(RoleId r);
  void mark_reflexive(RoleId r);
  void close();  // computes ⊑* and simplicity; idempotent

  uint32_t n_roles() const { return n_; }
  // s ⊑* r (reflexive-transitive closure of declared inclusions)
  bool sub(RoleId s, RoleId r) const { return closure_[s * n_ + r] != 0; }
  bool transitive(RoleId r) const { return trans_[r] != 0; }
  bool reflexive(RoleId r) const { return refl_[r] != 0; }
  // simple = no transitive role below it (itself included)
  bool simple(RoleId r) const { return simple_[r] != 0; }
  // all P with P ⊑* r, ⊑*-minimal first (topological order, ties by id)
  const std::vector<RoleId>& subroles_ordered(RoleId r) const {
    return subs_[r];
  }

 private:
  uint32_t n_ = 0;
  std::vector<uint8_t> closure_;  // n×n matrix of ⊑*
  std::vector<uint8_t> trans_, refl_, simple_;
  std::vector<std::vector<RoleId>> subs_;
  bool closed_ = false;
};

RoleHierarchy role_hierarchy(const KB& kb);
bool is_simple(RoleId r, const RoleHierarchy& h);

struct ValidationIssue {
  std::string message;
};
using ValidationReport = std::vector<ValidationIssue>;

// Structural well-formedness: Bot never on a left-hand side, Self axioms
// only over simple roles. Symbols are auto-declared by construction, so
// there are no undeclared-name errors. An empty report means valid.
ValidationReport validate_kb(const KB& kb);

// --- conjunctive queries ---

struct QTerm {
  bool is_var = true;
  uint32_t id = kNone;  // VarId or IndId
  static QTerm var(VarId v) { return {true, v}; }
  static QTerm constant(IndId i) { return {false, i}; }
  bool operator==(const QTerm&) const = default;
};

struct QAtom {
  bool binary = false;
  ConceptId c = kNone;  // unary atoms
  RoleId r = kNone;     // binary atoms
  QTerm t0, t1;         // unary atoms use t0 only
  static QAtom unary(ConceptId c, QTerm t) {
    QAtom a;
    a.binary = false;
    a.c = c;
    a.t0 = t;
    return a;
  }
  static QAtom role(RoleId r, QTerm s, QTerm t) {
    QAtom a;
    a.binary = true;
    a.r = r;
    a.t0 = s;
    a.t1 = t;
    return a;
  }
  bool operator==(const QAtom&) const = default;
};

struct CQ {
  std::string name = "q";
  std::vector<std::string> var_names;  // VarId -> name
  std::vector<VarId> answer_vars;      // in head order
  std::vector<QAtom> atoms;
  uint32_t n_vars() const { return (uint32_t)var_names.size(); }
};

// A (partial) assignment of query variables to individuals, indexed by
// VarId; kNone marks unassigned slots.
using Substitution = std::vector<IndId>;

}  // namespace elq
