#pragma once
// Least-model computation for D_K with destructive equality
// canonicalization, plus the read API used by answering and filtering.

#include <cstdint>
#include <utility>
#include <vector>

#include "elq/rules.h"

namespace elq {

// Total strict order on individuals: named before aux; named by
// lexicographic name, aux by (role name, concept name).
class TermOrder {
 public:
  TermOrder() = default;
  TermOrder(const Symbols& sym, IndId first_aux,
            const std::vector<AuxIndividual>& aux);
  bool less(IndId a, IndId b) const { return rank_[a] < rank_[b]; }
  IndId min(IndId a, IndId b) const { return less(a, b) ? a : b; }
  uint32_t rank(IndId a) const { return rank_[a]; }

 private:
  std::vector<uint32_t> rank_;
};

struct MaterializeStats {
  uint64_t derived = 0;     // facts added (including initial ABox load)
  uint64_t merges = 0;      // equality-class unions
  uint64_t iterations = 0;  // worklist items processed
  double wall_ms = 0.0;
};

struct MaterializeOptions {
  uint64_t max_facts = 50'000'000;
};

class FactStore {
 public:
  bool unsat() const { return unsat_; }
  uint32_t n_terms() const { return n_terms_; }
  uint32_t n_concepts() const { return n_concepts_; }
  uint32_t n_roles() const { return n_roles_; }
  IndId first_aux() const { return first_aux_; }

  IndId rep(IndId u) const { return u < n_terms_ ? rep_[u] : u; }
  bool is_aux_id(IndId u) const { return u >= first_aux_ && u < n_terms_; }
  // canonical partition (Def. of canonicalization)
  const std::vector<IndId>& named_reps() const { return named_reps_; }
  const std::vector<IndId>& aux_reps() const { return aux_reps_; }
  // named members of u's equality class (empty if u is not a named rep)
  const std::vector<IndId>& eq_named(IndId u) const;

  bool holds_concept(ConceptId c, IndId u) const;
  bool holds_role(RoleId r, IndId s, IndId t) const;
  bool holds_dir(RoleId r, IndId s, IndId t) const;
  bool holds_self(RoleId r, IndId u) const;
  bool holds_ind(IndId u) const;
  bool holds(const RAtom& ground) const;  // dispatch over Pred

  const std::vector<IndId>& concept_extent(ConceptId c) const;
  const std::vector<IndId>& self_extent(RoleId r) const;
  const std::vector<IndId>& ind_extent() const { return ind_list_; }
  const std::vector<IndId>& succ(RoleId r, IndId u) const;
  const std::vector<IndId>& pred(RoleId r, IndId u) const;
  const std::vector<IndId>& dir_succ(RoleId r, IndId u) const;

  // all (R, v) with dir_R(u, v) stored and v an aux representative
  std::vector<std::pair<RoleId, IndId>> direct_successors(IndId u) const;

  // index of an aux representative in aux_reps(), or kNone
  uint32_t aux_index(IndId u) const;
  // nonempty dir-path u ⇝ v through aux individuals only (v aux rep)
  bool aux_reachable(IndId u, IndId v) const;
  // named reps ordered by TermOrder (lexicographic name)
  const std::vector<IndId>& named_by_order() const { return named_by_order_; }
  // named reps that aux-reach the given aux rep, in TermOrder
  const std::vector<IndId>& named_sources(uint32_t aux_idx) const;
  const TermOrder& order() const { return order_; }

  uint64_t fact_count() const { return fact_count_; }
  const Symbols& sym() const { return sym_; }
  const RoleHierarchy& hier() const { return hier_; }
  bool has_trans() const { return has_trans_; }
  bool has_refl() const { return has_refl_; }
  bool has_self_axioms() const { return has_self_axioms_; }

 private:
  friend class Materializer;
  bool unsat_ = false;
  uint32_t n_terms_ = 0, n_concepts_ = 0, n_roles_ = 0;
  IndId first_aux_ = 0;
  uint64_t fact_count_ = 0;
  std::vector<IndId> rep_;
  std::vector<IndId> named_reps_, aux_reps_;
  std::vector<std::vector<IndId>> eq_named_;         // by named rep id
  std::vector<std::vector<IndId>> concept_ext_;      // by concept
  std::vector<std::vector<IndId>> self_ext_;         // by role
  std::vector<IndId> ind_list_;
  std::vector<std::vector<uint8_t>> concept_bit_;    // [c][u]
  std::vector<std::vector<uint8_t>> self_bit_;       // [r][u]
  std::vector<uint8_t> ind_bit_;
  std::vector<std::vector<std::vector<IndId>>> succ_, pred_, dsucc_;
  std::vector<uint32_t> aux_idx_;                    // term -> aux index
  uint32_t n_aux_reps_ = 0;
  uint32_t reach_words_ = 0;
  std::vector<uint64_t> reach_;  // [u * reach_words_ ...] aux-reach bitset
  std::vector<IndId> named_by_order_;
  std::vector<std::vector<IndId>> named_sources_;  // by aux index
  TermOrder order_;
  Symbols sym_;
  RoleHierarchy hier_;
  bool has_trans_ = false, has_refl_ = false, has_self_axioms_ = false;
};

std::pair<FactStore, MaterializeStats> materialize(
    const DatalogProgram& program, const MaterializeOptions& opt = {});

bool is_unsatisfiable(const FactStore& store);

// Independent one-round closure check: true iff no rule of `program` can
// derive a fact missing from `store` (modulo representatives). Used by
// tests after every materialize; implemented as a generic rule
// interpreter so it cross-checks the specialized engine.
bool verify_fixpoint(const FactStore& store, const DatalogProgram& program);

}  // namespace elq
