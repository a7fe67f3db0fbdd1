#pragma once
// Soundness filter for candidate answers: fork closure, connection graph,
// isDSound, and the backtracking implementation of the full soundness
// check (renamings × skeletons × per-atom role guesses × exist).

#include <optional>

#include "elq/store.h"

namespace elq {

enum class AtomClass : uint8_t { Good, AuxSimple, Other };

// Classification of a binary atom R(s,t) under candidate τ:
//   Good      iff τ(t) is named, or s = t and Self_R(τ(s)) is stored;
//   AuxSimple iff s ≠ t, R is simple, τ(t) is aux, and
//             (τ(s) = τ(t) implies Self_R(τ(s)) is not stored);
//   Other     otherwise.
AtomClass classify_atom(const QAtom& atom, const Substitution& tau,
                        const FactStore& st);

// Result of closing (q, τ) under the fork rule. Terms are grouped into
// ∼-classes; q_sim is q with every term replaced by its class
// representative (constants win over variables; ties by term order).
struct ForkClosure {
  bool cond1_ok = true;  // s ∼ t implies τ(s) = τ(t)
  CQ q_sim;              // deduplicated atoms over representatives
  // per original variable: its representative term in q_sim
  std::vector<QTerm> var_rep;
  // class representative per constant of q (original and canonical ids),
  // sorted by id; backs same() so it needs no store access
  std::vector<std::pair<IndId, QTerm>> const_rep;
  bool same(const QTerm& x, const QTerm& y) const;
};

ForkClosure fork_closure(const CQ& q, const Substitution& tau,
                         const FactStore& st, uint64_t rep_salt = 0);

// Connection graph for q∼ and τ; explicit edge lists (test/debug surface —
// the search itself uses lazy adjacency).
struct ConnectionGraph {
  struct Vtx {
    bool is_var;
    uint32_t id;  // VarId or IndId
    bool operator==(const Vtx&) const = default;
  };
  std::vector<IndId> named;       // ind_≈: all canonical named individuals
  std::vector<VarId> var_vertices;  // vars of q∼ with aux images
  std::vector<std::pair<Vtx, Vtx>> e_s, e_t;
};

ConnectionGraph connection_graph(const CQ& q_sim, const Substitution& tau,
                                 const FactStore& st);

// isDSound: fork condition 1 plus acyclicity of ⟨V, E_s⟩.
bool is_dsound(const CQ& q, const Substitution& tau, const FactStore& st);

// A variable renaming σ on the aux-valued variables of q∼ (identity on
// everything else): idempotent, image-preserving, forest-preserving.
struct VariableRenaming {
  std::vector<std::pair<VarId, VarId>> map;  // v → σ(v), non-identity only
};

// A skeleton: one parent per (σ-surviving) variable vertex, picked among
// its E_t predecessors, forming a forest rooted at named individuals.
struct Skeleton {
  std::vector<std::pair<ConnectionGraph::Vtx, ConnectionGraph::Vtx>>
      edges;  // (parent, child)
};

// Enumeration surfaces used by tests; deterministic order (identity /
// fewer identifications first; lexicographic parent choice).
std::vector<VariableRenaming> list_renamings(const CQ& q_sim,
                                             const Substitution& tau,
                                             const FactStore& st);
std::vector<Skeleton> list_skeletons(const CQ& q_sim, const Substitution& tau,
                                     const FactStore& st,
                                     const VariableRenaming& sigma);

// exist(u', u, L): nonempty dir-path u' → u through aux individuals
// carrying every role of L on every step; any non-transitive role in L
// forces a single step.
bool exist(const FactStore& st, IndId u_from, IndId u_to,
           const std::vector<RoleId>& roles);

enum class Verdict : uint8_t { Sound, Unsound, Indeterminate };

struct FilterWitness {
  std::vector<std::pair<VarId, VarId>> sigma;  // non-identity renamings
  // parent of each variable vertex (parent var id, or ~0-flagged named)
  std::vector<std::pair<VarId, ConnectionGraph::Vtx>> parents;
  // per Other atom: (atom index in q_sim, chosen role P, split root or kNone)
  std::vector<std::tuple<uint32_t, RoleId, IndId>> roles;
};

struct FilterOptions {
  uint64_t branch_cap = 10'000'000;
  bool enable_fast_path = true;
  bool capture_witness = false;
  uint64_t rep_salt = 0;  // property-test hook: nonzero randomizes fork reps
};

struct FilterOutcome {
  Verdict verdict = Verdict::Unsound;
  uint64_t choices = 0;   // branch points explored (0 on the fast path)
  bool fast_path = false;
  std::optional<FilterWitness> witness;
  bool sound() const { return verdict == Verdict::Sound; }
};

// Algorithm: canonicalize; isDSound; fast path when every binary atom of
// q∼ is good or aux-simple; otherwise backtracking over renamings,
// skeletons, and role guesses with trail-based label undo and eager
// exist pruning. Never reports Unsound due to the branch cap.
FilterOutcome is_sound(const CQ& q, const FactStore& st,
                       const Substitution& tau, const FilterOptions& opt = {});

}  // namespace elq
