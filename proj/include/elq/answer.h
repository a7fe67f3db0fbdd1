#pragma once
// Candidate enumeration and certain-answer computation: canonicalization,
// a deterministic streaming join for candidates, and the dispatch of each
// candidate through the soundness filter.

#include <memory>

#include "elq/store.h"

namespace elq {

struct SearchStats {
  uint64_t candidates = 0;
  uint64_t unsound = 0;
  uint64_t fast_path_hits = 0;
  uint64_t choices = 0;
  // The run exceeded its work budget and the result was computed exactly
  // over the terminating chase instead of per-candidate filtering.
  bool exact_fallback = false;
  double filter_ms_total = 0.0;
  double filter_ms_avg() const {
    return candidates ? filter_ms_total / (double)candidates : 0.0;
  }
  double choices_avg() const {
    return candidates ? (double)choices / (double)candidates : 0.0;
  }
};

struct AnswerSet {
  bool unsatisfiable = false;  // every tuple is a certain answer
  std::vector<std::vector<IndId>> tuples;  // sorted, deduplicated
  SearchStats stats;
};

struct AnswerOptions {
  uint64_t branch_cap = 10'000'000;
  bool enable_fast_path = true;
  // exhaustive: filter every candidate (faithful per-candidate stats).
  // When false, candidates whose answer projection is already accepted
  // are not filtered, and Boolean queries stop at the first acceptance.
  bool exhaustive = true;
  int jobs = 1;  // worker threads for filtering (exhaustive mode)

  // Staged work budgets, used only when an exact fallback is available
  // (the KB-level overload, where the chase of the rule base can stand in
  // for candidate filtering whenever it terminates). Each candidate's
  // soundness search first runs under min(probe_cap, branch_cap); when it
  // comes back undecided, or when the cumulative work (candidates plus
  // filter choice points) passes work_cap, the engine switches to exact
  // evaluation over the chase. If the chase does not terminate the budgets
  // are abandoned and filtering proceeds under branch_cap alone, so
  // results and errors match the unstaged semantics. 0 disables a budget.
  uint64_t probe_cap = 25'000;
  uint64_t work_cap = 25'000;
};

// Rewrites the query's constants and the candidate's images to equality
// representatives.
std::pair<CQ, Substitution> canonicalize(const CQ& q, const Substitution& tau,
                                         const FactStore& st);

// Streams every substitution τ: vars(q) → terms with τ(q) ⊆ store, in a
// deterministic order (backtracking join, ascending term ids).
class CandidateStream {
 public:
  CandidateStream(const CQ& q, const FactStore& st);
  ~CandidateStream();
  CandidateStream(CandidateStream&&) noexcept;
  bool next(Substitution& tau);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

AnswerSet certain_answers(const FactStore& st, const CQ& q,
                          const AnswerOptions& opt = {});

// Convenience overload: validates, translates, and materializes first.
AnswerSet certain_answers(const KB& kb, const CQ& q,
                          const AnswerOptions& opt = {});

}  // namespace elq
