// Candidate enumeration (streaming backtracking join) and certain-answer
// computation: every candidate is pushed through the soundness filter and
// accepted representative tuples are expanded to their equality classes.

#include "elq/answer.h"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>

#include "elq/filter.h"
#include "elq/rules.h"

namespace elq {

std::pair<CQ, Substitution> canonicalize(const CQ& q, const Substitution& tau,
                                         const FactStore& st) {
  CQ q2 = q;
  for (QAtom& a : q2.atoms) {
    if (!a.t0.is_var) a.t0.id = st.rep(a.t0.id);
    if (a.binary && !a.t1.is_var) a.t1.id = st.rep(a.t1.id);
  }
  Substitution t2 = tau;
  for (IndId& u : t2)
    if (u != kNone) u = st.rep(u);
  return {q2, t2};
}

namespace {

// generator kinds for one join level
enum GKind : uint8_t { kAll, kConcept, kSucc, kPred };

struct Gen {
  GKind kind = kAll;
  ConceptId c = kNone;
  RoleId r = kNone;
  QTerm other;  // bound side for kSucc/kPred
};

}  // namespace

struct CandidateStream::Impl {
  CQ q;
  const FactStore& st;
  uint32_t n;

  std::vector<IndId> all_reps;          // named then aux, ascending ids
  std::vector<uint32_t> order;          // level -> var
  std::vector<Gen> gen;                 // per level
  std::vector<std::vector<uint32_t>> checks;  // per level: atom indices
  bool ground_ok = true;

  Substitution tau;
  std::vector<const std::vector<IndId>*> list;
  std::vector<size_t> pos;
  int lvl = -1;       // deepest initialized level; -1 before first next()
  bool finished = false;

  Impl(const CQ& query, const FactStore& store) : q(query), st(store) {
    n = q.n_vars();
    all_reps = st.named_reps();
    all_reps.insert(all_reps.end(), st.aux_reps().begin(),
                    st.aux_reps().end());
    tau.assign(n, kNone);
    list.assign(n, nullptr);
    pos.assign(n, 0);

    // ground atoms must hold outright
    for (const QAtom& a : q.atoms) {
      bool has_var = a.t0.is_var || (a.binary && a.t1.is_var);
      if (has_var) continue;
      ground_ok &= a.binary ? st.holds_role(a.r, st.rep(a.t0.id),
                                            st.rep(a.t1.id))
                            : st.holds_concept(a.c, st.rep(a.t0.id));
    }

    plan();
  }

  // static estimate of a variable's cheapest generator, ignoring bound vars
  uint64_t solo_estimate(uint32_t v, Gen& g) const {
    uint64_t best = all_reps.size();
    g = Gen{};
    for (const QAtom& a : q.atoms) {
      if (!a.binary) {
        if (a.t0.is_var && a.t0.id == v &&
            st.concept_extent(a.c).size() < best) {
          best = st.concept_extent(a.c).size();
          g = Gen{kConcept, a.c, kNone, {}};
        }
        continue;
      }
      if (a.t0.is_var && a.t0.id == v && !a.t1.is_var) {
        const auto& l = st.pred(a.r, st.rep(a.t1.id));
        if (l.size() < best) {
          best = l.size();
          g = Gen{kPred, kNone, a.r, a.t1};
        }
      }
      if (a.t1.is_var && a.t1.id == v && !a.t0.is_var) {
        const auto& l = st.succ(a.r, st.rep(a.t0.id));
        if (l.size() < best) {
          best = l.size();
          g = Gen{kSucc, kNone, a.r, a.t0};
        }
      }
    }
    return best;
  }

  void plan() {
    std::vector<uint8_t> placed(n, 0);
    std::vector<uint8_t> bound_adj(n, 0);  // var touches a bound var
    order.reserve(n);
    gen.resize(n);
    for (uint32_t k = 0; k < n; ++k) {
      uint32_t best_v = kNone;
      uint64_t best_est = UINT64_MAX;
      int best_adj = -1;
      Gen best_gen;
      for (uint32_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        Gen g;
        uint64_t est = solo_estimate(v, g);
        int adj = bound_adj[v];
        // an adjacency generator through a bound neighbour is usually the
        // narrowest list; prefer adjacency, then the static estimate
        if (adj > best_adj ||
            (adj == best_adj &&
             (est < best_est || (est == best_est && v < best_v)))) {
          best_v = v;
          best_est = est;
          best_adj = adj;
          best_gen = g;
        }
      }
      // if a bound neighbour exists, generate from the adjacency list
      if (bound_adj[best_v]) {
        for (const QAtom& a : q.atoms) {
          if (!a.binary) continue;
          if (a.t0.is_var && a.t0.id == best_v && a.t1.is_var &&
              placed[a.t1.id] && a.t1.id != best_v) {
            best_gen = Gen{kPred, kNone, a.r, a.t1};
            break;
          }
          if (a.t1.is_var && a.t1.id == best_v && a.t0.is_var &&
              placed[a.t0.id] && a.t0.id != best_v) {
            best_gen = Gen{kSucc, kNone, a.r, a.t0};
            break;
          }
        }
      }
      order.push_back(best_v);
      gen[k] = best_gen;
      placed[best_v] = 1;
      for (const QAtom& a : q.atoms) {
        if (!a.binary || !a.t0.is_var || !a.t1.is_var) continue;
        if (a.t0.id == best_v && !placed[a.t1.id]) bound_adj[a.t1.id] = 1;
        if (a.t1.id == best_v && !placed[a.t0.id]) bound_adj[a.t0.id] = 1;
      }
    }
    // per level, the atoms that become fully bound there
    checks.resize(n);
    std::vector<uint32_t> level_of(n, 0);
    for (uint32_t k = 0; k < n; ++k) level_of[order[k]] = k;
    for (uint32_t ai = 0; ai < q.atoms.size(); ++ai) {
      const QAtom& a = q.atoms[ai];
      uint32_t last = kNone;
      if (a.t0.is_var) last = level_of[a.t0.id];
      if (a.binary && a.t1.is_var) {
        uint32_t l1 = level_of[a.t1.id];
        last = (last == kNone || l1 > last) ? l1 : last;
      }
      if (last != kNone) checks[last].push_back(ai);
    }
  }

  IndId value(const QTerm& t) const {
    return t.is_var ? tau[t.id] : st.rep(t.id);
  }

  bool check_level(uint32_t k) const {
    for (uint32_t ai : checks[k]) {
      const QAtom& a = q.atoms[ai];
      bool ok = a.binary ? st.holds_role(a.r, value(a.t0), value(a.t1))
                         : st.holds_concept(a.c, value(a.t0));
      if (!ok) return false;
    }
    return true;
  }

  void enter(uint32_t k) {
    switch (gen[k].kind) {
      case kAll:
        list[k] = &all_reps;
        break;
      case kConcept:
        list[k] = &st.concept_extent(gen[k].c);
        break;
      case kSucc:
        list[k] = &st.succ(gen[k].r, value(gen[k].other));
        break;
      case kPred:
        list[k] = &st.pred(gen[k].r, value(gen[k].other));
        break;
    }
    pos[k] = 0;
  }

  bool next(Substitution& out) {
    if (finished || !ground_ok || st.unsat()) {
      finished = true;
      return false;
    }
    if (n == 0) {  // Boolean query: a single empty candidate
      finished = true;
      out.clear();
      return true;
    }
    if (lvl < 0) {
      lvl = 0;
      enter(0);
    } else {
      ++pos[lvl];  // resume after the last yielded tuple
    }
    while (true) {
      bool advanced = false;
      while (pos[lvl] < list[lvl]->size()) {
        IndId u = (*list[lvl])[pos[lvl]];
        tau[order[lvl]] = u;
        if (check_level(lvl)) {
          advanced = true;
          break;
        }
        ++pos[lvl];
      }
      if (!advanced) {
        if (lvl == 0) {
          finished = true;
          return false;
        }
        --lvl;
        ++pos[lvl];
        continue;
      }
      if ((uint32_t)lvl + 1 == n) {
        out = tau;
        return true;
      }
      ++lvl;
      enter(lvl);
    }
  }
};

CandidateStream::CandidateStream(const CQ& q, const FactStore& st)
    : impl_(std::make_unique<Impl>(q, st)) {}
CandidateStream::~CandidateStream() = default;
CandidateStream::CandidateStream(CandidateStream&&) noexcept = default;

bool CandidateStream::next(Substitution& tau) { return impl_->next(tau); }

namespace {

void expand_tuple(const FactStore& st, const std::vector<IndId>& reps,
                  std::vector<std::vector<IndId>>& out) {
  std::vector<IndId> cur(reps.size());
  std::vector<size_t> idx(reps.size(), 0);
  if (reps.empty()) {
    out.push_back({});
    return;
  }
  size_t k = 0;
  while (true) {
    if (k == reps.size()) {
      out.push_back(cur);
      --k;
      ++idx[k];
    }
    const auto& cls = st.eq_named(reps[k]);
    if (idx[k] == cls.size()) {
      idx[k] = 0;
      if (k == 0) return;
      --k;
      ++idx[k];
      continue;
    }
    cur[k] = cls[idx[k]];
    ++k;
    if (k < reps.size()) idx[k] = 0;
  }
}

}  // namespace

AnswerSet certain_answers(const FactStore& st, const CQ& q,
                          const AnswerOptions& opt) {
  AnswerSet res;
  if (st.unsat()) {
    res.unsatisfiable = true;
    return res;
  }

  FilterOptions fopt;
  fopt.branch_cap = opt.branch_cap;
  fopt.enable_fast_path = opt.enable_fast_path;

  std::set<std::vector<IndId>> accepted;
  const bool boolean = q.answer_vars.empty();

  auto project = [&](const Substitution& tau, std::vector<IndId>& proj) {
    proj.clear();
    bool aux = false;
    for (VarId v : q.answer_vars) {
      IndId u = st.rep(tau[v]);
      aux |= st.is_aux_id(u);
      proj.push_back(u);
    }
    return !aux;  // tuples over named representatives only
  };

  auto filter_one = [&](const Substitution& tau, SearchStats& s) {
    auto t0 = std::chrono::steady_clock::now();
    FilterOutcome oc = is_sound(q, st, tau, fopt);
    s.filter_ms_total +=
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    s.choices += oc.choices;
    s.fast_path_hits += oc.fast_path ? 1 : 0;
    if (oc.verdict == Verdict::Indeterminate)
      throw ResourceLimitError(
          "soundness search exceeded the branch cap; raise --branch-cap");
    if (oc.verdict == Verdict::Unsound) ++s.unsound;
    return oc.verdict == Verdict::Sound;
  };

  CandidateStream cs(q, st);
  Substitution tau;

  if (opt.exhaustive && opt.jobs > 1) {
    std::mutex mstream, mout;
    std::exception_ptr err;
    auto worker = [&]() {
      SearchStats local;
      std::set<std::vector<IndId>> acc;
      Substitution t;
      std::vector<IndId> proj;
      try {
        while (true) {
          {
            std::lock_guard<std::mutex> g(mstream);
            if (err || !cs.next(t)) break;
          }
          ++local.candidates;
          if (!project(t, proj)) continue;
          if (filter_one(t, local)) acc.insert(proj);
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(mout);
        if (!err) err = std::current_exception();
      }
      std::lock_guard<std::mutex> g(mout);
      res.stats.candidates += local.candidates;
      res.stats.unsound += local.unsound;
      res.stats.fast_path_hits += local.fast_path_hits;
      res.stats.choices += local.choices;
      res.stats.filter_ms_total += local.filter_ms_total;
      accepted.insert(acc.begin(), acc.end());
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < opt.jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  } else {
    std::vector<IndId> proj;
    while (cs.next(tau)) {
      ++res.stats.candidates;
      if (!project(tau, proj)) continue;
      if (!opt.exhaustive && accepted.count(proj)) continue;  // π-memo
      if (filter_one(tau, res.stats)) {
        accepted.insert(proj);
        if (!opt.exhaustive && boolean) break;
      }
    }
  }

  for (const auto& reps : accepted) expand_tuple(st, reps, res.tuples);
  std::sort(res.tuples.begin(), res.tuples.end());
  res.tuples.erase(std::unique(res.tuples.begin(), res.tuples.end()),
                   res.tuples.end());
  return res;
}

AnswerSet certain_answers(const KB& kb, const CQ& q,
                          const AnswerOptions& opt) {
  DatalogProgram d = build_datalog(kb);
  auto [st, stats] = materialize(d);
  (void)stats;
  return certain_answers(st, q, opt);
}

}  // namespace elq
