#include "elq/store.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace elq {

namespace {
inline uint64_t pkey(uint32_t a, uint32_t b) {
  return ((uint64_t)a << 32) | b;
}
const std::vector<IndId> kEmptyList;
}  // namespace

TermOrder::TermOrder(const Symbols& sym, IndId first_aux,
                     const std::vector<AuxIndividual>& aux) {
  uint32_t n = sym.n_individuals();
  std::unordered_map<IndId, std::pair<std::string, std::string>> akey;
  for (const AuxIndividual& a : aux)
    akey[a.ind] = {sym.role_name(a.role), sym.concept_name(a.filler)};
  std::vector<IndId> ids(n);
  for (uint32_t i = 0; i < n; ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [&](IndId x, IndId y) {
    bool ax = x >= first_aux, ay = y >= first_aux;
    if (ax != ay) return ay;  // named < aux
    if (!ax) return sym.individual_name(x) < sym.individual_name(y);
    return akey.at(x) < akey.at(y);
  });
  rank_.assign(n, 0);
  for (uint32_t i = 0; i < n; ++i) rank_[ids[i]] = i;
}

const std::vector<IndId>& FactStore::eq_named(IndId u) const {
  if (u < eq_named_.size() && !eq_named_[u].empty()) return eq_named_[u];
  return kEmptyList;
}

bool FactStore::holds_concept(ConceptId c, IndId u) const {
  if (c >= n_concepts_ || u >= n_terms_) return false;
  return concept_bit_[c][rep_[u]] != 0;
}

bool FactStore::holds_role(RoleId r, IndId s, IndId t) const {
  if (r >= n_roles_ || s >= n_terms_ || t >= n_terms_) return false;
  const std::vector<IndId>& out = succ_[r][rep_[s]];
  return std::binary_search(out.begin(), out.end(), rep_[t]);
}

bool FactStore::holds_dir(RoleId r, IndId s, IndId t) const {
  if (r >= n_roles_ || s >= n_terms_ || t >= n_terms_) return false;
  const std::vector<IndId>& out = dsucc_[r][rep_[s]];
  return std::binary_search(out.begin(), out.end(), rep_[t]);
}

bool FactStore::holds_self(RoleId r, IndId u) const {
  if (r >= n_roles_ || u >= n_terms_) return false;
  return self_bit_[r][rep_[u]] != 0;
}

bool FactStore::holds_ind(IndId u) const {
  return u < n_terms_ && ind_bit_[rep_[u]] != 0;
}

bool FactStore::holds(const RAtom& g) const {
  switch (g.pred) {
    case Pred::Concept:
      return holds_concept(g.p, g.a.id);
    case Pred::Role:
      return holds_role(g.p, g.a.id, g.b.id);
    case Pred::Dir:
      return holds_dir(g.p, g.a.id, g.b.id);
    case Pred::Self:
      return holds_self(g.p, g.a.id);
    case Pred::Ind:
      return holds_ind(g.a.id);
    case Pred::Eq:
      return rep(g.a.id) == rep(g.b.id);
  }
  return false;
}

const std::vector<IndId>& FactStore::concept_extent(ConceptId c) const {
  return c < n_concepts_ ? concept_ext_[c] : kEmptyList;
}
const std::vector<IndId>& FactStore::self_extent(RoleId r) const {
  return r < n_roles_ ? self_ext_[r] : kEmptyList;
}
const std::vector<IndId>& FactStore::succ(RoleId r, IndId u) const {
  return (r < n_roles_ && u < n_terms_) ? succ_[r][u] : kEmptyList;
}
const std::vector<IndId>& FactStore::pred(RoleId r, IndId u) const {
  return (r < n_roles_ && u < n_terms_) ? pred_[r][u] : kEmptyList;
}
const std::vector<IndId>& FactStore::dir_succ(RoleId r, IndId u) const {
  return (r < n_roles_ && u < n_terms_) ? dsucc_[r][u] : kEmptyList;
}

std::vector<std::pair<RoleId, IndId>> FactStore::direct_successors(
    IndId u) const {
  std::vector<std::pair<RoleId, IndId>> out;
  if (u >= n_terms_) return out;
  IndId s = rep_[u];
  for (RoleId r = 0; r < n_roles_; ++r)
    for (IndId v : dsucc_[r][s])
      if (aux_idx_[v] != kNone) out.push_back({r, v});
  return out;
}

uint32_t FactStore::aux_index(IndId u) const {
  return u < n_terms_ ? aux_idx_[rep_[u]] : kNone;
}

bool FactStore::aux_reachable(IndId u, IndId v) const {
  if (u >= n_terms_ || v >= n_terms_) return false;
  uint32_t i = aux_idx_[rep_[v]];
  if (i == kNone) return false;
  const uint64_t* row = reach_.data() + (size_t)rep_[u] * reach_words_;
  return (row[i >> 6] >> (i & 63)) & 1;
}

const std::vector<IndId>& FactStore::named_sources(uint32_t aux_idx) const {
  return aux_idx < named_sources_.size() ? named_sources_[aux_idx]
                                         : kEmptyList;
}

bool is_unsatisfiable(const FactStore& store) { return store.unsat(); }

// ---------------------------------------------------------------------------
// Materializer: specialized semi-naive evaluation with rewrite-on-merge.

class Materializer {
 public:
  Materializer(const DatalogProgram& d, const MaterializeOptions& opt)
      : d_(d), opt_(opt) {}

  std::pair<FactStore, MaterializeStats> run() {
    auto t0 = std::chrono::steady_clock::now();
    init();
    for (const RAtom& f : d_.facts) add_ground(f);
    while (!queue_.empty() && !unsat_) {
      WItem it = queue_.front();
      queue_.pop_front();
      ++stats_.iterations;
      process(it);
    }
    FactStore st = finalize();
    stats_.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return {std::move(st), stats_};
  }

 private:
  enum HK : uint8_t {
    kToConcept,   // on A(x): B(x)
    kMergeWith,   // on A(x): x ≈ a
    kConjOther,   // on A(x): if A2(x) then B(x)
    kExistFiller, // on A1(y): for R-predecessors x of y: B(x)
    kSelfGen,     // on A(x): R(x,x), Self_R(x)
    kExist7,      // on A1(x): R(x,o), dir_R(x,o), A(o)
    kRoleTo,      // on S(x,y): R(x,y)
    kRange,       // on R(x,y): B(y)
    kExistRole,   // on R(x,y): if A1(y) then B(x)
    kTransRule,   // on R(x,y): compose with R-neighbors
    kTopPair,     // on R(x,y): Top(x), Top(y)
    kSelfClose,   // on R(x,x): if ind(x) then Self_R(x)
    kSelfTo,      // on Self_S(x): Self_R(x)
    kSelfHead,    // on Self_R(x): B(x)
    kDirTo,       // on dir_S(x,y): dir_R(x,y)
  };
  struct CH {
    HK k;
    uint32_t a = 0, b = 0, c = 0;
  };
  struct WItem {
    Pred pred;
    uint32_t p, a, b;
  };

  void init() {
    nt_ = d_.sym.n_individuals();
    nc_ = d_.sym.n_concepts();
    nr_ = d_.sym.n_roles();
    order_ = TermOrder(d_.sym, d_.first_aux, d_.aux_individuals);
    parent_.resize(nt_);
    for (uint32_t i = 0; i < nt_; ++i) parent_[i] = i;
    cbit_.assign(nc_, std::vector<uint8_t>(nt_, 0));
    selfbit_.assign(nr_, std::vector<uint8_t>(nt_, 0));
    indbit_.assign(nt_, 0);
    rset_.resize(nr_);
    dset_.resize(nr_);
    succ_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    pred_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    dsucc_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    dpred_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    on_concept_.assign(nc_, {});
    on_role_.assign(nr_, {});
    on_self_.assign(nr_, {});
    on_dir_.assign(nr_, {});
    for (const Rule& r : d_.rules) compile(r);
  }

  [[noreturn]] void bad_rule() {
    throw std::logic_error("materialize: unsupported rule shape");
  }

  void compile(const Rule& r) {
    const auto& b = r.body;
    const auto& h = r.head;
    if (r.exist) bad_rule();  // D_K is a datalog program
    if (b.size() == 1 && b[0].pred == Pred::Concept) {
      ConceptId trig = b[0].p;
      if (h.size() == 1 && h[0].pred == Pred::Concept)
        on_concept_[trig].push_back({kToConcept, h[0].p});
      else if (h.size() == 1 && h[0].pred == Pred::Eq)
        on_concept_[trig].push_back({kMergeWith, h[0].b.id});
      else if (h.size() == 2 && h[0].pred == Pred::Role &&
               h[1].pred == Pred::Self && h[0].a == h[0].b)
        on_concept_[trig].push_back({kSelfGen, h[0].p});
      else if (h.size() == 3 && h[0].pred == Pred::Role &&
               h[1].pred == Pred::Dir && h[2].pred == Pred::Concept &&
               h[0].b.tag == RTerm::Const)
        on_concept_[trig].push_back({kExist7, h[0].p, h[0].b.id, h[2].p});
      else
        bad_rule();
      return;
    }
    if (b.size() == 1 && b[0].pred == Pred::Role) {
      RoleId trig = b[0].p;
      if (h.size() == 1 && h[0].pred == Pred::Role)
        on_role_[trig].push_back({kRoleTo, h[0].p});
      else if (h.size() == 1 && h[0].pred == Pred::Concept &&
               h[0].a == b[0].b)
        on_role_[trig].push_back({kRange, h[0].p});
      else if (h.size() == 2 && h[0].pred == Pred::Concept &&
               h[1].pred == Pred::Concept)
        on_role_[trig].push_back({kTopPair, h[0].p});
      else
        bad_rule();
      return;
    }
    if (b.size() == 1 && b[0].pred == Pred::Self) {
      if (h.size() == 1 && h[0].pred == Pred::Self)
        on_self_[b[0].p].push_back({kSelfTo, h[0].p});
      else if (h.size() == 1 && h[0].pred == Pred::Concept)
        on_self_[b[0].p].push_back({kSelfHead, h[0].p});
      else
        bad_rule();
      return;
    }
    if (b.size() == 1 && b[0].pred == Pred::Dir) {
      if (h.size() == 1 && h[0].pred == Pred::Dir)
        on_dir_[b[0].p].push_back({kDirTo, h[0].p});
      else
        bad_rule();
      return;
    }
    if (b.size() == 2 && b[0].pred == Pred::Concept &&
        b[1].pred == Pred::Concept && h.size() == 1 &&
        h[0].pred == Pred::Concept) {
      on_concept_[b[0].p].push_back({kConjOther, b[1].p, h[0].p});
      if (b[1].p != b[0].p)
        on_concept_[b[1].p].push_back({kConjOther, b[0].p, h[0].p});
      return;
    }
    if (b.size() == 2 && b[0].pred == Pred::Role &&
        b[1].pred == Pred::Concept && h.size() == 1 &&
        h[0].pred == Pred::Concept) {
      // R(x,y) ∧ A1(y) → B(x)
      on_role_[b[0].p].push_back({kExistRole, b[1].p, h[0].p});
      on_concept_[b[1].p].push_back({kExistFiller, b[0].p, h[0].p});
      return;
    }
    if (b.size() == 2 && b[0].pred == Pred::Role && b[1].pred == Pred::Role &&
        b[0].p == b[1].p && h.size() == 1 && h[0].pred == Pred::Role) {
      on_role_[b[0].p].push_back({kTransRule});
      return;
    }
    if (b.size() == 2 && b[0].pred == Pred::Ind && b[1].pred == Pred::Role &&
        h.size() == 1 && h[0].pred == Pred::Self) {
      on_role_[b[1].p].push_back({kSelfClose});
      selfclose_roles_.push_back(b[1].p);
      return;
    }
    bad_rule();
  }

  IndId find(IndId u) {
    while (parent_[u] != u) {
      parent_[u] = parent_[parent_[u]];
      u = parent_[u];
    }
    return u;
  }

  void bump_count() {
    ++count_;
    ++stats_.derived;
    if (count_ > opt_.max_facts)
      throw ResourceLimitError("materialize: fact cap exceeded (" +
                               std::to_string(opt_.max_facts) + ")");
  }

  void add_concept(ConceptId c, IndId u) {
    u = find(u);
    if (cbit_[c][u]) return;
    cbit_[c][u] = 1;
    bump_count();
    if (c == Symbols::kBot) {
      unsat_ = true;
      return;
    }
    queue_.push_back({Pred::Concept, c, u, 0});
  }

  void add_role(RoleId r, IndId s, IndId t) {
    s = find(s);
    t = find(t);
    if (!rset_[r].insert(pkey(s, t)).second) return;
    succ_[r][s].push_back(t);
    pred_[r][t].push_back(s);
    bump_count();
    queue_.push_back({Pred::Role, r, s, t});
  }

  void add_dir(RoleId r, IndId s, IndId t) {
    s = find(s);
    t = find(t);
    if (!dset_[r].insert(pkey(s, t)).second) return;
    dsucc_[r][s].push_back(t);
    dpred_[r][t].push_back(s);
    bump_count();
    queue_.push_back({Pred::Dir, r, s, t});
  }

  void add_self(RoleId r, IndId u) {
    u = find(u);
    if (selfbit_[r][u]) return;
    selfbit_[r][u] = 1;
    bump_count();
    queue_.push_back({Pred::Self, r, u, 0});
  }

  void add_ind(IndId u) {
    u = find(u);
    if (indbit_[u]) return;
    indbit_[u] = 1;
    bump_count();
    queue_.push_back({Pred::Ind, 0, u, 0});
  }

  void add_ground(const RAtom& f) {
    switch (f.pred) {
      case Pred::Concept:
        add_concept(f.p, f.a.id);
        break;
      case Pred::Role:
        add_role(f.p, f.a.id, f.b.id);
        break;
      case Pred::Dir:
        add_dir(f.p, f.a.id, f.b.id);
        break;
      case Pred::Self:
        add_self(f.p, f.a.id);
        break;
      case Pred::Ind:
        add_ind(f.a.id);
        break;
      case Pred::Eq:
        merge(f.a.id, f.b.id);
        break;
    }
  }

  // Union the classes of x and y; the class minimum under TermOrder
  // survives, and every fact of the losing representative is rewritten.
  void merge(IndId x, IndId y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    IndId w = order_.min(x, y), l = (w == x) ? y : x;

    std::vector<ConceptId> cs;
    for (ConceptId c = 0; c < nc_; ++c)
      if (cbit_[c][l]) {
        cbit_[c][l] = 0;
        --count_;
        cs.push_back(c);
      }
    std::vector<RoleId> selfs;
    for (RoleId r = 0; r < nr_; ++r)
      if (selfbit_[r][l]) {
        selfbit_[r][l] = 0;
        --count_;
        selfs.push_back(r);
      }
    bool had_ind = indbit_[l];
    if (had_ind) {
      indbit_[l] = 0;
      --count_;
    }
    std::vector<std::pair<RoleId, IndId>> outs, ins, douts, dins;
    for (RoleId r = 0; r < nr_; ++r) {
      auto so = std::move(succ_[r][l]);
      succ_[r][l].clear();
      for (IndId v : so) {
        IndId v2 = find(v);
        if (rset_[r].erase(pkey(l, v2))) {
          --count_;
          outs.push_back({r, v2});
        }
      }
      auto si = std::move(pred_[r][l]);
      pred_[r][l].clear();
      for (IndId u : si) {
        IndId u2 = find(u);
        if (rset_[r].erase(pkey(u2, l))) {
          --count_;
          ins.push_back({r, u2});
        }
      }
      auto dso = std::move(dsucc_[r][l]);
      dsucc_[r][l].clear();
      for (IndId v : dso) {
        IndId v2 = find(v);
        if (dset_[r].erase(pkey(l, v2))) {
          --count_;
          douts.push_back({r, v2});
        }
      }
      auto dsi = std::move(dpred_[r][l]);
      dpred_[r][l].clear();
      for (IndId u : dsi) {
        IndId u2 = find(u);
        if (dset_[r].erase(pkey(u2, l))) {
          --count_;
          dins.push_back({r, u2});
        }
      }
    }

    parent_[l] = w;
    ++stats_.merges;

    for (ConceptId c : cs) add_concept(c, w);
    for (RoleId r : selfs) add_self(r, w);
    if (had_ind) add_ind(w);
    for (auto& [r, v] : outs) add_role(r, w, v);
    for (auto& [r, u] : ins) add_role(r, u, w);
    for (auto& [r, v] : douts) add_dir(r, w, v);
    for (auto& [r, u] : dins) add_dir(r, u, w);
  }

  void process(const WItem& it) {
    switch (it.pred) {
      case Pred::Concept: {
        IndId u = find(it.a);
        if (u != it.a || !cbit_[it.p][u]) return;  // stale: rewritten copy queued
        for (const CH& h : on_concept_[it.p]) {
          switch (h.k) {
            case kToConcept:
              add_concept(h.a, u);
              break;
            case kMergeWith:
              merge(u, h.a);
              break;
            case kConjOther:
              if (cbit_[h.a][u]) add_concept(h.b, u);
              break;
            case kExistFiller: {
              std::vector<IndId> preds = pred_[h.a][u];
              for (IndId x : preds) {
                IndId x2 = find(x);
                if (rset_[h.a].count(pkey(x2, u))) add_concept(h.b, x2);
              }
              break;
            }
            case kSelfGen:
              add_role(h.a, u, u);
              add_self(h.a, u);
              break;
            case kExist7: {
              IndId o = find(h.b);
              add_role(h.a, u, o);
              add_dir(h.a, u, o);
              add_concept(h.c, o);
              break;
            }
            default:
              break;
          }
          if (unsat_) return;
          if (find(it.a) != it.a) return;  // u was merged away mid-processing
          u = it.a;
        }
        break;
      }
      case Pred::Role: {
        IndId s = find(it.a), t = find(it.b);
        if (s != it.a || t != it.b || !rset_[it.p].count(pkey(s, t))) return;
        for (const CH& h : on_role_[it.p]) {
          switch (h.k) {
            case kRoleTo:
              add_role(h.a, s, t);
              break;
            case kRange:
              add_concept(h.a, t);
              break;
            case kExistRole:
              if (cbit_[h.a][t]) add_concept(h.b, s);
              break;
            case kTransRule: {
              std::vector<IndId> nexts = succ_[it.p][t];
              for (IndId w : nexts) {
                IndId w2 = find(w);
                if (rset_[it.p].count(pkey(t, w2))) add_role(it.p, s, w2);
              }
              std::vector<IndId> prevs = pred_[it.p][s];
              for (IndId u : prevs) {
                IndId u2 = find(u);
                if (rset_[it.p].count(pkey(u2, s))) add_role(it.p, u2, t);
              }
              break;
            }
            case kTopPair:
              add_concept(Symbols::kTop, s);
              add_concept(Symbols::kTop, t);
              break;
            case kSelfClose:
              if (s == t && indbit_[s]) add_self(it.p, s);
              break;
            default:
              break;
          }
          if (unsat_) return;
          if (find(it.a) != it.a || find(it.b) != it.b) return;
          s = it.a;
          t = it.b;
        }
        break;
      }
      case Pred::Self: {
        IndId u = find(it.a);
        if (u != it.a || !selfbit_[it.p][u]) return;
        for (const CH& h : on_self_[it.p]) {
          if (h.k == kSelfTo) add_self(h.a, u);
          else if (h.k == kSelfHead) add_concept(h.a, u);
          if (unsat_) return;
          if (find(it.a) != it.a) return;
        }
        break;
      }
      case Pred::Dir: {
        IndId s = find(it.a), t = find(it.b);
        if (s != it.a || t != it.b || !dset_[it.p].count(pkey(s, t))) return;
        for (const CH& h : on_dir_[it.p])
          if (h.k == kDirTo) add_dir(h.a, s, t);
        break;
      }
      case Pred::Ind: {
        IndId u = find(it.a);
        if (u != it.a || !indbit_[u]) return;
        for (RoleId r : selfclose_roles_)
          if (rset_[r].count(pkey(u, u))) add_self(r, u);
        break;
      }
      case Pred::Eq:
        break;
    }
  }

  FactStore finalize() {
    FactStore st;
    st.unsat_ = unsat_;
    st.n_terms_ = nt_;
    st.n_concepts_ = nc_;
    st.n_roles_ = nr_;
    st.first_aux_ = d_.first_aux;
    st.fact_count_ = count_;
    st.sym_ = d_.sym;
    st.hier_ = d_.hier;
    st.has_trans_ = d_.has_trans;
    st.has_refl_ = d_.has_refl;
    st.has_self_axioms_ = d_.has_self_axioms;

    st.rep_.resize(nt_);
    for (uint32_t u = 0; u < nt_; ++u) st.rep_[u] = find(u);
    st.eq_named_.assign(nt_, {});
    for (uint32_t u = 0; u < d_.first_aux; ++u)
      st.eq_named_[st.rep_[u]].push_back(u);

    for (uint32_t u = 0; u < nt_; ++u) {
      if (st.rep_[u] != u) continue;
      if (u < d_.first_aux)
        st.named_reps_.push_back(u);
      else
        st.aux_reps_.push_back(u);
    }

    st.concept_bit_ = std::move(cbit_);
    st.self_bit_ = std::move(selfbit_);
    st.ind_bit_ = std::move(indbit_);
    st.concept_ext_.assign(nc_, {});
    for (ConceptId c = 0; c < nc_; ++c)
      for (uint32_t u = 0; u < nt_; ++u)
        if (st.concept_bit_[c][u]) st.concept_ext_[c].push_back(u);
    st.self_ext_.assign(nr_, {});
    for (RoleId r = 0; r < nr_; ++r)
      for (uint32_t u = 0; u < nt_; ++u)
        if (st.self_bit_[r][u]) st.self_ext_[r].push_back(u);
    for (uint32_t u = 0; u < nt_; ++u)
      if (st.ind_bit_[u]) st.ind_list_.push_back(u);

    st.succ_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    st.pred_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    st.dsucc_.assign(nr_, std::vector<std::vector<IndId>>(nt_));
    for (RoleId r = 0; r < nr_; ++r) {
      for (uint64_t k : rset_[r]) {
        IndId s = (IndId)(k >> 32), t = (IndId)k;
        st.succ_[r][s].push_back(t);
        st.pred_[r][t].push_back(s);
      }
      for (uint64_t k : dset_[r]) {
        IndId s = (IndId)(k >> 32), t = (IndId)k;
        st.dsucc_[r][s].push_back(t);
      }
      for (uint32_t u = 0; u < nt_; ++u) {
        std::sort(st.succ_[r][u].begin(), st.succ_[r][u].end());
        std::sort(st.pred_[r][u].begin(), st.pred_[r][u].end());
        std::sort(st.dsucc_[r][u].begin(), st.dsucc_[r][u].end());
      }
    }

    // aux index and aux-reachability bitsets over the dir graph
    st.aux_idx_.assign(nt_, kNone);
    st.n_aux_reps_ = (uint32_t)st.aux_reps_.size();
    for (uint32_t i = 0; i < st.n_aux_reps_; ++i)
      st.aux_idx_[st.aux_reps_[i]] = i;
    st.reach_words_ = (st.n_aux_reps_ + 63) / 64;
    st.reach_.assign((size_t)nt_ * st.reach_words_, 0);
    if (st.n_aux_reps_ > 0) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (uint32_t u = 0; u < nt_; ++u) {
          if (st.rep_[u] != u) continue;
          uint64_t* row = st.reach_.data() + (size_t)u * st.reach_words_;
          for (RoleId r = 0; r < nr_; ++r)
            for (IndId v : st.dsucc_[r][u]) {
              uint32_t i = st.aux_idx_[v];
              if (i == kNone) continue;
              const uint64_t* vrow =
                  st.reach_.data() + (size_t)v * st.reach_words_;
              for (uint32_t w = 0; w < st.reach_words_; ++w) {
                uint64_t nv = row[w] | vrow[w];
                if (w == (i >> 6)) nv |= 1ull << (i & 63);
                if (nv != row[w]) {
                  row[w] = nv;
                  changed = true;
                }
              }
            }
        }
      }
    }

    st.order_ = order_;
    st.named_by_order_ = st.named_reps_;
    std::sort(st.named_by_order_.begin(), st.named_by_order_.end(),
              [&](IndId a, IndId b) { return order_.less(a, b); });
    st.named_sources_.assign(st.n_aux_reps_, {});
    for (IndId u : st.named_by_order_) {
      const uint64_t* row = st.reach_.data() + (size_t)u * st.reach_words_;
      for (uint32_t i = 0; i < st.n_aux_reps_; ++i)
        if ((row[i >> 6] >> (i & 63)) & 1) st.named_sources_[i].push_back(u);
    }
    return st;
  }

  const DatalogProgram& d_;
  MaterializeOptions opt_;
  uint32_t nt_ = 0, nc_ = 0, nr_ = 0;
  TermOrder order_;
  std::vector<IndId> parent_;
  std::vector<std::vector<uint8_t>> cbit_, selfbit_;
  std::vector<uint8_t> indbit_;
  std::vector<std::unordered_set<uint64_t>> rset_, dset_;
  std::vector<std::vector<std::vector<IndId>>> succ_, pred_, dsucc_, dpred_;
  std::vector<std::vector<CH>> on_concept_, on_role_, on_self_, on_dir_;
  std::vector<RoleId> selfclose_roles_;
  std::deque<WItem> queue_;
  uint64_t count_ = 0;
  bool unsat_ = false;
  MaterializeStats stats_;
};

std::pair<FactStore, MaterializeStats> materialize(
    const DatalogProgram& program, const MaterializeOptions& opt) {
  return Materializer(program, opt).run();
}

// ---------------------------------------------------------------------------
// Generic one-round closure check (independent of the compiled engine).

namespace {

// Enumerates all bindings of `body` (vars 0..2) against the store and
// calls `out(bind)`; all enumerated terms are representatives.
template <typename F>
void match_body(const FactStore& st, const std::vector<RAtom>& body,
                size_t i, std::array<IndId, 3>& bind, F&& out) {
  if (i == body.size()) {
    out(bind);
    return;
  }
  const RAtom& a = body[i];
  auto with = [&](uint32_t var, IndId val, auto&& k) {
    IndId saved = bind[var];
    if (saved != kNone) {
      if (saved == val) k();
    } else {
      bind[var] = val;
      k();
      bind[var] = saved;
    }
  };
  auto rec = [&] { match_body(st, body, i + 1, bind, out); };
  auto term_val = [&](const RTerm& t) -> IndId {
    return t.tag == RTerm::Const ? st.rep(t.id) : bind[t.id];
  };
  switch (a.pred) {
    case Pred::Concept: {
      IndId v = term_val(a.a);
      if (v != kNone) {
        if (st.holds_concept(a.p, v)) rec();
      } else {
        for (IndId u : st.concept_extent(a.p)) with(a.a.id, u, rec);
      }
      break;
    }
    case Pred::Self: {
      IndId v = term_val(a.a);
      if (v != kNone) {
        if (st.holds_self(a.p, v)) rec();
      } else {
        for (IndId u : st.self_extent(a.p)) with(a.a.id, u, rec);
      }
      break;
    }
    case Pred::Ind: {
      IndId v = term_val(a.a);
      if (v != kNone) {
        if (st.holds_ind(v)) rec();
      } else {
        for (IndId u : st.ind_extent()) with(a.a.id, u, rec);
      }
      break;
    }
    case Pred::Role:
    case Pred::Dir: {
      bool dir = a.pred == Pred::Dir;
      IndId s = term_val(a.a), t = term_val(a.b);
      auto lookup = [&](IndId x, IndId y) {
        return dir ? st.holds_dir(a.p, x, y) : st.holds_role(a.p, x, y);
      };
      if (s != kNone && t != kNone) {
        if (lookup(s, t)) rec();
      } else if (s != kNone) {
        const auto& out_list = dir ? st.dir_succ(a.p, s) : st.succ(a.p, s);
        for (IndId v : out_list) {
          if (a.a.tag == RTerm::Var && a.b.tag == RTerm::Var &&
              a.a.id == a.b.id && v != s)
            continue;
          with(a.b.id, v, rec);
        }
      } else if (t != kNone) {
        if (dir) {
          for (IndId u = 0; u < st.n_terms(); ++u)
            if (st.rep(u) == u && st.holds_dir(a.p, u, t)) with(a.a.id, u, rec);
        } else {
          for (IndId u : st.pred(a.p, t)) with(a.a.id, u, rec);
        }
      } else {
        for (IndId u = 0; u < st.n_terms(); ++u) {
          if (st.rep(u) != u) continue;
          const auto& out_list = dir ? st.dir_succ(a.p, u) : st.succ(a.p, u);
          for (IndId v : out_list) {
            if (a.a.id == a.b.id && a.b.tag == RTerm::Var && v != u) continue;
            IndId saved = bind[a.a.id];
            bool ok = saved == kNone || saved == u;
            if (!ok) continue;
            bind[a.a.id] = u;
            with(a.b.id, v, rec);
            bind[a.a.id] = saved;
          }
        }
      }
      break;
    }
    case Pred::Eq:
      break;  // equalities never occur in bodies
  }
}

}  // namespace

bool verify_fixpoint(const FactStore& st, const DatalogProgram& program) {
  if (st.unsat()) return true;  // saturation is not claimed for unsat stores
  auto ground = [&](const RTerm& t, const std::array<IndId, 3>& bind) {
    return t.tag == RTerm::Const ? st.rep(t.id) : bind[t.id];
  };
  for (const Rule& r : program.rules) {
    bool closed = true;
    std::array<IndId, 3> bind{kNone, kNone, kNone};
    match_body(st, r.body, 0, bind, [&](const std::array<IndId, 3>& b) {
      if (!closed) return;
      for (const RAtom& h : r.head) {
        bool ok = true;
        switch (h.pred) {
          case Pred::Concept:
            ok = st.holds_concept(h.p, ground(h.a, b));
            break;
          case Pred::Role:
            ok = st.holds_role(h.p, ground(h.a, b), ground(h.b, b));
            break;
          case Pred::Dir:
            ok = st.holds_dir(h.p, ground(h.a, b), ground(h.b, b));
            break;
          case Pred::Self:
            ok = st.holds_self(h.p, ground(h.a, b));
            break;
          case Pred::Ind:
            ok = st.holds_ind(ground(h.a, b));
            break;
          case Pred::Eq:
            ok = st.rep(ground(h.a, b)) == st.rep(ground(h.b, b));
            break;
        }
        if (!ok) {
          closed = false;
          return;
        }
      }
    });
    if (!closed) return false;
  }
  for (const RAtom& f : program.facts)
    if (!st.holds(f)) return false;
  return true;
}

}  // namespace elq
