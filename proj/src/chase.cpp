#include "elq/chase.h"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace elq {

namespace {

inline uint64_t pack(uint32_t a, uint32_t b) {
  return ((uint64_t)a << 32) | b;
}

// Runs the chase on a mutable working copy of the extents (hash sets),
// then freezes the result into sorted vectors.
class Chaser {
 public:
  Chaser(const RuleBase& xi, const Symbols& sym, const ChaseOptions& opt)
      : xi_(xi), sym_(sym), opt_(opt) {
    // Rank named individuals by name so the merge order is insensitive to
    // interning order.
    std::vector<IndId> by_name(sym.n_individuals());
    for (IndId i = 0; i < sym.n_individuals(); ++i) by_name[i] = i;
    std::sort(by_name.begin(), by_name.end(), [&](IndId a, IndId b) {
      return sym.individual_name(a) < sym.individual_name(b);
    });
    name_rank_.resize(sym.n_individuals());
    for (uint32_t k = 0; k < by_name.size(); ++k) name_rank_[by_name[k]] = k;

    named_term_.resize(sym.n_individuals());
    for (IndId i = 0; i < sym.n_individuals(); ++i) {
      named_term_[i] = (uint32_t)terms_.size();
      terms_.push_back({kNone, kNone, i, 0});
    }
    parent_.assign(terms_.size(), kNone);

    concept_.resize(sym.n_concepts());
    role_.resize(sym.n_roles());
    self_.resize(sym.n_roles());

    rule_fn_.assign(xi.rules.size(), kNone);
    for (size_t k = 0; k < xi.rules.size(); ++k)
      if (xi.rules[k].exist) rule_fn_[k] = skolem_of(xi.rules[k]);
  }

  ChaseInstance run() {
    for (const RAtom& f : xi_.facts) {
      std::array<uint32_t, 3> sig{kNone, kNone, kNone};
      insert_atom(f, sig);
      if (stop_) break;
    }
    bool changed = true;
    while (changed && !stop_) {
      changed = false;
      for (size_t k = 0; k < xi_.rules.size() && !stop_; ++k) {
        matches_.clear();
        enumerate(xi_.rules[k].body, 0, sig0_, matches_);
        for (const auto& sig : matches_) {
          if (apply(xi_.rules[k], rule_fn_[k], sig)) changed = true;
          if (stop_) break;
        }
      }
    }
    return freeze(!changed && !truncated_);
  }

 private:
  // --- terms ------------------------------------------------------------

  uint32_t intern_fn(uint32_t fn, uint32_t arg) {
    auto it = fn_intern_.find(pack(fn, arg));
    if (it != fn_intern_.end()) return it->second;
    uint32_t id = (uint32_t)terms_.size();
    terms_.push_back({fn, arg, kNone, terms_[arg].depth + 1});
    parent_.push_back(kNone);
    fn_intern_.emplace(pack(fn, arg), id);
    return id;
  }

  uint32_t skolem_of(const Rule& rule) {
    SkolemFn f;
    for (const RAtom& h : rule.head) {
      if (h.pred == Pred::Role) f.r = h.p;
      if (h.pred == Pred::Concept && h.a.tag == RTerm::Var &&
          h.a.id == rule.exist_var)
        f.a = h.p;
    }
    assert(rule.body.size() == 1 && rule.body[0].pred == Pred::Concept);
    f.a1 = rule.body[0].p;
    std::array<uint32_t, 3> key{f.r, f.a, f.a1};
    auto it = skolem_key_.find(key);
    if (it != skolem_key_.end()) return it->second;
    uint32_t id = (uint32_t)skolems_.size();
    skolems_.push_back(f);
    skolem_key_.emplace(key, id);
    return id;
  }

  // Total order on terms: named terms (by name) precede all functional
  // terms; functional terms compare by depth, then argument, then symbol.
  bool less_term(uint32_t s, uint32_t t) const {
    const ChaseTerm &a = terms_[s], &b = terms_[t];
    if (a.named() != b.named()) return a.named();
    if (a.named()) return name_rank_[a.ind] < name_rank_[b.ind];
    if (a.depth != b.depth) return a.depth < b.depth;
    if (a.arg != b.arg) return less_term(a.arg, b.arg);
    const SkolemFn &fa = skolems_[a.fn], &fb = skolems_[b.fn];
    auto key = [&](const SkolemFn& f) {
      return std::tie(sym_.role_name(f.r), sym_.concept_name(f.a),
                      sym_.concept_name(f.a1));
    };
    return key(fa) < key(fb);
  }

  // Representative of t: follow ⇝ links (which always point to smaller
  // terms), re-normalizing nested arguments as needed. Strictly
  // decreasing in the term order, so it terminates.
  uint32_t normalize(uint32_t t) {
    while (true) {
      while (parent_[t] != kNone) t = parent_[t];
      if (terms_[t].named()) return t;
      uint32_t a = normalize(terms_[t].arg);
      if (a == terms_[t].arg) return t;
      t = intern_fn(terms_[t].fn, a);
    }
  }

  static bool contains_proper(const std::vector<ChaseTerm>& terms, uint32_t t,
                              uint32_t w) {
    while (!terms[t].named()) {
      t = terms[t].arg;
      if (t == w) return true;
    }
    return false;
  }

  // --- facts ------------------------------------------------------------

  void bump(uint32_t t) {
    ++fact_count_;
    depth_reached_ = std::max(depth_reached_, terms_[t].depth);
    if (fact_count_ > opt_.fact_limit) {
      truncated_ = true;
      stop_ = true;
    }
  }

  bool add_concept(ConceptId c, uint32_t t) {
    if (!concept_[c].insert(t).second) return false;
    bump(t);
    return true;
  }
  bool add_role(RoleId r, uint32_t s, uint32_t t) {
    if (!role_[r].insert(pack(s, t)).second) return false;
    bump(terms_[s].depth >= terms_[t].depth ? s : t);
    return true;
  }
  bool add_self(RoleId r, uint32_t t) {
    if (!self_[r].insert(t).second) return false;
    bump(t);
    return true;
  }
  bool add_ind(uint32_t t) {
    if (!ind_.insert(t).second) return false;
    bump(t);
    return true;
  }

  uint32_t resolve(const RTerm& t, const std::array<uint32_t, 3>& sig) const {
    return t.tag == RTerm::Const ? named_term_[t.id] : sig[t.id];
  }

  bool holds(const RAtom& at, const std::array<uint32_t, 3>& sig) const {
    uint32_t a = resolve(at.a, sig);
    switch (at.pred) {
      case Pred::Concept:
        return concept_[at.p].count(a) != 0;
      case Pred::Role:
        return role_[at.p].count(pack(a, resolve(at.b, sig))) != 0;
      case Pred::Self:
        return self_[at.p].count(a) != 0;
      case Pred::Ind:
        return ind_.count(a) != 0;
      default:
        assert(false && "equality cannot occur in rule bodies");
        return false;
    }
  }

  bool insert_atom(const RAtom& at, const std::array<uint32_t, 3>& sig) {
    uint32_t a = resolve(at.a, sig);
    switch (at.pred) {
      case Pred::Concept:
        return add_concept(at.p, a);
      case Pred::Role:
        return add_role(at.p, a, resolve(at.b, sig));
      case Pred::Self:
        return add_self(at.p, a);
      case Pred::Ind:
        return add_ind(a);
      default:
        assert(false && "equality heads are handled by merge");
        return false;
    }
  }

  // --- matching ----------------------------------------------------------

  void enumerate(const std::vector<RAtom>& body, size_t i,
                 std::array<uint32_t, 3>& sig,
                 std::vector<std::array<uint32_t, 3>>& out) {
    if (i == body.size()) {
      out.push_back(sig);
      return;
    }
    const RAtom& at = body[i];
    auto bound = [&](const RTerm& t) {
      return t.tag == RTerm::Const || sig[t.id] != kNone;
    };
    auto with = [&](const RTerm& t, uint32_t v, auto&& fn) {
      if (t.tag == RTerm::Const) {
        if (named_term_[t.id] == v) fn();
        return;
      }
      if (sig[t.id] == v) {
        fn();
      } else if (sig[t.id] == kNone) {
        sig[t.id] = v;
        fn();
        sig[t.id] = kNone;
      }
    };
    switch (at.pred) {
      case Pred::Concept:
        if (bound(at.a)) {
          if (holds(at, sig)) enumerate(body, i + 1, sig, out);
        } else {
          for (uint32_t u : concept_[at.p])
            with(at.a, u, [&] { enumerate(body, i + 1, sig, out); });
        }
        break;
      case Pred::Role:
        if (bound(at.a) && bound(at.b)) {
          if (holds(at, sig)) enumerate(body, i + 1, sig, out);
        } else {
          for (uint64_t e : role_[at.p]) {
            uint32_t u = (uint32_t)(e >> 32), v = (uint32_t)e;
            with(at.a, u,
                 [&] { with(at.b, v, [&] { enumerate(body, i + 1, sig, out); }); });
          }
        }
        break;
      case Pred::Self:
        if (bound(at.a)) {
          if (holds(at, sig)) enumerate(body, i + 1, sig, out);
        } else {
          for (uint32_t u : self_[at.p])
            with(at.a, u, [&] { enumerate(body, i + 1, sig, out); });
        }
        break;
      case Pred::Ind:
        if (bound(at.a)) {
          if (holds(at, sig)) enumerate(body, i + 1, sig, out);
        } else {
          for (uint32_t u : ind_)
            with(at.a, u, [&] { enumerate(body, i + 1, sig, out); });
        }
        break;
      default:
        assert(false && "equality cannot occur in rule bodies");
    }
  }

  // --- application --------------------------------------------------------

  bool apply(const Rule& rule, uint32_t fn, std::array<uint32_t, 3> sig) {
    // Merges since enumeration may have stalled this match: re-normalize
    // and re-check the body.
    for (uint32_t& v : sig)
      if (v != kNone) v = normalize(v);
    for (const RAtom& at : rule.body)
      if (!holds(at, sig)) return false;

    if (rule.exist) {
      uint32_t x = kNone;
      for (const RAtom& at : rule.body)
        if (at.a.tag == RTerm::Var) x = sig[at.a.id];
      uint32_t w = normalize(intern_fn(fn, x));
      sig[rule.exist_var] = w;
      bool absent = false;
      for (const RAtom& at : rule.head)
        if (!holds(at, sig)) absent = true;
      if (!absent) return false;
      if (terms_[w].depth > opt_.depth_limit) {
        truncated_ = true;  // applicable, but past the depth budget
        return false;
      }
      bool added = false;
      for (const RAtom& at : rule.head)
        if (insert_atom(at, sig)) added = true;
      return added;
    }

    if (rule.head.size() == 1 && rule.head[0].pred == Pred::Eq) {
      uint32_t w1 = normalize(resolve(rule.head[0].a, sig));
      uint32_t w2 = normalize(resolve(rule.head[0].b, sig));
      if (w1 == w2) return false;
      if (less_term(w1, w2)) std::swap(w1, w2);
      merge(w1, w2);
      return true;
    }

    bool added = false;
    for (const RAtom& at : rule.head) {
      if (insert_atom(at, sig)) added = true;
      if (stop_) break;
    }
    return added;
  }

  // w ⇝ wp with w > wp: facts mentioning a term that has w as a proper
  // subterm are dropped (they are re-derivable if still needed); direct
  // occurrences of w are replaced by wp.
  void merge(uint32_t w, uint32_t wp) {
    parent_[w] = wp;
    leadsto_.emplace_back(w, wp);
    auto fix = [&](uint32_t t, bool& drop, bool& rewrite) {
      drop = contains_proper(terms_, t, w);
      rewrite = !drop && t == w;
    };
    for (auto& ext : concept_) sweep_unary(ext, w, wp, fix);
    for (auto& ext : self_) sweep_unary(ext, w, wp, fix);
    sweep_unary(ind_, w, wp, fix);
    for (auto& ext : role_) {
      std::vector<uint64_t> del;
      std::vector<uint64_t> add;
      for (uint64_t e : ext) {
        uint32_t s = (uint32_t)(e >> 32), t = (uint32_t)e;
        bool ds, rs, dt, rt;
        fix(s, ds, rs);
        fix(t, dt, rt);
        if (!(ds || rs || dt || rt)) continue;
        del.push_back(e);
        if (!ds && !dt) add.push_back(pack(rs ? wp : s, rt ? wp : t));
      }
      for (uint64_t e : del) ext.erase(e);
      fact_count_ -= del.size();
      for (uint64_t e : add)
        if (ext.insert(e).second) ++fact_count_;
    }
  }

  template <typename Fix>
  void sweep_unary(std::unordered_set<uint32_t>& ext, uint32_t w, uint32_t wp,
                   Fix fix) {
    std::vector<uint32_t> del;
    bool readd = false;
    for (uint32_t t : ext) {
      bool drop, rewrite;
      fix(t, drop, rewrite);
      if (drop || rewrite) del.push_back(t);
      if (rewrite) readd = true;
    }
    for (uint32_t t : del) ext.erase(t);
    fact_count_ -= del.size();
    if (readd && ext.insert(wp).second) ++fact_count_;
  }

  // --- result -------------------------------------------------------------

  ChaseInstance freeze(bool saturated) {
    ChaseInstance ci;
    ci.terms = std::move(terms_);
    ci.skolems = std::move(skolems_);
    ci.parent = std::move(parent_);
    ci.leadsto = std::move(leadsto_);
    ci.saturated = saturated;
    ci.truncated = truncated_;
    ci.depth_reached = depth_reached_;
    ci.fact_count = fact_count_;
    ci.concept_ext.resize(concept_.size());
    for (size_t c = 0; c < concept_.size(); ++c) {
      ci.concept_ext[c].assign(concept_[c].begin(), concept_[c].end());
      std::sort(ci.concept_ext[c].begin(), ci.concept_ext[c].end());
    }
    ci.role_ext.resize(role_.size());
    for (size_t r = 0; r < role_.size(); ++r) {
      for (uint64_t e : role_[r])
        ci.role_ext[r].emplace_back((uint32_t)(e >> 32), (uint32_t)e);
      std::sort(ci.role_ext[r].begin(), ci.role_ext[r].end());
    }
    ci.self_ext.resize(self_.size());
    for (size_t r = 0; r < self_.size(); ++r) {
      ci.self_ext[r].assign(self_[r].begin(), self_[r].end());
      std::sort(ci.self_ext[r].begin(), ci.self_ext[r].end());
    }
    ci.ind_ext.assign(ind_.begin(), ind_.end());
    std::sort(ci.ind_ext.begin(), ci.ind_ext.end());
    return ci;
  }

  const RuleBase& xi_;
  const Symbols& sym_;
  ChaseOptions opt_;

  std::vector<ChaseTerm> terms_;
  std::vector<SkolemFn> skolems_;
  std::map<std::array<uint32_t, 3>, uint32_t> skolem_key_;
  std::unordered_map<uint64_t, uint32_t> fn_intern_;
  std::vector<uint32_t> named_term_;
  std::vector<uint32_t> name_rank_;
  std::vector<uint32_t> parent_;
  std::vector<uint32_t> rule_fn_;

  std::vector<std::unordered_set<uint32_t>> concept_;
  std::vector<std::unordered_set<uint64_t>> role_;
  std::vector<std::unordered_set<uint32_t>> self_;
  std::unordered_set<uint32_t> ind_;
  std::vector<std::pair<uint32_t, uint32_t>> leadsto_;

  std::array<uint32_t, 3> sig0_{kNone, kNone, kNone};
  std::vector<std::array<uint32_t, 3>> matches_;

  uint64_t fact_count_ = 0;
  uint32_t depth_reached_ = 0;
  bool truncated_ = false;
  bool stop_ = false;
};

}  // namespace

bool ChaseInstance::unsat() const {
  return !concept_ext[Symbols::kBot].empty();
}

uint32_t ChaseInstance::normalize(uint32_t t) const {
  while (parent[t] != kNone) t = parent[t];
  return t;
}

uint32_t ChaseInstance::term_of(IndId ind) const {
  for (uint32_t t = 0; t < terms.size(); ++t)
    if (terms[t].named() && terms[t].ind == ind) return t;
  return kNone;
}

bool ChaseInstance::holds_concept(ConceptId c, uint32_t t) const {
  const auto& e = concept_ext[c];
  return std::binary_search(e.begin(), e.end(), t);
}

bool ChaseInstance::holds_role(RoleId r, uint32_t s, uint32_t t) const {
  const auto& e = role_ext[r];
  return std::binary_search(e.begin(), e.end(), std::make_pair(s, t));
}

ChaseInstance chase(const RuleBase& xi, const Symbols& sym,
                    const ChaseOptions& opt) {
  return Chaser(xi, sym, opt).run();
}

namespace {

// Backtracking homomorphism search over the chased instance.
class Hom {
 public:
  Hom(const ChaseInstance& ci, const CQ& q) : ci_(ci), q_(q) {
    std::set<uint32_t> dom;
    for (ConceptId c = 0; c < ci.concept_ext.size(); ++c)
      dom.insert(ci.concept_ext[c].begin(), ci.concept_ext[c].end());
    for (RoleId r = 0; r < ci.role_ext.size(); ++r)
      for (auto [s, t] : ci.role_ext[r]) {
        dom.insert(s);
        dom.insert(t);
      }
    domain_.assign(dom.begin(), dom.end());

    // Per-variable candidate lists: the tightest unary extent if the
    // variable has one, the whole active domain otherwise.
    cand_.resize(q.n_vars());
    for (uint32_t v = 0; v < q.n_vars(); ++v) {
      const std::vector<uint32_t>* best = nullptr;
      for (const QAtom& at : q.atoms)
        if (!at.binary && at.t0.is_var && at.t0.id == v) {
          const auto& e = ci.concept_ext[at.c];
          if (!best || e.size() < best->size()) best = &e;
        }
      cand_[v] = best ? *best : domain_;
    }
    // Atoms become checkable once their highest variable is bound.
    checks_.resize(q.n_vars() + 1);
    for (const QAtom& at : q.atoms) {
      uint32_t lvl = 0;
      if (at.t0.is_var) lvl = std::max(lvl, at.t0.id + 1);
      if (at.binary && at.t1.is_var) lvl = std::max(lvl, at.t1.id + 1);
      checks_[lvl].push_back(at);
    }
  }

  bool term_for(const QTerm& t, uint32_t& out) const {
    if (t.is_var) {
      out = val_[t.id];
      return true;
    }
    uint32_t u = ci_.term_of(t.id);
    if (u == kNone) return false;
    out = ci_.normalize(u);
    return true;
  }

  bool check(const QAtom& at) const {
    uint32_t a, b;
    if (!term_for(at.t0, a)) return false;
    if (!at.binary) return ci_.holds_concept(at.c, a);
    if (!term_for(at.t1, b)) return false;
    return ci_.holds_role(at.r, a, b);
  }

  void search(uint32_t v, std::vector<std::vector<uint32_t>>& out) {
    if (v == q_.n_vars()) {
      out.push_back(val_);
      return;
    }
    for (uint32_t u : cand_[v]) {
      val_[v] = u;
      bool ok = true;
      for (const QAtom& at : checks_[v + 1])
        if (!check(at)) {
          ok = false;
          break;
        }
      if (ok) search(v + 1, out);
    }
  }

  std::vector<std::vector<uint32_t>> run() {
    std::vector<std::vector<uint32_t>> out;
    val_.assign(q_.n_vars(), kNone);
    for (const QAtom& at : checks_[0])
      if (!check(at)) return out;  // a fully ground atom fails
    search(0, out);
    return out;
  }

 private:
  const ChaseInstance& ci_;
  const CQ& q_;
  std::vector<uint32_t> domain_;
  std::vector<std::vector<uint32_t>> cand_;
  std::vector<std::vector<QAtom>> checks_;
  std::vector<uint32_t> val_;
};

}  // namespace

OracleResult oracle_answers(const RuleBase& xi, const Symbols& sym,
                            const CQ& q, const ChaseOptions& opt) {
  ChaseInstance ci = chase(xi, sym, opt);
  OracleResult res;
  res.complete = ci.saturated;
  if (ci.unsat()) {
    res.unsat = true;
    return res;
  }

  // Named individuals per representative term, for answer expansion.
  std::map<uint32_t, std::vector<IndId>> names_of;
  for (uint32_t t = 0; t < ci.terms.size(); ++t)
    if (ci.terms[t].named()) names_of[ci.normalize(t)].push_back(ci.terms[t].ind);

  std::set<std::vector<IndId>> tuples;
  for (const std::vector<uint32_t>& hom : Hom(ci, q).run()) {
    std::vector<const std::vector<IndId>*> cols;
    cols.reserve(q.answer_vars.size());
    bool named = true;
    for (VarId v : q.answer_vars) {
      auto it = names_of.find(ci.normalize(hom[v]));
      if (it == names_of.end()) {
        named = false;  // the answer position maps to an anonymous term
        break;
      }
      cols.push_back(&it->second);
    }
    if (!named) continue;
    std::vector<size_t> idx(cols.size(), 0);
    while (true) {
      std::vector<IndId> tup(cols.size());
      for (size_t k = 0; k < cols.size(); ++k) tup[k] = (*cols[k])[idx[k]];
      tuples.insert(std::move(tup));
      size_t k = cols.size();
      while (k > 0 && ++idx[k - 1] == cols[k - 1]->size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  res.tuples.assign(tuples.begin(), tuples.end());
  return res;
}

std::string render_term(const ChaseInstance& ci, const Symbols& sym,
                        uint32_t t) {
  const ChaseTerm& tm = ci.terms[t];
  if (tm.named()) return sym.individual_name(tm.ind);
  const SkolemFn& f = ci.skolems[tm.fn];
  return "f[" + sym.role_name(f.r) + "," + sym.concept_name(f.a) + "," +
         sym.concept_name(f.a1) + "](" + render_term(ci, sym, tm.arg) + ")";
}

std::string dump_instance(const ChaseInstance& ci, const Symbols& sym) {
  std::vector<std::string> lines;
  auto term = [&](uint32_t t) { return render_term(ci, sym, t); };
  for (ConceptId c = 0; c < ci.concept_ext.size(); ++c)
    for (uint32_t t : ci.concept_ext[c])
      lines.push_back(sym.concept_name(c) + "(" + term(t) + ")");
  for (RoleId r = 0; r < ci.role_ext.size(); ++r) {
    for (auto [s, t] : ci.role_ext[r])
      lines.push_back(sym.role_name(r) + "(" + term(s) + ", " + term(t) + ")");
    for (uint32_t t : ci.self_ext[r])
      lines.push_back("self" + sym.role_name(r) + "(" + term(t) + ")");
  }
  for (uint32_t t : ci.ind_ext) lines.push_back("ind(" + term(t) + ")");
  for (auto [w, wp] : ci.leadsto)
    lines.push_back("eq " + term(w) + " " + term(wp));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace elq
