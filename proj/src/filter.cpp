// Candidate soundness: fork closure, connection graph, isDSound, and the
// backtracking search over renamings × skeletons × role guesses with
// trail-based label undo and eager exist pruning.

#include "elq/filter.h"

#include <algorithm>

namespace elq {

namespace {

// splitmix64: property-test hook for randomized representative picks
uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

IndId image_of(const QTerm& t, const Substitution& tau, const FactStore& st) {
  return st.rep(t.is_var ? tau[t.id] : t.id);
}

}  // namespace

bool ForkClosure::same(const QTerm& x, const QTerm& y) const {
  auto rep_of = [&](const QTerm& t) -> QTerm {
    if (t.is_var) return t.id < var_rep.size() ? var_rep[t.id] : t;
    auto it = std::lower_bound(
        const_rep.begin(), const_rep.end(), t.id,
        [](const std::pair<IndId, QTerm>& p, IndId v) { return p.first < v; });
    if (it != const_rep.end() && it->first == t.id) return it->second;
    return t;
  };
  return rep_of(x) == rep_of(y);
}

AtomClass classify_atom(const QAtom& atom, const Substitution& tau,
                        const FactStore& st) {
  if (!atom.binary) return AtomClass::Good;
  IndId is = image_of(atom.t0, tau, st);
  IndId it = image_of(atom.t1, tau, st);
  if (!st.is_aux_id(it)) return AtomClass::Good;
  if (atom.t0 == atom.t1)
    return st.holds_self(atom.r, is) ? AtomClass::Good : AtomClass::Other;
  if (st.hier().simple(atom.r) && !(is == it && st.holds_self(atom.r, is)))
    return AtomClass::AuxSimple;
  return AtomClass::Other;
}

ForkClosure fork_closure(const CQ& q, const Substitution& tau,
                         const FactStore& st, uint64_t rep_salt) {
  const uint32_t nv = q.n_vars();

  // term universe: variables, then canonical constants (deduplicated)
  std::vector<IndId> consts;
  for (const QAtom& a : q.atoms) {
    if (!a.t0.is_var) consts.push_back(st.rep(a.t0.id));
    if (a.binary && !a.t1.is_var) consts.push_back(st.rep(a.t1.id));
  }
  std::sort(consts.begin(), consts.end());
  consts.erase(std::unique(consts.begin(), consts.end()), consts.end());
  const uint32_t n = nv + (uint32_t)consts.size();

  auto uidx = [&](const QTerm& t) -> uint32_t {
    if (t.is_var) return t.id;
    uint32_t k = (uint32_t)(std::lower_bound(consts.begin(), consts.end(),
                                             st.rep(t.id)) -
                            consts.begin());
    return nv + k;
  };

  std::vector<IndId> img(n);
  for (uint32_t v = 0; v < nv; ++v) img[v] = st.rep(tau[v]);
  for (uint32_t k = 0; k < consts.size(); ++k) img[nv + k] = consts[k];

  std::vector<uint32_t> uf(n);
  for (uint32_t i = 0; i < n; ++i) uf[i] = i;
  auto find = [&](uint32_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };

  // aux-simple atoms of q (classification is fixed; ∼ grows around it)
  struct SEdge {
    uint32_t s, t;
  };
  std::vector<SEdge> se;
  for (const QAtom& a : q.atoms) {
    if (!a.binary) continue;
    uint32_t us = uidx(a.t0), ut = uidx(a.t1);
    if (us == ut) continue;
    IndId is = img[us], it = img[ut];
    if (!st.is_aux_id(it) || !st.hier().simple(a.r)) continue;
    if (is == it && st.holds_self(a.r, is)) continue;
    se.push_back({us, ut});
  }

  // fork rule to fixpoint: equal target classes force equal source classes
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < se.size(); ++i)
      for (size_t j = i + 1; j < se.size(); ++j) {
        if (find(se[i].t) != find(se[j].t)) continue;
        uint32_t a = find(se[i].s), b = find(se[j].s);
        if (a != b) {
          uf[a] = b;
          changed = true;
        }
      }
  }

  ForkClosure fc;

  // condition 1: every ∼-class has a single τ-image
  std::vector<IndId> cimg(n, kNone);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t r = find(i);
    if (cimg[r] == kNone)
      cimg[r] = img[i];
    else if (cimg[r] != img[i])
      fc.cond1_ok = false;
  }

  // representative per class: constants first (term-order minimum), then
  // variables (minimum id, or salted pick for the property-test hook)
  std::vector<QTerm> crep(n, QTerm::var(kNone));
  for (uint32_t k = 0; k < consts.size(); ++k) {
    uint32_t r = find(nv + k);
    if (crep[r].id == kNone || st.order().less(consts[k], crep[r].id))
      crep[r] = QTerm::constant(consts[k]);
  }
  for (uint32_t v = 0; v < nv; ++v) {
    uint32_t r = find(v);
    if (!crep[r].is_var) continue;  // a constant already won
    if (crep[r].id == kNone) {
      crep[r] = QTerm::var(v);
      continue;
    }
    if (rep_salt == 0) continue;  // ascending scan keeps the minimum id
    uint64_t cur = mix64(rep_salt ^ crep[r].id), cand = mix64(rep_salt ^ v);
    if (cand < cur || (cand == cur && v < crep[r].id)) crep[r] = QTerm::var(v);
  }

  fc.var_rep.resize(nv);
  for (uint32_t v = 0; v < nv; ++v) fc.var_rep[v] = crep[find(v)];
  for (const QAtom& a : q.atoms) {
    auto note = [&](const QTerm& t) {
      if (t.is_var) return;
      QTerm rep = crep[find(uidx(t))];
      fc.const_rep.push_back({t.id, rep});
      fc.const_rep.push_back({st.rep(t.id), rep});
    };
    note(a.t0);
    if (a.binary) note(a.t1);
  }
  std::sort(fc.const_rep.begin(), fc.const_rep.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  fc.const_rep.erase(std::unique(fc.const_rep.begin(), fc.const_rep.end()),
                     fc.const_rep.end());

  fc.q_sim.name = q.name;
  fc.q_sim.var_names = q.var_names;
  fc.q_sim.answer_vars = q.answer_vars;
  for (const QAtom& a : q.atoms) {
    QAtom b = a;
    b.t0 = crep[find(uidx(a.t0))];
    if (a.binary) b.t1 = crep[find(uidx(a.t1))];
    if (std::find(fc.q_sim.atoms.begin(), fc.q_sim.atoms.end(), b) ==
        fc.q_sim.atoms.end())
      fc.q_sim.atoms.push_back(b);
  }
  return fc;
}

namespace {

using Vtx = ConnectionGraph::Vtx;

Vtx vertex_of(const QTerm& t, const Substitution& tau, const FactStore& st) {
  IndId im = image_of(t, tau, st);
  if (t.is_var && st.is_aux_id(im)) return {true, t.id};
  return {false, im};
}

// var vertices of q∼: variables with auxiliary images, ascending id
std::vector<VarId> var_vertices_of(const CQ& q_sim, const Substitution& tau,
                                   const FactStore& st) {
  std::vector<VarId> vv;
  for (const QAtom& a : q_sim.atoms) {
    auto note = [&](const QTerm& t) {
      if (t.is_var && st.is_aux_id(image_of(t, tau, st))) vv.push_back(t.id);
    };
    note(a.t0);
    if (a.binary) note(a.t1);
  }
  std::sort(vv.begin(), vv.end());
  vv.erase(std::unique(vv.begin(), vv.end()), vv.end());
  return vv;
}

struct ESEdge {
  Vtx src;
  VarId tgt;       // always a var vertex
  RoleId role;     // the aux-simple atom's role (seed label)
  bool operator==(const ESEdge&) const = default;
};

std::vector<ESEdge> es_edges_of(const CQ& q_sim, const Substitution& tau,
                                const FactStore& st) {
  std::vector<ESEdge> es;
  for (const QAtom& a : q_sim.atoms) {
    if (classify_atom(a, tau, st) != AtomClass::AuxSimple) continue;
    es.push_back({vertex_of(a.t0, tau, st), a.t1.id, a.r});
  }
  return es;
}

// directed cycle among the var-vertex edges of E_s
bool es_acyclic(const std::vector<ESEdge>& es, const std::vector<VarId>& vv) {
  std::vector<uint32_t> pos(vv.empty() ? 0 : vv.back() + 1, kNone);
  for (uint32_t i = 0; i < vv.size(); ++i) pos[vv[i]] = i;
  std::vector<std::vector<uint32_t>> adj(vv.size());
  for (const ESEdge& e : es)
    if (e.src.is_var) adj[pos[e.src.id]].push_back(pos[e.tgt]);
  std::vector<uint8_t> color(vv.size(), 0);
  std::vector<std::pair<uint32_t, size_t>> stack;
  for (uint32_t s = 0; s < vv.size(); ++s) {
    if (color[s]) continue;
    stack.push_back({s, 0});
    color[s] = 1;
    while (!stack.empty()) {
      auto& [u, k] = stack.back();
      if (k == adj[u].size()) {
        color[u] = 2;
        stack.pop_back();
        continue;
      }
      uint32_t v = adj[u][k++];
      if (color[v] == 1) return false;
      if (color[v] == 0) {
        color[v] = 1;
        stack.push_back({v, 0});
      }
    }
  }
  return true;
}

}  // namespace

ConnectionGraph connection_graph(const CQ& q_sim, const Substitution& tau,
                                 const FactStore& st) {
  ConnectionGraph g;
  g.named = st.named_reps();
  g.var_vertices = var_vertices_of(q_sim, tau, st);
  for (const ESEdge& e : es_edges_of(q_sim, tau, st)) {
    std::pair<Vtx, Vtx> edge{e.src, Vtx{true, e.tgt}};
    if (std::find(g.e_s.begin(), g.e_s.end(), edge) == g.e_s.end())
      g.e_s.push_back(edge);
  }
  for (VarId v : g.var_vertices) {
    IndId iv = image_of(QTerm::var(v), tau, st);
    for (IndId u : st.named_sources(st.aux_index(iv)))
      g.e_t.push_back({Vtx{false, u}, Vtx{true, v}});
    for (VarId w : g.var_vertices)
      if (st.aux_reachable(image_of(QTerm::var(w), tau, st), iv))
        g.e_t.push_back({Vtx{true, w}, Vtx{true, v}});
  }
  return g;
}

bool is_dsound(const CQ& q, const Substitution& tau, const FactStore& st) {
  ForkClosure fc = fork_closure(q, tau, st);
  if (!fc.cond1_ok) return false;
  return es_acyclic(es_edges_of(fc.q_sim, tau, st),
                    var_vertices_of(fc.q_sim, tau, st));
}

bool exist(const FactStore& st, IndId u_from, IndId u_to,
           const std::vector<RoleId>& roles) {
  if (roles.empty()) return true;
  u_from = st.rep(u_from);
  u_to = st.rep(u_to);
  auto direct = [&](IndId a, IndId b) {
    for (RoleId r : roles)
      if (!st.holds_dir(r, a, b)) return false;
    return true;
  };
  bool all_trans = true;
  for (RoleId r : roles) all_trans &= st.hier().transitive(r);
  if (!all_trans) return direct(u_from, u_to);
  if (direct(u_from, u_to)) return true;
  if (!st.is_aux_id(u_to) || !st.aux_reachable(u_from, u_to)) return false;
  // breadth-first over aux representatives; every step carries all roles
  std::vector<uint8_t> seen(st.aux_reps().size(), 0);
  std::vector<IndId> frontier{u_from};
  while (!frontier.empty()) {
    IndId u = frontier.back();
    frontier.pop_back();
    for (IndId v : st.dir_succ(roles[0], u)) {
      uint32_t k = st.aux_index(v);
      if (k == kNone) continue;
      bool ok = true;
      for (size_t i = 1; i < roles.size() && ok; ++i)
        ok = st.holds_dir(roles[i], u, v);
      if (!ok) continue;
      if (v == u_to) return true;
      if (!seen[k]) {
        seen[k] = 1;
        frontier.push_back(v);
      }
    }
  }
  return false;
}

namespace {

enum class R3 : uint8_t { Found, NotFound, Abort };

// Backtracking search shared by is_sound and the enumeration surfaces.
class Engine {
 public:
  Engine(const CQ& q_sim, const Substitution& tau, const FactStore& st,
         uint64_t branch_cap, bool capture)
      : q_(q_sim), tau_(tau), st_(st), cap_(branch_cap), capture_(capture) {
    vv_ = var_vertices_of(q_, tau_, st_);
    pos_.assign(q_.n_vars(), kNone);
    img_.assign(vv_.size(), kNone);
    for (uint32_t i = 0; i < vv_.size(); ++i) {
      pos_[vv_[i]] = i;
      img_[i] = st_.rep(tau_[vv_[i]]);
    }
    es_ = es_edges_of(q_, tau_, st_);
    sigma_.resize(vv_.size());
    for (uint32_t i = 0; i < vv_.size(); ++i) sigma_[i] = i;
    // image groups over var-vertex indices (already ascending by var id)
    std::vector<uint32_t> idx(vv_.size());
    for (uint32_t i = 0; i < vv_.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](uint32_t a, uint32_t b) { return img_[a] < img_[b]; });
    for (size_t i = 0; i < idx.size();) {
      size_t j = i;
      while (j < idx.size() && img_[idx[j]] == img_[idx[i]]) ++j;
      groups_.push_back(
          std::vector<uint32_t>(idx.begin() + i, idx.begin() + j));
      i = j;
    }
    parent_.assign(vv_.size(), Vtx{false, kNone});
    labels_.resize(vv_.size());
  }

  uint64_t ticks = 0;
  FilterWitness witness;

  R3 run() { return rec_sigma(0); }

  // enumeration surfaces -------------------------------------------------
  void all_renamings(std::vector<VariableRenaming>& out) {
    std::vector<uint32_t> block_of(vv_.size(), kNone);
    root_of_.assign(vv_.size(), kNone);
    next_block_ = 0;
    enum_partitions_all_roots(0, 0, block_of, out);
  }

  bool apply_renaming(const VariableRenaming& sig) {
    for (uint32_t i = 0; i < vv_.size(); ++i) sigma_[i] = i;
    for (auto& [v, w] : sig.map) {
      if (pos_[v] == kNone || pos_[w] == kNone) return false;
      sigma_[pos_[v]] = pos_[w];
    }
    return sigma_setup();
  }

  void all_skeletons(std::vector<Skeleton>& out) {
    collect_ = &out;
    rec_skel(0);
    collect_ = nullptr;
  }

 private:
  // --- σ enumeration: per image group, partitions by restricted growth
  // (all-singletons first), block root = minimum member ---
  R3 rec_sigma(size_t gi) {
    if (gi == groups_.size()) {
      if (!tick()) return R3::Abort;
      if (!sigma_setup()) return R3::NotFound;
      return rec_skel(0);
    }
    return rec_rgs(gi, 0, {});
  }

  R3 rec_rgs(size_t gi, size_t k, std::vector<uint32_t> roots) {
    const std::vector<uint32_t>& g = groups_[gi];
    if (k == g.size()) return rec_sigma(gi + 1);
    // new block first: the identity renaming is enumerated first overall
    roots.push_back(g[k]);
    sigma_[g[k]] = g[k];
    R3 r = rec_rgs(gi, k + 1, roots);
    if (r != R3::NotFound) return r;
    roots.pop_back();
    for (size_t b = 0; b < roots.size(); ++b) {
      sigma_[g[k]] = roots[b];
      r = rec_rgs(gi, k + 1, roots);
      if (r != R3::NotFound) return r;
    }
    sigma_[g[k]] = g[k];
    return R3::NotFound;
  }

  // forced parents from σ(E_s); false iff σ(E_s) is not a forest
  bool sigma_setup() {
    fparent_.assign(vv_.size(), Vtx{false, kNone});
    forced_.assign(vv_.size(), 0);
    for (const ESEdge& e : es_) {
      Vtx s = e.src.is_var ? Vtx{true, vv_[sigma_[pos_[e.src.id]]]} : e.src;
      uint32_t t = sigma_[pos_[e.tgt]];
      if (s.is_var && pos_[s.id] == t) return false;  // self-loop
      if (forced_[t]) {
        if (!(fparent_[t] == s)) return false;  // in-degree two
      } else {
        forced_[t] = 1;
        fparent_[t] = s;
      }
    }
    // acyclicity of the forced var→var edges
    for (uint32_t i = 0; i < vv_.size(); ++i) {
      if (sigma_[i] != i || !forced_[i]) continue;
      uint32_t u = i;
      uint32_t steps = 0;
      while (forced_[u] && fparent_[u].is_var) {
        u = pos_[fparent_[u].id];
        if (++steps > vv_.size()) return false;
      }
    }
    kept_.clear();
    free_.clear();
    for (uint32_t i = 0; i < vv_.size(); ++i) {
      if (sigma_[i] != i) continue;
      kept_.push_back(i);
      if (forced_[i])
        parent_[i] = fparent_[i];
      else
        free_.push_back(i);
    }
    return true;
  }

  // --- skeleton enumeration: one parent per free vertex, named sources
  // (term order) before kept var vertices (ascending id) ---
  R3 rec_skel(size_t j) {
    if (j == free_.size()) {
      if (!tick()) return R3::Abort;
      if (!parents_acyclic()) return R3::NotFound;
      if (collect_) {
        Skeleton sk;
        for (uint32_t i : kept_)
          sk.edges.push_back({parent_[i], Vtx{true, vv_[i]}});
        collect_->push_back(std::move(sk));
        return R3::NotFound;  // keep enumerating
      }
      return run_labels();
    }
    uint32_t v = free_[j];
    for (IndId u : st_.named_sources(st_.aux_index(img_[v]))) {
      parent_[v] = Vtx{false, u};
      R3 r = rec_skel(j + 1);
      if (r != R3::NotFound) return r;
    }
    for (uint32_t w : kept_) {
      if (w == v || !st_.aux_reachable(img_[w], img_[v])) continue;
      parent_[v] = Vtx{true, vv_[w]};
      R3 r = rec_skel(j + 1);
      if (r != R3::NotFound) return r;
    }
    return R3::NotFound;
  }

  bool parents_acyclic() {
    for (uint32_t s : kept_) {
      uint32_t u = s, steps = 0;
      while (parent_[u].is_var) {
        u = pos_[parent_[u].id];
        if (++steps > kept_.size()) return false;
      }
    }
    return true;
  }

  // --- labels and role guesses ---
  struct OAtom {
    uint32_t atom_idx;
    Vtx src;
    uint32_t tgt;  // var-vertex index
    RoleId role;
    IndId img_s, img_t;
  };

  R3 run_labels() {
    for (uint32_t i : kept_) labels_[i].clear();
    trail_.clear();
    other_.clear();
    // reclassify the σ-rewritten atoms; σ preserves images, so only the
    // term identities can change class (Other → Good via a self stutter)
    for (uint32_t ai = 0; ai < q_.atoms.size(); ++ai) {
      const QAtom& a = q_.atoms[ai];
      if (!a.binary) continue;
      QAtom b = a;
      if (b.t0.is_var && pos_[b.t0.id] != kNone)
        b.t0 = QTerm::var(vv_[sigma_[pos_[b.t0.id]]]);
      if (b.t1.is_var && pos_[b.t1.id] != kNone)
        b.t1 = QTerm::var(vv_[sigma_[pos_[b.t1.id]]]);
      AtomClass cls = classify_atom(b, tau_, st_);
      if (cls == AtomClass::Good) continue;
      Vtx s = vertex_of(b.t0, tau_, st_);
      uint32_t t = pos_[b.t1.id];
      if (cls == AtomClass::AuxSimple) {
        if (!add_label(t, b.r)) return R3::NotFound;  // seed
      } else {
        other_.push_back({ai, s, t, b.r, image_of(b.t0, tau_, st_),
                          image_of(b.t1, tau_, st_)});
      }
    }
    if (capture_) choice_.assign(other_.size(), {0, kNone, kNone});
    return rec_atoms(0);
  }

  R3 rec_atoms(size_t i) {
    if (i == other_.size()) {
      if (capture_) snapshot();
      return R3::Found;
    }
    const OAtom& a = other_[i];
    for (RoleId p : st_.hier().subroles_ordered(a.role)) {
      if (!tick()) return R3::Abort;
      if (!st_.holds_role(p, a.img_s, a.img_t)) continue;
      size_t mark = trail_.size();
      bool ok = false;
      IndId split_root = kNone;
      if (parent_[a.tgt] == a.src) {
        ok = add_label(a.tgt, p);
      } else if (st_.hier().transitive(p)) {
        // walk the parent chain of t upward looking for s
        seg_.clear();
        seg_.push_back(a.tgt);
        Vtx e = parent_[a.tgt];
        bool found = false;
        while (true) {
          if (e == a.src) {
            found = true;
            break;
          }
          if (!e.is_var) break;  // named root, not s
          seg_.push_back(pos_[e.id]);
          e = parent_[pos_[e.id]];
        }
        if (!found && !e.is_var && st_.holds_role(p, a.img_s, e.id)) {
          found = true;  // split: s → root, then down the whole chain
          split_root = e.id;
        }
        if (found) {
          ok = true;
          for (uint32_t x : seg_)
            if (!add_label(x, p)) {
              ok = false;
              break;
            }
        }
      }
      if (ok) {
        if (capture_) choice_[i] = {a.atom_idx, p, split_root};
        R3 r = rec_atoms(i + 1);
        if (r != R3::NotFound) return r;
      }
      rollback(mark);
    }
    return R3::NotFound;
  }

  bool add_label(uint32_t child, RoleId p) {
    auto& l = labels_[child];
    if (std::find(l.begin(), l.end(), p) != l.end()) return true;
    l.push_back(p);
    trail_.push_back(child);
    Vtx par = parent_[child];
    IndId from = par.is_var ? img_[pos_[par.id]] : par.id;
    return exist(st_, from, img_[child], l);
  }

  void rollback(size_t mark) {
    while (trail_.size() > mark) {
      labels_[trail_.back()].pop_back();
      trail_.pop_back();
    }
  }

  bool tick() { return ++ticks <= cap_; }

  void snapshot() {
    witness = FilterWitness{};
    for (uint32_t i = 0; i < vv_.size(); ++i)
      if (sigma_[i] != i) witness.sigma.push_back({vv_[i], vv_[sigma_[i]]});
    for (uint32_t i : kept_) witness.parents.push_back({vv_[i], parent_[i]});
    for (auto& [ai, p, root] : choice_) witness.roles.push_back({ai, p, root});
  }

  // all partitions × all root choices, for list_renamings
  void enum_partitions_all_roots(size_t gi, size_t k,
                                 std::vector<uint32_t>& block_of,
                                 std::vector<VariableRenaming>& out) {
    if (gi == groups_.size()) {
      std::vector<std::vector<uint32_t>> blocks;
      for (auto& g : groups_)
        for (uint32_t m : g) {
          if (block_of[m] >= blocks.size()) blocks.resize(block_of[m] + 1);
          blocks[block_of[m]].push_back(m);
        }
      emit_roots(blocks, 0, out);
      return;
    }
    const std::vector<uint32_t>& g = groups_[gi];
    if (k == g.size()) {
      enum_partitions_all_roots(gi + 1, 0, block_of, out);
      return;
    }
    uint32_t base = next_block_;
    block_of[g[k]] = next_block_++;
    enum_partitions_all_roots(gi, k + 1, block_of, out);
    next_block_ = base;
    for (size_t j = 0; j < k; ++j) {
      // join an existing block of this group (first member's block)
      bool fresh = true;
      for (size_t j2 = 0; j2 < j; ++j2)
        if (block_of[g[j2]] == block_of[g[j]]) fresh = false;
      if (!fresh) continue;
      block_of[g[k]] = block_of[g[j]];
      enum_partitions_all_roots(gi, k + 1, block_of, out);
    }
  }

  void emit_roots(const std::vector<std::vector<uint32_t>>& blocks, size_t b,
                  std::vector<VariableRenaming>& out) {
    if (b == blocks.size()) {
      for (uint32_t i = 0; i < vv_.size(); ++i)
        if (root_of_[i] == kNone) root_of_[i] = i;
      for (uint32_t i = 0; i < vv_.size(); ++i) sigma_[i] = root_of_[i];
      if (sigma_setup()) {
        VariableRenaming vr;
        for (uint32_t i = 0; i < vv_.size(); ++i)
          if (sigma_[i] != i) vr.map.push_back({vv_[i], vv_[sigma_[i]]});
        out.push_back(std::move(vr));
      }
      return;
    }
    if (blocks[b].empty()) {
      emit_roots(blocks, b + 1, out);
      return;
    }
    for (uint32_t root : blocks[b]) {
      for (uint32_t m : blocks[b]) root_of_[m] = root;
      emit_roots(blocks, b + 1, out);
    }
    for (uint32_t m : blocks[b]) root_of_[m] = kNone;
  }

  std::vector<uint32_t> root_of_;  // scratch for emit_roots
  uint32_t next_block_ = 0;

  const CQ& q_;
  const Substitution& tau_;
  const FactStore& st_;
  uint64_t cap_;
  bool capture_;

  std::vector<VarId> vv_;
  std::vector<uint32_t> pos_;  // VarId -> var-vertex index
  std::vector<IndId> img_;     // per var-vertex index
  std::vector<ESEdge> es_;
  std::vector<std::vector<uint32_t>> groups_;

  std::vector<uint32_t> sigma_;  // var-vertex index -> root index
  std::vector<Vtx> fparent_, parent_;
  std::vector<uint8_t> forced_;
  std::vector<uint32_t> kept_, free_;

  std::vector<std::vector<RoleId>> labels_;
  std::vector<uint32_t> trail_, seg_;
  std::vector<OAtom> other_;
  std::vector<std::tuple<uint32_t, RoleId, IndId>> choice_;
  std::vector<Skeleton>* collect_ = nullptr;
};

}  // namespace

std::vector<VariableRenaming> list_renamings(const CQ& q_sim,
                                             const Substitution& tau,
                                             const FactStore& st) {
  Engine e(q_sim, tau, st, UINT64_MAX, false);
  std::vector<VariableRenaming> out;
  e.all_renamings(out);
  for (auto& vr : out)
    std::sort(vr.map.begin(), vr.map.end());
  std::sort(out.begin(), out.end(),
            [](const VariableRenaming& a, const VariableRenaming& b) {
              if (a.map.size() != b.map.size())
                return a.map.size() < b.map.size();
              return a.map < b.map;
            });
  return out;
}

std::vector<Skeleton> list_skeletons(const CQ& q_sim, const Substitution& tau,
                                     const FactStore& st,
                                     const VariableRenaming& sigma) {
  Engine e(q_sim, tau, st, UINT64_MAX, false);
  std::vector<Skeleton> out;
  if (!e.apply_renaming(sigma)) return out;
  e.all_skeletons(out);
  return out;
}

FilterOutcome is_sound(const CQ& q, const FactStore& st,
                       const Substitution& tau, const FilterOptions& opt) {
  FilterOutcome out;
  if (st.unsat()) {  // inconsistent data: every tuple is certain
    out.verdict = Verdict::Sound;
    return out;
  }
  // τ must satisfy q in the materialization
  for (const QAtom& a : q.atoms) {
    bool ok = a.binary ? st.holds_role(a.r, image_of(a.t0, tau, st),
                                       image_of(a.t1, tau, st))
                       : st.holds_concept(a.c, image_of(a.t0, tau, st));
    if (!ok) return out;  // Unsound, zero choices
  }
  ForkClosure fc = fork_closure(q, tau, st, opt.rep_salt);
  if (!fc.cond1_ok) return out;
  std::vector<VarId> vv = var_vertices_of(fc.q_sim, tau, st);
  std::vector<ESEdge> es = es_edges_of(fc.q_sim, tau, st);
  if (!es_acyclic(es, vv)) return out;
  bool any_other = false;
  for (const QAtom& a : fc.q_sim.atoms)
    any_other |= classify_atom(a, tau, st) == AtomClass::Other;
  if (!any_other && opt.enable_fast_path) {
    out.verdict = Verdict::Sound;
    out.fast_path = true;
    return out;
  }
  Engine e(fc.q_sim, tau, st, opt.branch_cap, opt.capture_witness);
  R3 r = e.run();
  out.choices = e.ticks;
  switch (r) {
    case R3::Found:
      out.verdict = Verdict::Sound;
      if (opt.capture_witness) out.witness = std::move(e.witness);
      break;
    case R3::NotFound:
      out.verdict = Verdict::Unsound;
      break;
    case R3::Abort:
      out.verdict = Verdict::Indeterminate;
      break;
  }
  return out;
}

}  // namespace elq
