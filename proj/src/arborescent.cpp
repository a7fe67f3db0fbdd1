// Shape classification and the polynomial entails procedure: a level table
// of variable sets evaluated bottom-up, with named parents witnessed per
// child through the full role relation and auxiliary parents witnessed by
// a single joint predecessor through the direct-edge relation.

#include "elq/arborescent.h"

#include <algorithm>
#include <cassert>

namespace elq {

QueryShape classify_query(const CQ& q) {
  const uint32_t n = q.n_vars();
  bool has_const = false;
  bool self_loop = false;
  std::vector<std::pair<VarId, VarId>> und;  // undirected simple edges
  std::vector<std::vector<VarId>> out(n);    // distinct out-neighbours
  for (const QAtom& a : q.atoms) {
    has_const |= !a.t0.is_var || (a.binary && !a.t1.is_var);
    if (!a.binary || !a.t0.is_var || !a.t1.is_var) continue;
    VarId x = a.t0.id, y = a.t1.id;
    if (x == y) {
      self_loop = true;
      continue;
    }
    und.push_back({std::min(x, y), std::max(x, y)});
    out[x].push_back(y);
  }
  if (self_loop) return {QueryShape::Cyclic, kNone};
  std::sort(und.begin(), und.end());
  und.erase(std::unique(und.begin(), und.end()), und.end());
  for (auto& o : out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }

  std::vector<uint32_t> uf(n);
  for (uint32_t i = 0; i < n; ++i) uf[i] = i;
  auto find = [&](uint32_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (auto& [x, y] : und) {
    uint32_t a = find(x), b = find(y);
    if (a == b) return {QueryShape::Cyclic, kNone};
    uf[a] = b;
  }
  uint32_t components = 0;
  for (uint32_t i = 0; i < n; ++i) components += find(i) == i;

  if (!has_const && n >= 1 && components == 1) {
    VarId root = kNone;
    bool ok = true;
    for (uint32_t v = 0; v < n && ok; ++v) {
      if (out[v].empty()) {
        if (root != kNone) ok = false;
        root = v;
      } else if (out[v].size() != 1) {
        ok = false;
      }
    }
    if (ok && root != kNone) return {QueryShape::Arborescent, root};
  }
  return {QueryShape::Acyclic, kNone};
}

namespace {

using VSet = std::vector<VarId>;  // sorted variable set

void push_unique(std::vector<VSet>& sets, VSet v) {
  if (std::find(sets.begin(), sets.end(), v) == sets.end())
    sets.push_back(std::move(v));
}

}  // namespace

bool entails_arborescent(const FactStore& st, const CQ& q) {
  QueryShape shape = classify_query(q);
  if (shape.kind != QueryShape::Arborescent)
    throw ShapeError("query is not arborescent");
  if (st.has_trans() || st.has_refl() || st.has_self_axioms())
    throw DialectError(
        "arborescent entailment requires a rule base without transitive, "
        "reflexive, or self-restriction axioms");
  if (st.unsat()) return true;  // inconsistent data entails everything

  const uint32_t n = q.n_vars();
  std::vector<VarId> parent(n, kNone);
  std::vector<std::vector<RoleId>> roles(n);
  std::vector<std::vector<VarId>> children(n);
  std::vector<std::vector<ConceptId>> unary(n);
  for (const QAtom& a : q.atoms) {
    if (a.binary) {
      parent[a.t0.id] = a.t1.id;  // unique by shape
      roles[a.t0.id].push_back(a.r);
    } else {
      unary[a.t0.id].push_back(a.c);
    }
  }
  for (auto& r : roles) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  for (uint32_t v = 0; v < n; ++v)
    if (parent[v] != kNone) children[parent[v]].push_back(v);

  auto pred_of = [&](const VSet& v) {
    VSet p;
    for (VarId x : v)
      p.insert(p.end(), children[x].begin(), children[x].end());
    std::sort(p.begin(), p.end());
    return p;
  };

  // the level table, top-down; empty predecessor sets are not added
  std::vector<std::vector<VSet>> levels{{VSet{shape.root}}};
  size_t rt_size = 1;
  while (true) {
    std::vector<VSet> nxt;
    for (const VSet& v : levels.back()) {
      VSet p = pred_of(v);
      if (p.empty()) continue;
      for (VarId y : p) push_unique(nxt, VSet{y});
      push_unique(nxt, std::move(p));
    }
    if (nxt.empty()) break;
    rt_size += nxt.size();
    levels.push_back(std::move(nxt));
  }
  if (rt_size > levels.size() * (size_t)(n + 1))
    throw std::logic_error("level table exceeded its polynomial bound");

  const uint32_t nt = st.n_terms();
  auto c_of = [&](const VSet& v) {
    std::vector<uint8_t> m(nt, 0);
    for (IndId u : st.named_reps()) m[u] = 1;
    for (IndId u : st.aux_reps()) m[u] = 1;
    for (VarId x : v)
      for (ConceptId b : unary[x])
        for (uint32_t u = 0; u < nt; ++u)
          if (m[u] && !st.holds_concept(b, u)) m[u] = 0;
    return m;
  };

  // A sets, bottom-up (reverse level order; assert the discipline)
  std::vector<std::vector<std::vector<uint8_t>>> A(levels.size());
  for (size_t l = levels.size(); l-- > 0;) {
    A[l].resize(levels[l].size());
    for (size_t i = 0; i < levels[l].size(); ++i) {
      const VSet& V = levels[l][i];
      std::vector<uint8_t> m = c_of(V);
      VSet P = pred_of(V);
      if (!P.empty()) {
        assert(l + 1 < levels.size());
        auto at_next = [&](const VSet& w) -> const std::vector<uint8_t>& {
          auto it =
              std::find(levels[l + 1].begin(), levels[l + 1].end(), w);
          assert(it != levels[l + 1].end());
          return A[l + 1][it - levels[l + 1].begin()];
        };
        // i-part: named u, each child independently witnessed through the
        // full role relation
        std::vector<uint8_t> iv(nt, 0);
        for (IndId u : st.named_reps()) iv[u] = 1;
        for (VarId y : P) {
          const std::vector<uint8_t>& ay = at_next(VSet{y});
          std::vector<uint8_t> sy(nt, 0);
          for (uint32_t u2 = 0; u2 < nt; ++u2) {
            if (!ay[u2]) continue;
            for (IndId v : st.succ(roles[y][0], u2)) {
              bool all = true;
              for (size_t k = 1; k < roles[y].size() && all; ++k)
                all = st.holds_role(roles[y][k], u2, v);
              if (all) sy[v] = 1;
            }
          }
          for (uint32_t u = 0; u < nt; ++u) iv[u] &= sy[u];
        }
        // a-part: aux u, one joint predecessor through direct edges
        std::vector<RoleId> lbl;
        for (VarId y : P) lbl.insert(lbl.end(), roles[y].begin(),
                                     roles[y].end());
        std::sort(lbl.begin(), lbl.end());
        lbl.erase(std::unique(lbl.begin(), lbl.end()), lbl.end());
        std::vector<uint8_t> av(nt, 0);
        const std::vector<uint8_t>& ap = at_next(P);
        for (uint32_t u2 = 0; u2 < nt; ++u2) {
          if (!ap[u2]) continue;
          for (IndId v : st.dir_succ(lbl[0], u2)) {
            bool all = true;
            for (size_t k = 1; k < lbl.size() && all; ++k)
              all = st.holds_dir(lbl[k], u2, v);
            if (all && st.is_aux_id(v)) av[v] = 1;
          }
        }
        for (uint32_t u = 0; u < nt; ++u) m[u] &= (iv[u] | av[u]);
      }
      A[l][i] = std::move(m);
    }
  }
  const std::vector<uint8_t>& root_set = A[0][0];
  for (uint32_t u = 0; u < nt; ++u)
    if (root_set[u]) return true;
  return false;
}

}  // namespace elq
