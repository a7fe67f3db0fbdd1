#include "elq/hardgen.h"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

#include "elq/text.h"

namespace elq {

namespace {

std::string num(uint32_t v) { return std::to_string(v); }

// Variable-table helper for building queries programmatically.
struct QBuilder {
  CQ q;
  VarId var(const std::string& name) {
    for (VarId v = 0; v < q.var_names.size(); ++v)
      if (q.var_names[v] == name) return v;
    q.var_names.push_back(name);
    return (VarId)(q.var_names.size() - 1);
  }
  void unary(ConceptId c, VarId v) {
    q.atoms.push_back(QAtom::unary(c, QTerm::var(v)));
  }
  void role_vv(RoleId r, VarId s, VarId t) {
    q.atoms.push_back(QAtom::role(r, QTerm::var(s), QTerm::var(t)));
  }
  void role_cv(RoleId r, IndId s, VarId t) {
    q.atoms.push_back(QAtom::role(r, QTerm::constant(s), QTerm::var(t)));
  }
};

// The shared assignment-tree rule base: a binary tree of depth n+1 rooted
// in a, where depth-i nodes carry T_i or F_i (a truth value for v_i) and
// leaves carry G; nodes whose truth value satisfies clause j carry C_j.
struct Xi0 {
  IndId a = kNone;
  RoleId R = kNone;
  ConceptId G = kNone;
  std::vector<ConceptId> A;   // A_0..A_n
  std::vector<ConceptId> Tc;  // T_1..T_n (index 1-based)
  std::vector<ConceptId> Fc;
  std::vector<ConceptId> C;   // C_1..C_m (index 1-based)
};

Xi0 build_xi0(KB& kb, const CNF& phi) {
  const uint32_t n = phi.n, m = (uint32_t)phi.clauses.size();
  Xi0 x;
  x.a = kb.sym.individual_of("a");
  x.R = kb.sym.role_of("R");
  x.G = kb.sym.concept_of("G");
  x.A.resize(n + 1);
  for (uint32_t i = 0; i <= n; ++i) x.A[i] = kb.sym.concept_of("A_" + num(i));
  x.Tc.resize(n + 1);
  x.Fc.resize(n + 1);
  for (uint32_t i = 1; i <= n; ++i) {
    x.Tc[i] = kb.sym.concept_of("T_" + num(i));
    x.Fc[i] = kb.sym.concept_of("F_" + num(i));
  }
  x.C.resize(m + 1);
  for (uint32_t j = 1; j <= m; ++j) x.C[j] = kb.sym.concept_of("C_" + num(j));

  kb.concept_abox.push_back({x.A[0], x.a});
  for (uint32_t i = 1; i <= n; ++i) {
    kb.tbox.push_back(Axiom::exist_rhs(x.A[i - 1], x.R, x.Tc[i]));
    kb.tbox.push_back(Axiom::exist_rhs(x.A[i - 1], x.R, x.Fc[i]));
    kb.tbox.push_back(Axiom::sub_class(x.Tc[i], x.A[i]));
    kb.tbox.push_back(Axiom::sub_class(x.Fc[i], x.A[i]));
  }
  kb.tbox.push_back(Axiom::exist_rhs(x.A[n], x.R, x.G));
  std::set<std::pair<ConceptId, ConceptId>> seen;
  for (uint32_t j = 1; j <= m; ++j)
    for (int32_t lit : phi.clauses[j - 1]) {
      uint32_t i = (uint32_t)std::abs(lit);
      ConceptId lhs = lit > 0 ? x.Tc[i] : x.Fc[i];
      if (seen.emplace(lhs, x.C[j]).second)
        kb.tbox.push_back(Axiom::sub_class(lhs, x.C[j]));
    }
  return x;
}

// q_0: a root-to-leaf path a = p_0, ..., p_{n+1} through the tree.
std::vector<VarId> build_q0(QBuilder& b, const Xi0& x, uint32_t n) {
  std::vector<VarId> p(n + 2);
  for (uint32_t i = 0; i <= n + 1; ++i) p[i] = b.var("p_" + num(i));
  for (uint32_t i = 0; i <= n; ++i) {
    b.unary(x.A[i], p[i]);
    b.role_vv(x.R, p[i], p[i + 1]);
  }
  b.unary(x.G, p[n + 1]);
  return p;
}

}  // namespace

CNF parse_dimacs(const std::string& text) {
  CNF phi;
  uint32_t m_declared = 0;
  bool header = false;
  int ln = 0;
  std::istringstream in(text);
  std::string line;
  std::vector<int32_t> clause;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      if (!(ls >> p >> fmt >> phi.n >> m_declared) || fmt != "cnf")
        throw ParseError(ln, 1, "malformed DIMACS header", line);
      header = true;
      continue;
    }
    if (!header) throw ParseError(ln, 1, "clause before DIMACS header", line);
    int64_t lit;
    while (ls >> lit) {
      if (lit == 0) {
        phi.clauses.push_back(clause);
        clause.clear();
      } else if (std::abs(lit) > (int64_t)phi.n) {
        throw ParseError(ln, 1, "literal out of range", line);
      } else {
        clause.push_back((int32_t)lit);
      }
    }
    if (!ls.eof())
      throw ParseError(ln, 1, "expected an integer literal", line);
  }
  if (!header) throw ParseError(ln, 1, "missing DIMACS header", "");
  if (!clause.empty()) phi.clauses.push_back(clause);  // unterminated tail
  if (phi.clauses.size() != m_declared)
    throw ParseError(ln, 1, "clause count disagrees with the header", "");
  return phi;
}

bool brute_sat(const CNF& phi) {
  if (phi.n > 20)
    throw ResourceLimitError("brute_sat supports at most 20 variables");
  for (const auto& c : phi.clauses)
    if (c.empty()) return false;
  for (uint64_t bits = 0; bits < (1ull << phi.n); ++bits) {
    bool all = true;
    for (const auto& c : phi.clauses) {
      bool sat = false;
      for (int32_t lit : c) {
        uint32_t i = (uint32_t)std::abs(lit) - 1;
        if (((bits >> i) & 1) == (lit > 0 ? 1u : 0u)) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

HardInstance gen_filter_hard(const CNF& phi) {
  if (!phi.three_cnf())
    throw ShapeError("the filtering-hardness reduction needs a 3CNF formula");
  const uint32_t n = phi.n, m = (uint32_t)phi.clauses.size();
  HardInstance out;
  KB& kb = out.kb;
  IndId a = kb.sym.individual_of("a");
  ConceptId A = kb.sym.concept_of("A"), G = kb.sym.concept_of("G");
  RoleId R = kb.sym.role_of("R"), T = kb.sym.role_of("T");
  std::vector<ConceptId> C(m + 1);
  for (uint32_t j = 1; j <= m; ++j) C[j] = kb.sym.concept_of("C_" + num(j));
  std::vector<std::array<ConceptId, 4>> L(m + 1);
  std::vector<std::array<RoleId, 4>> S(m + 1);
  for (uint32_t j = 1; j <= m; ++j)
    for (uint32_t k = 1; k <= 3; ++k) {
      L[j][k] = kb.sym.concept_of("L_" + num(j) + "_" + num(k));
      S[j][k] = kb.sym.role_of("S_" + num(j) + "_" + num(k));
    }
  std::vector<RoleId> P(n + 1), N(n + 1), Ti(n + 1);
  for (uint32_t i = 1; i <= n; ++i) {
    P[i] = kb.sym.role_of("P_" + num(i));
    N[i] = kb.sym.role_of("N_" + num(i));
    Ti[i] = kb.sym.role_of("T_" + num(i));
  }

  kb.concept_abox.push_back({A, a});
  for (uint32_t j = 1; j <= m; ++j)
    kb.tbox.push_back(Axiom::exist_rhs(A, R, C[j]));
  kb.tbox.push_back(Axiom::exist_rhs(A, R, G));
  for (uint32_t j = 1; j <= m; ++j)
    for (uint32_t k = 1; k <= 3; ++k) {
      kb.tbox.push_back(Axiom::exist_rhs(C[j], S[j][k], L[j][k]));
      kb.tbox.push_back(Axiom::sub_class(L[j][k], A));
    }
  // S_{j,k} flows into P_i / N_i exactly when literal l_{j,k} is
  // consistent with v_i / with ¬v_i.
  for (uint32_t j = 1; j <= m; ++j)
    for (uint32_t k = 1; k <= 3; ++k) {
      int32_t lit = phi.clauses[j - 1][k - 1];
      uint32_t over = (uint32_t)std::abs(lit);
      for (uint32_t i = 1; i <= n; ++i) {
        if (over != i || lit > 0) kb.tbox.push_back(Axiom::sub_role(S[j][k], P[i]));
        if (over != i || lit < 0) kb.tbox.push_back(Axiom::sub_role(S[j][k], N[i]));
      }
    }
  for (uint32_t i = 1; i <= n; ++i) {
    kb.tbox.push_back(Axiom::sub_role(R, P[i]));
    kb.tbox.push_back(Axiom::sub_role(R, N[i]));
    kb.tbox.push_back(Axiom::trans(P[i]));
    kb.tbox.push_back(Axiom::trans(N[i]));
    kb.tbox.push_back(Axiom::sub_role(P[i], Ti[i]));
    kb.tbox.push_back(Axiom::sub_role(N[i], Ti[i]));
    kb.tbox.push_back(Axiom::sub_role(Ti[i], T));
  }

  QBuilder b;
  b.q.name = "q";
  VarId y = b.var("y");
  b.unary(G, y);
  for (uint32_t i = 1; i <= n; ++i) b.role_cv(Ti[i], a, y);
  out.expected_tau.push_back("aux:R:G");
  for (uint32_t j = 1; j <= m; ++j) {
    VarId z = b.var("z_" + num(j));
    b.unary(C[j], z);
    b.role_vv(T, z, y);
    out.expected_tau.push_back("aux:R:C_" + num(j));
  }
  out.query = std::move(b.q);
  return out;
}

HardInstance gen_acyclic_hard(const CNF& phi) {
  const uint32_t n = phi.n, m = (uint32_t)phi.clauses.size();
  HardInstance out;
  Xi0 x = build_xi0(out.kb, phi);
  KB& kb = out.kb;
  QBuilder b;
  b.q.name = "q";
  std::vector<VarId> p = build_q0(b, x, n);
  for (uint32_t j = 1; j <= m; ++j) {
    RoleId Sj = kb.sym.role_of("S_" + num(j));
    IndId cj = kb.sym.individual_of("c_" + num(j));
    ConceptId Hj = kb.sym.concept_of("H_" + num(j));
    kb.role_abox.push_back({x.R, cj, cj});
    // C_j ⊑ ∃S_j.{c_j}, via a helper filler pinned to the nominal.
    kb.tbox.push_back(Axiom::exist_rhs(x.C[j], Sj, Hj));
    kb.tbox.push_back(Axiom::nominal(Hj, cj));
    kb.tbox.push_back(Axiom::sub_role(x.R, Sj));

    // φ^j: a ladder that forces some tree node on the q_0 path to reach
    // the nominal loop of clause j.
    std::vector<VarId> xv(n + 1), yv(n + 1), zv(n + 2);
    VarId yj = b.var("y_" + num(j));
    for (uint32_t i = 0; i <= n; ++i) {
      xv[i] = b.var("x_" + num(j) + "_" + num(i));
      yv[i] = b.var("y_" + num(j) + "_" + num(i));
    }
    for (uint32_t i = 1; i <= n + 1; ++i) zv[i] = b.var("z_" + num(j) + "_" + num(i));
    b.role_vv(x.R, yj, xv[0]);
    for (uint32_t i = 1; i <= n; ++i) {
      b.role_vv(x.R, xv[i - 1], zv[i]);
      b.role_vv(Sj, yv[i - 1], zv[i]);
      b.role_vv(x.R, yv[i - 1], xv[i]);
    }
    b.role_vv(x.R, xv[n], zv[n + 1]);
    b.role_vv(Sj, yv[n], zv[n + 1]);
    b.role_vv(x.R, yv[n], p[n + 1]);
  }
  out.query = std::move(b.q);
  return out;
}

HardInstance gen_trans_hard(const CNF& phi) {
  const uint32_t n = phi.n, m = (uint32_t)phi.clauses.size();
  HardInstance out;
  Xi0 x = build_xi0(out.kb, phi);
  out.kb.tbox.push_back(Axiom::trans(x.R));
  QBuilder b;
  b.q.name = "q";
  std::vector<VarId> p = build_q0(b, x, n);
  for (uint32_t j = 1; j <= m; ++j) {
    VarId xj = b.var("x_" + num(j));
    b.unary(x.C[j], xj);
    b.role_vv(x.R, xj, p[n + 1]);
  }
  out.query = std::move(b.q);
  return out;
}

HardInstance gen_refl_hard(const CNF& phi) {
  const uint32_t n = phi.n, m = (uint32_t)phi.clauses.size();
  HardInstance out;
  Xi0 x = build_xi0(out.kb, phi);
  out.kb.tbox.push_back(Axiom::refl(x.R));
  QBuilder b;
  b.q.name = "q";
  std::vector<VarId> p = build_q0(b, x, n);
  for (uint32_t j = 1; j <= m; ++j) {
    // φ^j: a walk of length n+1 from a C_j node to the q_0 leaf; the
    // reflexive loops absorb the slack steps.
    VarId xj = b.var("x_" + num(j));
    std::vector<VarId> xv(n + 1);
    for (uint32_t i = 0; i <= n; ++i)
      xv[i] = b.var("x_" + num(j) + "_" + num(i));
    b.unary(x.C[j], xv[0]);
    b.role_vv(x.R, xj, xv[0]);
    for (uint32_t i = 1; i <= n; ++i) b.role_vv(x.R, xv[i - 1], xv[i]);
    b.role_vv(x.R, xv[n], p[n + 1]);
  }
  out.query = std::move(b.q);
  return out;
}

namespace {

// Canonical encoding of a formula up to variable permutation, polarity
// flips, and clause/literal order.
std::vector<int32_t> canon_cnf(const CNF& phi) {
  std::vector<uint32_t> perm(phi.n);
  for (uint32_t i = 0; i < phi.n; ++i) perm[i] = i;
  std::vector<int32_t> best;
  do {
    for (uint32_t flips = 0; flips < (1u << phi.n); ++flips) {
      std::vector<std::vector<int32_t>> cls;
      cls.reserve(phi.clauses.size());
      for (const auto& c : phi.clauses) {
        std::vector<int32_t> nc;
        nc.reserve(c.size());
        for (int32_t lit : c) {
          uint32_t i = (uint32_t)std::abs(lit) - 1;
          int32_t mapped = (int32_t)perm[i] + 1;
          bool pos = (lit > 0) != (((flips >> i) & 1) != 0);
          nc.push_back(pos ? mapped : -mapped);
        }
        std::sort(nc.begin(), nc.end());
        cls.push_back(std::move(nc));
      }
      std::sort(cls.begin(), cls.end());
      std::vector<int32_t> enc;
      for (const auto& c : cls) {
        enc.insert(enc.end(), c.begin(), c.end());
        enc.push_back(0);
      }
      if (best.empty() || enc < best) best = std::move(enc);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<CNF> exhaustive_3cnf(uint32_t max_n, uint32_t max_m) {
  std::vector<CNF> out;
  for (uint32_t n = 1; n <= max_n; ++n) {
    // All clauses: non-decreasing triples over the 2n literals.
    std::vector<int32_t> lits;
    for (uint32_t i = 1; i <= n; ++i) {
      lits.push_back((int32_t)i);
      lits.push_back(-(int32_t)i);
    }
    std::vector<std::vector<int32_t>> clauses;
    for (size_t a = 0; a < lits.size(); ++a)
      for (size_t b = a; b < lits.size(); ++b)
        for (size_t c = b; c < lits.size(); ++c)
          clauses.push_back({lits[a], lits[b], lits[c]});

    for (uint32_t m = 1; m <= max_m; ++m) {
      // Non-decreasing index tuples of length m over the clause list.
      std::vector<size_t> idx(m, 0);
      std::set<std::vector<int32_t>> seen;
      while (true) {
        CNF phi;
        phi.n = n;
        for (size_t k : idx) phi.clauses.push_back(clauses[k]);
        if (seen.insert(canon_cnf(phi)).second) out.push_back(std::move(phi));
        size_t k = m;
        while (k > 0 && idx[k - 1] + 1 == clauses.size()) --k;
        if (k == 0) break;
        size_t v = ++idx[k - 1];
        for (size_t t = k; t < m; ++t) idx[t] = v;
      }
    }
  }
  return out;
}

CNF random_3cnf(uint32_t n, uint32_t m, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> var(1, n);
  std::uniform_int_distribution<uint32_t> coin(0, 1);
  CNF phi;
  phi.n = n;
  for (uint32_t j = 0; j < m; ++j) {
    std::vector<int32_t> c;
    for (int k = 0; k < 3; ++k) {
      int32_t v = (int32_t)var(rng);
      c.push_back(coin(rng) ? v : -v);
    }
    phi.clauses.push_back(std::move(c));
  }
  return phi;
}

}  // namespace elq
