#include "elq/kb.h"

#include <algorithm>

namespace elq {

void RoleHierarchy::reset(uint32_t n_roles) {
  n_ = n_roles;
  closure_.assign((size_t)n_ * n_, 0);
  for (uint32_t r = 0; r < n_; ++r) closure_[(size_t)r * n_ + r] = 1;
  trans_.assign(n_, 0);
  refl_.assign(n_, 0);
  simple_.assign(n_, 1);
  subs_.assign(n_, {});
  closed_ = false;
}

void RoleHierarchy::add_inclusion(RoleId sub, RoleId super) {
  closure_[(size_t)sub * n_ + super] = 1;
  closed_ = false;
}

void RoleHierarchy::mark_transitive(RoleId r) {
  trans_[r] = 1;
  closed_ = false;
}

void RoleHierarchy::mark_reflexive(RoleId r) {
  refl_[r] = 1;
  closed_ = false;
}

void RoleHierarchy::close() {
  // Warshall closure; role counts are small in every workload.
  for (uint32_t k = 0; k < n_; ++k)
    for (uint32_t i = 0; i < n_; ++i)
      if (closure_[(size_t)i * n_ + k])
        for (uint32_t j = 0; j < n_; ++j)
          if (closure_[(size_t)k * n_ + j]) closure_[(size_t)i * n_ + j] = 1;

  simple_.assign(n_, 1);
  for (uint32_t s = 0; s < n_; ++s)
    if (trans_[s])
      for (uint32_t r = 0; r < n_; ++r)
        if (closure_[(size_t)s * n_ + r]) simple_[r] = 0;

  // subroles of r ordered ⊑*-minimal first: sort by number of own subroles.
  std::vector<uint32_t> sub_count(n_, 0);
  for (uint32_t p = 0; p < n_; ++p)
    for (uint32_t q = 0; q < n_; ++q)
      if (closure_[(size_t)q * n_ + p]) sub_count[p]++;
  for (uint32_t r = 0; r < n_; ++r) {
    subs_[r].clear();
    for (uint32_t p = 0; p < n_; ++p)
      if (closure_[(size_t)p * n_ + r]) subs_[r].push_back(p);
    std::sort(subs_[r].begin(), subs_[r].end(), [&](RoleId x, RoleId y) {
      if (sub_count[x] != sub_count[y]) return sub_count[x] < sub_count[y];
      return x < y;
    });
  }
  closed_ = true;
}

RoleHierarchy role_hierarchy(const KB& kb) {
  RoleHierarchy h(kb.sym.n_roles());
  for (const Axiom& ax : kb.tbox) {
    switch (ax.kind) {
      case AxiomKind::SubRole:
        h.add_inclusion(ax.s, ax.r);
        break;
      case AxiomKind::Trans:
        h.mark_transitive(ax.r);
        break;
      case AxiomKind::Refl:
        h.mark_reflexive(ax.r);
        break;
      default:
        break;
    }
  }
  h.close();
  return h;
}

bool is_simple(RoleId r, const RoleHierarchy& h) { return h.simple(r); }

ValidationReport validate_kb(const KB& kb) {
  ValidationReport rep;
  RoleHierarchy h = role_hierarchy(kb);
  auto bad_lhs = [&](ConceptId c) { return c == Symbols::kBot; };
  auto name = [&](RoleId r) { return kb.sym.role_name(r); };

  for (const Axiom& ax : kb.tbox) {
    switch (ax.kind) {
      case AxiomKind::SubClass:
      case AxiomKind::Nominal:
        if (bad_lhs(ax.a))
          rep.push_back({"Bot on the left-hand side of a subsumption"});
        break;
      case AxiomKind::Conj:
        if (bad_lhs(ax.a) || bad_lhs(ax.b))
          rep.push_back({"Bot on the left-hand side of a conjunction axiom"});
        break;
      case AxiomKind::ExistLhs:
        if (bad_lhs(ax.a))
          rep.push_back({"Bot as the filler of a left-hand existential"});
        break;
      case AxiomKind::ExistRhs:
        if (bad_lhs(ax.a))
          rep.push_back({"Bot on the left-hand side of an existential axiom"});
        if (ax.c == Symbols::kBot)
          rep.push_back({"Bot as the filler of a right-hand existential"});
        break;
      case AxiomKind::SelfRhs:
        if (bad_lhs(ax.a))
          rep.push_back({"Bot on the left-hand side of a Self axiom"});
        if (!h.simple(ax.r))
          rep.push_back({"non-simple role " + name(ax.r) +
                         " in a Self restriction"});
        break;
      case AxiomKind::SelfLhs:
        if (!h.simple(ax.r))
          rep.push_back({"non-simple role " + name(ax.r) +
                         " in a Self restriction"});
        break;
      default:
        break;
    }
  }
  return rep;
}

}  // namespace elq
