#pragma once
// Query-shape classification and the polynomial entailment procedure for
// arborescent Boolean queries over stores whose rule base avoids
// transitivity, reflexivity, and self restrictions.

#include "elq/store.h"

namespace elq {

struct QueryShape {
  enum Kind : uint8_t { Cyclic, Acyclic, Arborescent } kind = Cyclic;
  VarId root = kNone;  // set iff Arborescent
};

// dgraph(q) has an edge ⟨x,y⟩ per R(x,y) over variables; Acyclic iff the
// undirected simple graph is acyclic; Arborescent iff additionally the
// query has no individuals and the graph is a rooted tree with every edge
// oriented toward the root. A single variable with no binary atoms is the
// degenerate rooted tree.
QueryShape classify_query(const CQ& q);

// Bottom-up evaluation of the level table: per variable set V, the
// individuals that can simultaneously host V's subtree constraints.
// Returns true iff the set for the root is nonempty. Throws ShapeError if
// q is not arborescent and DialectError if the store's rule base has
// transitive, reflexive, or self-restriction axioms.
bool entails_arborescent(const FactStore& st, const CQ& q);

}  // namespace elq
