#pragma once
// NP-hardness instance generators: CNF formulas compiled into KB/query
// pairs whose Boolean entailment coincides with satisfiability of the
// formula, plus a brute-force SAT oracle and formula enumerators used by
// the equivalence tests.

#include <cstdint>
#include <string>
#include <vector>

#include "elq/kb.h"

namespace elq {

struct CNF {
  uint32_t n = 0;                             // variables v_1..v_n
  std::vector<std::vector<int32_t>> clauses;  // signed 1-based literals
  bool three_cnf() const {
    for (const auto& c : clauses)
      if (c.size() != 3) return false;
    return true;
  }
};

// DIMACS cnf format; throws ParseError on malformed input.
CNF parse_dimacs(const std::string& text);

// Exhaustive truth-table check; supports at most 20 variables.
bool brute_sat(const CNF& phi);

struct HardInstance {
  KB kb;
  CQ query;  // Boolean
  // The unique candidate answer, one individual name per query variable
  // (aux individuals by their aux:<role>:<concept> names). Only the
  // filtering-hardness generator sets this.
  std::vector<std::string> expected_tau;
};

// Filtering is NP-hard: instance with a single candidate answer whose
// soundness check succeeds iff phi is satisfiable. Requires 3CNF.
HardInstance gen_filter_hard(const CNF& phi);
// Acyclic queries are NP-hard even over plain ELHO KBs.
HardInstance gen_acyclic_hard(const CNF& phi);
// Arborescent queries are NP-hard with one transitivity axiom.
HardInstance gen_trans_hard(const CNF& phi);
// Arborescent queries are NP-hard with one reflexivity axiom.
HardInstance gen_refl_hard(const CNF& phi);

// All 3CNF formulas with n variables (n <= max_n) and m clauses
// (m <= max_m), deduplicated up to variable permutation, polarity flips,
// and clause/literal order.
std::vector<CNF> exhaustive_3cnf(uint32_t max_n, uint32_t max_m);

// m clauses of three literals drawn independently and uniformly.
CNF random_3cnf(uint32_t n, uint32_t m, uint64_t seed);

}  // namespace elq
