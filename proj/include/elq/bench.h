#pragma once
// Deterministic synthetic benchmark: an organization-hierarchy KB whose
// ABox grows linearly with the scale factor, plus a fixed set of query
// templates, one of which walks transitive sub-organization chains.

#include <cstdint>
#include <vector>

#include "elq/kb.h"

namespace elq {

struct BenchSpec {
  uint32_t scale = 1;  // number of organizations
  uint64_t seed = 7;
  uint32_t depth = 4;  // length of each sub-organization chain
};

struct BenchOutput {
  KB kb;
  std::vector<CQ> queries;  // five templates; queries[2] is the chain query
};

// Identical bytes for identical (scale, seed, depth).
BenchOutput gen_bench(const BenchSpec& spec);

}  // namespace elq
