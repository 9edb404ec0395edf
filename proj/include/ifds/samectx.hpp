// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/bits.hpp"
#include "ifds/decomp.hpp"
#include "ifds/summaries.hpp"

#include <cstdint>
#include <vector>

namespace ifds {

// Same-context reachability tables of one function. Slots pack (local vertex,
// fact) as v * |D*| + d. After preprocessing:
//   fwd[s] ⊇ every reachable slot sharing a bag with s, plus every reachable
//            slot living in an ancestor bag of s's bags;
//   rev[s] ⊇ the mirrored predecessor sets.
// Both only record true same-context reachability, which is what the
// two-sided meet-in-the-bag query relies on.
struct FunctionContextIndex {
  std::uint32_t fn = 0;
  TreeDecomposition balanced;
  std::vector<std::uint32_t> bag_depth;  // per bag, root at 0
  std::vector<std::uint32_t> designated; // per local vertex: its shallowest bag
  std::vector<BitVec> fwd, rev;
  LcaIndex lca; // over balanced bags

  std::uint64_t table_bits() const;
};

struct SameCtxIndex {
  const SummaryGraph *sg = nullptr; // non-owning
  std::uint32_t dstar = 0;
  std::vector<FunctionContextIndex> fns;
};

// Builds one function's tables against a balanced decomposition of its CFG.
// Throws DecompositionMismatch when the decomposition does not cover the
// function's CFG skeleton.
FunctionContextIndex build_function_index(const SummaryGraph &sg, std::uint32_t fn,
                                          const TreeDecomposition &balanced);

// Convenience pipeline: min-fill, balance, and build, for every function.
SameCtxIndex preprocess_same_context(const SummaryGraph &sg);

// Is there a same-context path (u1,d1) -> (u2,d2)? False whenever the two
// vertices live in different functions.
bool same_context_query(const SameCtxIndex &idx, Vid u1, Fact d1, Vid u2, Fact d2);

} // namespace ifds
