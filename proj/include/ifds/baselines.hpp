// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/arena.hpp"
#include "ifds/bits.hpp"
#include "ifds/summaries.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ifds {

// Hard cap on distinct (vertex, stack) configurations the Dyck searches may
// visit before giving up with BoundExceeded.
inline constexpr std::size_t kDyckConfigCap = 1u << 22;

// Brute-force valid-path oracle: explicit-state search over pairs of an
// exploded vertex and a call stack of pending return-site vertices. Pushes on
// call-start edges, pops only on the matching exit-return edge; a pop on an
// empty stack is invalid in both modes. SameContext acceptance additionally
// requires an empty stack at the target.
//
// stack_bound limits the stack depth (0 = |F|·|D*|·|V|, which never binds
// when the call graph is acyclic). If the search exhausts its frontier the
// answer is exact; if a bound was hit first, BoundExceeded is thrown rather
// than returning a possibly-wrong negative. A positive found before any
// bound is always returned.
bool dyck_reach(const ExplodedSupergraph &ex, Xid src, Xid dst, PathMode mode,
                std::uint32_t stack_bound = 0, std::size_t config_cap = kDyckConfigCap);

// All accepted targets from src in one search. Throws BoundExceeded whenever
// a bound was hit (a partial set would be silently wrong).
BitVec dyck_reach_set(const ExplodedSupergraph &ex, Xid src, PathMode mode,
                      std::uint32_t stack_bound = 0, std::size_t config_cap = kDyckConfigCap);

// Classical tabulation baseline, independent of the engine's own summary
// machinery: discovers same-context path edges from activated origins and
// call-site summary edges, chaining activation across call-start edges.
class DemandState {
public:
  explicit DemandState(const ExplodedSupergraph &ex);
  ~DemandState();
  DemandState(DemandState &&) noexcept;
  DemandState &operator=(DemandState &&) noexcept;

  // Interprocedural reachability from (u1,d1) to (u2,d2), packed as exploded
  // ids. Memo tables persist across queries and only ever grow.
  bool query(Xid src, Xid dst);

  // Total path edges tabulated so far; unchanged by a repeated query.
  std::uint64_t explored() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;

  friend BitVec exhaustive_tabulate(const ExplodedSupergraph &ex, const std::vector<Xid> &seeds);
};

inline bool demand_tabulate(DemandState &state, Xid src, Xid dst) {
  return state.query(src, dst);
}

// One-shot full tabulation: every exploded vertex reachable from the seed
// set along interprocedurally valid paths.
BitVec exhaustive_tabulate(const ExplodedSupergraph &ex, const std::vector<Xid> &seeds);

} // namespace ifds
