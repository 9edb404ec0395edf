// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/bits.hpp"
#include "ifds/decomp.hpp"
#include "ifds/samectx.hpp"
#include "ifds/summaries.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ifds {

// Per exploded vertex (u,d): the call slots (c,d') of u's own function that
// (u,d) reaches without leaving the function (summary edges included).
struct CallReachLists {
  std::uint32_t dstar = 0;
  std::vector<std::vector<std::pair<Vid, Fact>>> lists; // indexed by exploded id

  const std::vector<std::pair<Vid, Fact>> &at(Xid x) const { return lists[x]; }
};

CallReachLists call_reach_lists(const SummaryGraph &sg);

// Call graph lifted to fact space: node (f,d) stands for "f entered while d
// holds at its start". Edge (f_i,d1) -> (f_j,d2) iff some call vertex c of
// f_i calling f_j is reachable from (start_i,d1) in-function at a fact d3
// that the call maps to d2.
struct ExplodedCallGraph {
  std::uint32_t n_functions = 0, dstar = 0;
  std::vector<std::vector<std::uint32_t>> succ, pred;

  std::uint32_t node(std::uint32_t fn, Fact d) const { return fn * dstar + d; }
  std::uint32_t n_nodes() const { return n_functions * dstar; }
  std::size_t n_edges() const;
};

ExplodedCallGraph exploded_call_graph(const SameCtxIndex &sc);

// Ancestor forest for the exploded call graph, obtained by expanding every
// node of a call-graph elimination forest into a chain of |D*| nodes. Its
// depth is exactly (input depth) * |D*|, and every exploded-call-graph edge
// still joins an ancestor-descendant pair.
struct ExpandedForest {
  std::uint32_t n_functions = 0, dstar = 0;
  std::vector<std::int32_t> parent;  // -1 at roots
  std::vector<std::uint32_t> depth;  // roots at 1
  std::vector<std::uint32_t> pre;    // preorder rank; subtrees are contiguous
  std::vector<std::uint32_t> sub;    // subtree size
  std::vector<std::vector<std::uint32_t>> anc; // root-first ancestor chain, self last

  std::uint32_t node(std::uint32_t fn, Fact d) const { return fn * dstar + d; }
  std::uint32_t n_nodes() const { return n_functions * dstar; }
  std::uint32_t max_depth() const;
};

ExpandedForest expand_forest(const ElimForest &f, std::uint32_t n_functions,
                             std::uint32_t dstar);

// Recomputes depth/pre/sub/anc from n_functions, dstar and parent; used when
// rehydrating a serialized forest.
void finish_forest(ExpandedForest &t);

// Subtree-restricted reachability: down[y] bit r set iff y reaches the
// descendant ranked r in its subtree using only subtree nodes; up[y] mirrors
// it with the direction reversed. climb/drop re-index the same facts per
// descendant: climb[u] bit i set iff u reaches its i-th root-first ancestor
// inside that ancestor's subtree, drop[v] likewise for ancestor-to-v.
struct UpDownTables {
  std::vector<BitVec> up, down;    // per node; bit r = preorder offset in subtree
  std::vector<BitVec> climb, drop; // per node; bit i = index into ExpandedForest::anc
};

UpDownTables up_down_tables(const ExplodedCallGraph &cg, const ExpandedForest &t);

// Rebuilds climb/drop from up/down; used after deserializing the two
// subtree tables.
void finish_tables(const ExpandedForest &t, UpDownTables &tbl);

// Full reachability on the exploded call graph: scans the common ancestors
// of u and v for one that u reaches from below and that reaches down to v.
bool call_graph_reachable(const UpDownTables &tbl, const ExpandedForest &t,
                          std::uint32_t u, std::uint32_t v);

} // namespace ifds
