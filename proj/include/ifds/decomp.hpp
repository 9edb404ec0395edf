// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/arena.hpp"
#include "ifds/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ifds {

// Simple undirected graph used for structural decompositions. Adjacency lists
// are kept sorted and free of duplicates and self loops.
struct UGraph {
  std::uint32_t n = 0;
  std::vector<std::vector<std::uint32_t>> adj;

  explicit UGraph(std::uint32_t n = 0) : n(n), adj(n) {}
  void add_edge(std::uint32_t u, std::uint32_t v);
  std::uint64_t n_edges() const;

  // Undirected skeleton of one function's CFG (local vertex ids). Includes
  // the call-to-return-site edges; interprocedural edges are not part of it.
  static UGraph cfg_skeleton(const Arena &a, std::uint32_t fn);
  static UGraph from_call_graph(const CallGraph &c);
};

// Rooted tree decomposition. Bags hold sorted vertex ids; parent is -1 for
// the root. Constructions in this module always produce a single root (forest
// components are joined under an empty bag when needed).
struct TreeDecomposition {
  std::vector<std::vector<std::uint32_t>> bags;
  std::vector<std::int32_t> parent;
  std::int32_t root = -1;

  int width() const;  // max bag size - 1; -1 when there are no bags
  int height() const; // bags on the longest root-to-leaf path
  std::vector<std::vector<std::uint32_t>> children() const;
};

enum class TdViolation : std::uint8_t {
  None,
  Structure,      // parent pointers do not form a rooted tree
  VertexCoverage, // some vertex is in no bag
  EdgeCoverage,   // some edge has no bag containing both endpoints
  Connectivity,   // some vertex's bags are disconnected in the tree
};

struct TdVerdict {
  TdViolation kind = TdViolation::None;
  std::uint32_t vertex = 0;                    // witness for Vertex/Connectivity
  std::pair<std::uint32_t, std::uint32_t> edge{0, 0}; // witness for EdgeCoverage
  std::string message;
  bool ok() const { return kind == TdViolation::None; }
};

TdVerdict verify_decomposition(const UGraph &g, const TreeDecomposition &t);

// Min-fill elimination heuristic; ties broken toward the lowest vertex id.
TreeDecomposition decompose_minfill(const UGraph &g);

// Rebalances a decomposition into a binary tree of height at most
// 4*ceil(log2(#bags+1)) + 4 while growing the width to at most 3*(w+1) - 1.
TreeDecomposition balance_decomposition(const TreeDecomposition &t);

// Elimination forest (treedepth decomposition): every graph edge connects an
// ancestor-descendant pair. Roots have parent -1 and depth 1.
struct ElimForest {
  std::vector<std::int32_t> parent;
  std::vector<std::uint32_t> depth;

  std::uint32_t n() const { return static_cast<std::uint32_t>(parent.size()); }
  std::uint32_t max_depth() const;
};

// Nested dissection over a min-fill decomposition; separators are greedily
// shrunk, so complete graphs come out as a single chain of depth n.
ElimForest elimination_forest(const UGraph &g);

struct EfVerdict {
  bool ok = true;
  std::pair<std::uint32_t, std::uint32_t> edge{0, 0}; // first incomparable edge
  std::string message;
};

EfVerdict verify_elim_forest(const UGraph &g, const ElimForest &f);

// Constant-time lowest common ancestor over a rooted forest (Euler tour plus
// sparse minimum table). A virtual root is added internally so the table is
// well formed; queries across distinct trees throw DifferentTrees.
class LcaIndex {
public:
  LcaIndex() = default;
  explicit LcaIndex(const std::vector<std::int32_t> &parent);

  std::uint32_t lca(std::uint32_t u, std::uint32_t v) const;
  std::uint32_t depth(std::uint32_t u) const { return depth_[u] - 1; } // roots at 0
  std::uint32_t size() const { return n_; }

private:
  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> first_;          // first Euler occurrence
  std::vector<std::uint32_t> euler_;          // vertex per Euler slot
  std::vector<std::vector<std::uint32_t>> sp_; // sparse table of argmin depth
  std::uint32_t virtual_root_ = 0;

  std::uint32_t argmin(std::uint32_t a, std::uint32_t b) const;
};

} // namespace ifds
