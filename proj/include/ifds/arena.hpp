// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/errors.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ifds {

using Vid = std::uint32_t;  // global supergraph vertex id, dense across functions
using Fact = std::uint32_t; // index into D*; 0 is always the zero fact
using Xid = std::uint32_t;  // exploded vertex id: vid * |D*| + fact

enum class VertexKind : std::uint8_t { Start, Exit, Call, RetSite, Plain };

const char *to_string(VertexKind k);

// Distributive flow function in graph form: a bipartite relation over D*.
// Row s is the bit mask of facts produced from s. Documents require (0,0) in
// every relation; this container itself does not enforce it, so it can also
// hold discovered summary relations (where row 0 may legitimately be empty).
class FlowRelation {
public:
  FlowRelation() = default;
  explicit FlowRelation(std::uint32_t dstar) : rows_(dstar, 0) {}

  static FlowRelation identity(std::uint32_t dstar);

  std::uint32_t dstar() const { return static_cast<std::uint32_t>(rows_.size()); }
  bool empty() const {
    for (auto r : rows_) if (r) return false;
    return true;
  }

  bool has(Fact s, Fact d) const { return (rows_[s] >> d) & 1u; }
  void add(Fact s, Fact d) { rows_[s] |= std::uint64_t(1) << d; }
  std::uint64_t row(Fact s) const { return rows_[s]; }

  // All (source, target) pairs, sorted lexicographically.
  std::vector<std::pair<Fact, Fact>> pairs() const;

  bool operator==(const FlowRelation &) const = default;

private:
  std::vector<std::uint64_t> rows_;
};

// Relational composition: first r1, then r2. Throws DomainMismatch when the
// two relations range over different fact domains.
FlowRelation compose_relations(const FlowRelation &r1, const FlowRelation &r2);

// Image of a fact set (bit mask over D*) under a relation.
std::uint64_t apply_relation(const FlowRelation &r, std::uint64_t facts);

// Intraprocedural edge; endpoints are global vertex ids within one function.
// The call-to-return-site edge of a call vertex is stored here as well.
struct Edge {
  Vid from = 0, to = 0;
  FlowRelation rel;
};

struct CallSite {
  Vid call = 0;              // Call vertex (global id)
  Vid ret_site = 0;          // its RetSite partner (global id, same function)
  std::uint32_t callee = 0;  // function index
  FlowRelation call_rel;     // relation on the call-start edge
  FlowRelation ret_rel;      // relation on the exit-return-site edge
};

struct Function {
  std::string name;
  Vid first = 0;                        // global id of this function's vertex 0
  std::uint32_t n_vertices = 0;
  Vid start = 0, exit = 0;              // global ids
  std::vector<Edge> edges;              // intraprocedural, global ids
  std::vector<std::uint32_t> call_sites; // indices into Arena::calls
};

// A complete analysis instance: supergraph, fact domain, flow relations.
struct Arena {
  std::vector<std::string> facts; // data fact names; fact i+1 in relations
  std::uint32_t bandwidth = 4;
  std::vector<Function> functions;
  std::vector<CallSite> calls;

  // Per-global-vertex tables.
  std::vector<VertexKind> kind;
  std::vector<std::uint32_t> fn_of;  // owning function index
  std::vector<std::int32_t> call_of; // call-site index for Call/RetSite, else -1

  std::uint32_t dstar() const { return static_cast<std::uint32_t>(facts.size()) + 1; }
  std::uint32_t n_vertices() const { return static_cast<std::uint32_t>(kind.size()); }
  std::uint32_t fg(Vid v) const { return fn_of.at(v); }

  // Human-readable vertex label, e.g. "main/2".
  std::string vertex_name(Vid v) const;
};

// Loads and validates an arena document. With fix_zero set, missing (0,0)
// pairs are inserted into every relation instead of being rejected.
Arena load_arena(std::istream &in, bool fix_zero = false);
Arena load_arena_file(const std::string &path, bool fix_zero = false);
Arena load_arena_string(const std::string &text, bool fix_zero = false);

// Canonical compact JSON round-trip of an arena (sorted keys, no whitespace).
// Two arenas with equal canonical documents are the same instance.
std::string canonical_document(const Arena &a);

// SHA-256 of the canonical document.
std::array<unsigned char, 32> fingerprint(const Arena &a);

enum class EdgeClass : std::uint8_t {
  Intra,     // ordinary intraprocedural edge
  CallRet,   // call vertex to its own return site
  CallStart, // call vertex into callee start
  ExitRet,   // callee exit back to the return site
};

struct XEdge {
  Xid to = 0;
  EdgeClass cls = EdgeClass::Intra;
  auto operator<=>(const XEdge &) const = default;
};

// Exploded supergraph: one node per (vertex, fact) pair, adjacency grouped by
// source node and sorted for deterministic iteration.
struct ExplodedSupergraph {
  const Arena *arena = nullptr; // non-owning
  std::uint32_t dstar = 0;
  std::vector<std::vector<XEdge>> adj; // size n_vertices * dstar

  Xid xid(Vid v, Fact d) const { return v * dstar + d; }
  Vid vertex(Xid x) const { return x / dstar; }
  Fact fact(Xid x) const { return x % dstar; }
  std::size_t n_xvertices() const { return adj.size(); }
  std::uint64_t n_edges() const;
};

ExplodedSupergraph build_exploded(const Arena &a);

// Function-level call graph (indices into Arena::functions). Multi-edges are
// collapsed; edge_sites[f][k] lists the call sites (indices into Arena::calls)
// realizing the edge f -> callees[f][k].
struct CallGraph {
  std::uint32_t n = 0;
  std::vector<std::vector<std::uint32_t>> callees; // sorted, deduplicated
  std::vector<std::vector<std::uint32_t>> callers; // reverse, sorted, deduplicated
  std::vector<std::vector<std::vector<std::uint32_t>>> edge_sites; // parallel to callees
};

CallGraph build_call_graph(const Arena &a);

} // namespace ifds
