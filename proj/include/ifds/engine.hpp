// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/arena.hpp"
#include "ifds/calldepth.hpp"
#include "ifds/samectx.hpp"
#include "ifds/summaries.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ifds {

inline constexpr char kIndexMagic[8] = {'I', 'F', 'D', 'S', 'I', 'D', 'X', '1'};
inline constexpr std::uint16_t kIndexVersion = 1;

// Re-verifiable sketch of one accepting path, in three legs: an in-function
// stretch from the query source to a call vertex, a walk through the
// exploded call graph, and a final same-context leg from the target
// function's start.
struct Witness {
  bool same_context = false; // true: the whole path is one same-context leg
  Vid call = 0;              // call vertex reached from (u1,d1) in-function
  Fact call_fact = 0;
  std::uint32_t entry_node = 0; // exploded-call-graph node behind that call
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cg_edges; // consecutive
  Fact final_fact = 0; // fact at fn(u2)'s start opening the last leg
};

struct QueryResult {
  bool verdict = false;
  std::optional<Witness> witness;
};

// Everything preprocessing produces, self-contained and immutable. The
// linked stages live behind stable pointers so the index can be moved.
struct QueryIndex {
  std::unique_ptr<Arena> arena;
  std::unique_ptr<ExplodedSupergraph> ex;
  std::unique_ptr<SummaryGraph> sg;
  SameCtxIndex sc;
  CallReachLists reach;
  ExplodedCallGraph cg;
  ExpandedForest forest;
  UpDownTables updown;
  // Per function, per entry fact d: bit (local_vertex * |D*| + d2) set iff
  // (start,d) reaches (vertex,d2) in-context. The hot rows for the final leg
  // of cross-function queries; derived, so never serialized.
  std::vector<std::vector<BitVec>> entry_rows;
  std::array<unsigned char, 32> fp{};
};

// Runs the full pipeline: summaries, per-function context tables, call-reach
// lists, exploded call graph, ancestor forest, up/down tables. Deterministic
// for a fixed arena.
QueryIndex preprocess(const Arena &a);

// Is (u2,d2) reachable from (u1,d1) along an interprocedurally valid path?
QueryResult query(const QueryIndex &idx, Vid u1, Fact d1, Vid u2, Fact d2,
                  bool want_witness = false);

// Facts d2 (zero fact excluded) reachable at u2 from (u1,d1) for any d1 in
// d1s or the zero fact; sorted ascending.
std::vector<Fact> mivp(const QueryIndex &idx, Vid u1, const std::vector<Fact> &d1s, Vid u2);

// Binary index container: magic, version, arena fingerprint, then length-
// and checksum-framed sections (the arena document itself is section 0, so
// a saved index is self-contained).
void save_index(const QueryIndex &idx, std::ostream &out);
void save_index_file(const QueryIndex &idx, const std::string &path);
QueryIndex load_index(std::istream &in);
QueryIndex load_index_file(const std::string &path);

// Verifies the index was built from exactly this arena; throws IndexMismatch.
void ensure_match(const QueryIndex &idx, const Arena &a);

} // namespace ifds
