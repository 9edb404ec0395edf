// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/arena.hpp"
#include "ifds/bits.hpp"

#include <bit>
#include <cstdint>
#include <vector>

namespace ifds {

// Which edges a path may use. SameContext paths stay within one function
// (calls only traversed through their summarized effect); Interprocedural
// paths may additionally descend into callees and never return.
enum class PathMode : std::uint8_t { SameContext, Interprocedural };

enum class WorklistOrder : std::uint8_t { Fifo, Lifo };

// Exploded supergraph augmented with discovered call-site summary edges and
// per-function start-to-exit summary relations.
struct SummaryGraph {
  const ExplodedSupergraph *ex = nullptr; // non-owning
  std::vector<FlowRelation> summary;      // per call site: (d3,d4) edges call -> ret-site
  std::vector<FlowRelation> chi;          // per function: start fact -> exit fact

  std::uint64_t n_summary_edges() const;
};

// Worklist computation of all call-site summaries. The order knob only
// changes the processing sequence; the fixpoint is order-independent.
SummaryGraph compute_summaries(const ExplodedSupergraph &ex,
                               WorklistOrder order = WorklistOrder::Fifo);

// Read-only filtered edge view of an augmented exploded supergraph.
// Exit-to-return-site edges are never part of a view: their effect is
// represented by the summary edges instead.
class View {
public:
  View(const SummaryGraph &sg, PathMode mode) : sg_(&sg), mode_(mode) {}

  PathMode mode() const { return mode_; }
  const SummaryGraph &graph() const { return *sg_; }
  std::size_t n_xvertices() const { return sg_->ex->n_xvertices(); }

  template <class Fn> void for_each_out(Xid x, Fn &&fn) const {
    const ExplodedSupergraph &ex = *sg_->ex;
    for (const XEdge &e : ex.adj[x]) {
      switch (e.cls) {
      case EdgeClass::Intra:
      case EdgeClass::CallRet:
        fn(e.to);
        break;
      case EdgeClass::CallStart:
        if (mode_ == PathMode::Interprocedural) fn(e.to);
        break;
      case EdgeClass::ExitRet:
        break;
      }
    }
    const Arena &a = *ex.arena;
    Vid v = ex.vertex(x);
    if (a.kind[v] == VertexKind::Call) {
      const CallSite &site = a.calls[a.call_of[v]];
      std::uint64_t row = sg_->summary[a.call_of[v]].row(ex.fact(x));
      while (row) {
        Fact d = static_cast<Fact>(std::countr_zero(row));
        fn(ex.xid(site.ret_site, d));
        row &= row - 1;
      }
    }
  }

private:
  const SummaryGraph *sg_;
  PathMode mode_;
};

// Plain graph search over a view; the workhorse of the per-query baseline.
bool reach_view(const View &v, Xid src, Xid dst);

// All view-reachable exploded nodes from src (src included).
BitVec reach_set_view(const View &v, Xid src);

} // namespace ifds
