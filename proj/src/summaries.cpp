// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/summaries.hpp"

#include <bit>
#include <deque>

namespace ifds {

std::uint64_t SummaryGraph::n_summary_edges() const {
  std::uint64_t c = 0;
  for (const FlowRelation &r : summary) c += r.pairs().size();
  return c;
}

SummaryGraph compute_summaries(const ExplodedSupergraph &ex, WorklistOrder order) {
  const Arena &a = *ex.arena;
  const std::uint32_t ds = ex.dstar;

  SummaryGraph sg;
  sg.ex = &ex;
  sg.summary.assign(a.calls.size(), FlowRelation(ds));
  sg.chi.assign(a.functions.size(), FlowRelation(ds));

  // Partial summaries (d1, u, d2): "some same-context path carries fact d1 at
  // the owning function's start to fact d2 at u". One dense bit table serves
  // as both the seen-set and the result.
  BitVec seen(static_cast<std::size_t>(a.n_vertices()) * ds * ds);
  auto slot = [&](Vid u, Fact d2, Fact d1) {
    return (static_cast<std::size_t>(u) * ds + d2) * ds + d1;
  };

  std::deque<std::uint64_t> work; // packs (xid(u,d2), d1)
  auto push = [&](Vid u, Fact d2, Fact d1) {
    std::size_t s = slot(u, d2, d1);
    if (seen.test(s)) return;
    seen.set(s);
    work.push_back(static_cast<std::uint64_t>(ex.xid(u, d2)) * ds + d1);
  };

  for (const Function &f : a.functions)
    for (Fact d = 0; d < ds; ++d) push(f.start, d, d);

  // Call sites per callee, for the exit rule.
  std::vector<std::vector<std::uint32_t>> sites_into(a.functions.size());
  for (std::uint32_t ci = 0; ci < a.calls.size(); ++ci)
    sites_into[a.calls[ci].callee].push_back(ci);

  while (!work.empty()) {
    std::uint64_t item;
    if (order == WorklistOrder::Fifo) {
      item = work.front();
      work.pop_front();
    } else {
      item = work.back();
      work.pop_back();
    }
    const Fact d1 = static_cast<Fact>(item % ds);
    const Xid x = static_cast<Xid>(item / ds);
    const Vid u2 = ex.vertex(x);
    const Fact d2 = ex.fact(x);
    const std::uint32_t fi = a.fn_of[u2];

    if (u2 != a.functions[fi].exit) {
      // Extend along intraprocedural and already-known summary edges.
      for (const XEdge &e : ex.adj[x])
        if (e.cls == EdgeClass::Intra || e.cls == EdgeClass::CallRet)
          push(ex.vertex(e.to), ex.fact(e.to), d1);
      if (a.kind[u2] == VertexKind::Call) {
        const std::int32_t ci = a.call_of[u2];
        const CallSite &site = a.calls[ci];
        std::uint64_t row = sg.summary[ci].row(d2);
        while (row) {
          Fact d4 = static_cast<Fact>(std::countr_zero(row));
          push(site.ret_site, d4, d1);
          row &= row - 1;
        }
      }
      continue;
    }

    // Reached the exit: each matching caller gains a summary edge, and every
    // partial summary parked at the call vertex advances to the return site.
    for (std::uint32_t ci : sites_into[fi]) {
      const CallSite &site = a.calls[ci];
      for (Fact d3 = 0; d3 < ds; ++d3) {
        if (!site.call_rel.has(d3, d1)) continue;
        for (Fact d4 = 0; d4 < ds; ++d4) {
          if (!site.ret_rel.has(d2, d4)) continue;
          if (sg.summary[ci].has(d3, d4)) continue;
          sg.summary[ci].add(d3, d4);
          for (Fact d5 = 0; d5 < ds; ++d5)
            if (seen.test(slot(site.call, d3, d5))) push(site.ret_site, d4, d5);
        }
      }
    }
  }

  for (std::uint32_t fi = 0; fi < a.functions.size(); ++fi) {
    const Vid e = a.functions[fi].exit;
    for (Fact d1 = 0; d1 < ds; ++d1)
      for (Fact d2 = 0; d2 < ds; ++d2)
        if (seen.test(slot(e, d2, d1))) sg.chi[fi].add(d1, d2);
  }
  return sg;
}

bool reach_view(const View &v, Xid src, Xid dst) {
  if (src == dst) return true;
  BitVec seen(v.n_xvertices());
  seen.set(src);
  std::vector<Xid> stack{src};
  bool found = false;
  while (!stack.empty() && !found) {
    Xid x = stack.back();
    stack.pop_back();
    v.for_each_out(x, [&](Xid y) {
      if (found || seen.test(y)) return;
      if (y == dst) {
        found = true;
        return;
      }
      seen.set(y);
      stack.push_back(y);
    });
  }
  return found;
}

BitVec reach_set_view(const View &v, Xid src) {
  BitVec seen(v.n_xvertices());
  seen.set(src);
  std::vector<Xid> stack{src};
  while (!stack.empty()) {
    Xid x = stack.back();
    stack.pop_back();
    v.for_each_out(x, [&](Xid y) {
      if (seen.test(y)) return;
      seen.set(y);
      stack.push_back(y);
    });
  }
  return seen;
}

} // namespace ifds
