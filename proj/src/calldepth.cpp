// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/calldepth.hpp"

#include "ifds/errors.hpp"

#include <algorithm>
#include <numeric>

namespace ifds {

CallReachLists call_reach_lists(const SummaryGraph &sg) {
  const ExplodedSupergraph &ex = *sg.ex;
  const Arena &a = *ex.arena;
  const std::uint32_t ds = ex.dstar;
  View view(sg, PathMode::SameContext);

  CallReachLists out;
  out.dstar = ds;
  out.lists.resize(ex.n_xvertices());

  std::vector<std::uint32_t> stack;
  for (const Function &f : a.functions) {
    if (f.call_sites.empty())
      continue;
    // Transpose the function's in-context slice of the view once, then run
    // one backward search per call slot.
    const std::uint32_t base = f.first * ds, nslots = f.n_vertices * ds;
    std::vector<std::vector<std::uint32_t>> radj(nslots);
    for (std::uint32_t s = 0; s < nslots; ++s)
      view.for_each_out(base + s, [&](Xid to) { radj[to - base].push_back(s); });
    std::vector<std::uint32_t> seen(nslots, 0);
    std::uint32_t stamp = 0;
    for (std::uint32_t ci : f.call_sites) {
      const CallSite &cs = a.calls[ci];
      for (Fact d = 0; d < ds; ++d) {
        ++stamp;
        stack.assign(1, (cs.call - f.first) * ds + d);
        seen[stack[0]] = stamp;
        while (!stack.empty()) {
          const std::uint32_t s = stack.back();
          stack.pop_back();
          out.lists[base + s].emplace_back(cs.call, d);
          for (std::uint32_t p : radj[s])
            if (seen[p] != stamp) {
              seen[p] = stamp;
              stack.push_back(p);
            }
        }
      }
    }
  }
  for (auto &l : out.lists)
    std::sort(l.begin(), l.end());
  return out;
}

std::size_t ExplodedCallGraph::n_edges() const {
  std::size_t m = 0;
  for (const auto &s : succ)
    m += s.size();
  return m;
}

ExplodedCallGraph exploded_call_graph(const SameCtxIndex &sc) {
  const Arena &a = *sc.sg->ex->arena;
  const std::uint32_t ds = sc.dstar;

  ExplodedCallGraph cg;
  cg.n_functions = static_cast<std::uint32_t>(a.functions.size());
  cg.dstar = ds;
  cg.succ.resize(cg.n_nodes());
  cg.pred.resize(cg.n_nodes());
  for (std::uint32_t fi = 0; fi < a.functions.size(); ++fi) {
    const Function &f = a.functions[fi];
    for (std::uint32_t ci : f.call_sites) {
      const CallSite &cs = a.calls[ci];
      for (Fact d1 = 0; d1 < ds; ++d1)
        for (Fact d3 = 0; d3 < ds; ++d3) {
          if (!same_context_query(sc, f.start, d1, cs.call, d3))
            continue;
          for (auto [from, to] : cs.call_rel.pairs())
            if (from == d3)
              cg.succ[cg.node(fi, d1)].push_back(cg.node(cs.callee, to));
        }
    }
  }
  for (std::uint32_t u = 0; u < cg.n_nodes(); ++u) {
    auto &s = cg.succ[u];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (std::uint32_t v : s)
      cg.pred[v].push_back(u);
  }
  return cg;
}

std::uint32_t ExpandedForest::max_depth() const {
  std::uint32_t d = 0;
  for (std::uint32_t x : depth)
    d = std::max(d, x);
  return d;
}

ExpandedForest expand_forest(const ElimForest &f, std::uint32_t n_functions,
                             std::uint32_t dstar) {
  if (f.n() != n_functions)
    throw DomainMismatch("forest size does not match function count");
  ExpandedForest t;
  t.n_functions = n_functions;
  t.dstar = dstar;
  t.parent.assign(t.n_nodes(), -1);
  for (std::uint32_t fn = 0; fn < n_functions; ++fn) {
    for (Fact d = 1; d < dstar; ++d)
      t.parent[t.node(fn, d)] = static_cast<std::int32_t>(t.node(fn, d - 1));
    const std::int32_t pf = f.parent[fn];
    if (pf >= 0)
      t.parent[t.node(fn, 0)] =
          static_cast<std::int32_t>(t.node(static_cast<std::uint32_t>(pf), dstar - 1));
  }
  finish_forest(t);
  return t;
}

void finish_forest(ExpandedForest &t) {
  const std::uint32_t n = t.n_nodes();
  // Preorder ranks via an explicit child list; children visited in id order.
  std::vector<std::vector<std::uint32_t>> kids(n);
  std::vector<std::uint32_t> roots;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (t.parent[v] < 0)
      roots.push_back(v);
    else
      kids[static_cast<std::uint32_t>(t.parent[v])].push_back(v);
  }
  t.pre.assign(n, 0);
  t.sub.assign(n, 1);
  t.depth.assign(n, 0);
  std::uint32_t counter = 0;
  std::vector<std::uint32_t> stack, order;
  order.reserve(n);
  for (auto it = roots.rbegin(); it != roots.rend(); ++it)
    stack.push_back(*it);
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    const std::int32_t p = t.parent[v];
    t.depth[v] = p < 0 ? 1 : t.depth[static_cast<std::uint32_t>(p)] + 1;
    t.pre[v] = counter++;
    order.push_back(v);
    for (auto it = kids[v].rbegin(); it != kids[v].rend(); ++it)
      stack.push_back(*it);
  }
  if (counter != n)
    throw ValidationError("forest parent table contains a cycle");
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (t.parent[*it] >= 0)
      t.sub[static_cast<std::uint32_t>(t.parent[*it])] += t.sub[*it];

  t.anc.assign(n, {});
  for (std::uint32_t v : order) {
    const std::int32_t p = t.parent[v];
    if (p >= 0)
      t.anc[v] = t.anc[static_cast<std::uint32_t>(p)];
    t.anc[v].push_back(v);
  }
}

UpDownTables up_down_tables(const ExplodedCallGraph &cg, const ExpandedForest &t) {
  if (cg.n_nodes() != t.n_nodes())
    throw DomainMismatch("forest does not match exploded call graph");
  const std::uint32_t n = t.n_nodes();
  UpDownTables tbl;
  tbl.up.reserve(n);
  tbl.down.reserve(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    tbl.up.emplace_back(t.sub[v]);
    tbl.down.emplace_back(t.sub[v]);
  }
  std::vector<std::uint32_t> seen(n, 0), stack;
  std::uint32_t stamp = 0;
  auto restricted = [&](std::uint32_t y, const std::vector<std::vector<std::uint32_t>> &adj,
                        BitVec &bits) {
    const std::uint32_t lo = t.pre[y], hi = lo + t.sub[y];
    ++stamp;
    stack.assign(1, y);
    seen[y] = stamp;
    while (!stack.empty()) {
      const std::uint32_t x = stack.back();
      stack.pop_back();
      bits.set(t.pre[x] - lo);
      for (std::uint32_t w : adj[x])
        if (t.pre[w] >= lo && t.pre[w] < hi && seen[w] != stamp) {
          seen[w] = stamp;
          stack.push_back(w);
        }
    }
  };
  for (std::uint32_t y = 0; y < n; ++y) {
    restricted(y, cg.succ, tbl.down[y]);
    restricted(y, cg.pred, tbl.up[y]);
  }
  finish_tables(t, tbl);
  return tbl;
}

void finish_tables(const ExpandedForest &t, UpDownTables &tbl) {
  const std::uint32_t n = t.n_nodes();
  tbl.climb.assign(n, {});
  tbl.drop.assign(n, {});
  for (std::uint32_t x = 0; x < n; ++x) {
    const auto &ax = t.anc[x];
    BitVec c(ax.size()), d(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) {
      const std::uint32_t w = ax[i];
      const std::uint32_t off = t.pre[x] - t.pre[w];
      if (tbl.up[w].test(off))
        c.set(i);
      if (tbl.down[w].test(off))
        d.set(i);
    }
    tbl.climb[x] = std::move(c);
    tbl.drop[x] = std::move(d);
  }
}

bool call_graph_reachable(const UpDownTables &tbl, const ExpandedForest &t,
                          std::uint32_t u, std::uint32_t v) {
  const auto &au = t.anc[u], &av = t.anc[v];
  // Length of the shared root-first prefix, by binary search: chains agree
  // exactly on their common ancestors.
  std::size_t lo = 0, hi = std::min(au.size(), av.size());
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (au[mid - 1] == av[mid - 1])
      lo = mid;
    else
      hi = mid - 1;
  }
  // A connecting path exists iff some shared ancestor is climbable from u
  // and droppable to v; compare the two ancestor masks word by word.
  const auto &cu = tbl.climb[u].words(), &dv = tbl.drop[v].words();
  const std::size_t full = lo / 64, rem = lo % 64;
  for (std::size_t k = 0; k < full; ++k)
    if (cu[k] & dv[k])
      return true;
  if (rem)
    return (cu[full] & dv[full] & ((std::uint64_t{1} << rem) - 1)) != 0;
  return false;
}

} // namespace ifds
