// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/decomp.hpp"

#include "ifds/bits.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <numeric>

namespace ifds {

void UGraph::add_edge(std::uint32_t u, std::uint32_t v) {
  if (u == v) return;
  auto ins = [](std::vector<std::uint32_t> &vec, std::uint32_t x) {
    auto it = std::lower_bound(vec.begin(), vec.end(), x);
    if (it == vec.end() || *it != x) vec.insert(it, x);
  };
  ins(adj[u], v);
  ins(adj[v], u);
}

std::uint64_t UGraph::n_edges() const {
  std::uint64_t c = 0;
  for (const auto &v : adj) c += v.size();
  return c / 2;
}

UGraph UGraph::cfg_skeleton(const Arena &a, std::uint32_t fn) {
  const Function &f = a.functions[fn];
  UGraph g(f.n_vertices);
  for (const Edge &e : f.edges) g.add_edge(e.from - f.first, e.to - f.first);
  return g;
}

UGraph UGraph::from_call_graph(const CallGraph &c) {
  UGraph g(c.n);
  for (std::uint32_t u = 0; u < c.n; ++u)
    for (std::uint32_t v : c.callees[u]) g.add_edge(u, v);
  return g;
}

int TreeDecomposition::width() const {
  int w = -1;
  for (const auto &b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
  return w;
}

std::vector<std::vector<std::uint32_t>> TreeDecomposition::children() const {
  std::vector<std::vector<std::uint32_t>> ch(bags.size());
  for (std::uint32_t i = 0; i < parent.size(); ++i)
    if (parent[i] >= 0) ch[parent[i]].push_back(i);
  return ch;
}

int TreeDecomposition::height() const {
  if (bags.empty()) return 0;
  auto ch = children();
  int best = 0;
  // Iterative depth computation from every root (single root in practice).
  std::vector<std::pair<std::uint32_t, int>> stack;
  for (std::uint32_t i = 0; i < parent.size(); ++i)
    if (parent[i] < 0) stack.push_back({i, 1});
  while (!stack.empty()) {
    auto [b, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (std::uint32_t c : ch[b]) stack.push_back({c, d + 1});
  }
  return best;
}

// ---------------------------------------------------------------------------
// verification

TdVerdict verify_decomposition(const UGraph &g, const TreeDecomposition &t) {
  TdVerdict v;
  auto bad = [&](TdViolation kind, const std::string &msg) {
    v.kind = kind;
    v.message = msg;
    return v;
  };

  const std::size_t m = t.bags.size();
  if (t.parent.size() != m)
    return bad(TdViolation::Structure, "bag and parent tables differ in length");
  if (m == 0) {
    if (g.n == 0) return v;
    v.vertex = 0;
    return bad(TdViolation::VertexCoverage, "vertex 0 appears in no bag");
  }
  std::size_t roots = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.parent[i] >= static_cast<std::int64_t>(m))
      return bad(TdViolation::Structure, "parent index out of range");
    if (t.parent[i] < 0) ++roots;
  }
  if (roots == 0) return bad(TdViolation::Structure, "no root bag");
  if (t.root < 0 || t.root >= static_cast<std::int32_t>(m) || t.parent[t.root] >= 0)
    return bad(TdViolation::Structure, "root field does not name a parentless bag");
  // Acyclicity: every bag must reach a root in at most m parent steps.
  for (std::size_t i = 0; i < m; ++i) {
    std::int64_t cur = static_cast<std::int64_t>(i);
    for (std::size_t steps = 0; cur >= 0; ++steps) {
      if (steps > m) return bad(TdViolation::Structure, "parent pointers contain a cycle");
      cur = t.parent[cur];
    }
  }

  // Vertex and edge coverage.
  std::vector<std::vector<std::uint32_t>> bags_of(g.n);
  for (std::size_t b = 0; b < m; ++b)
    for (std::uint32_t x : t.bags[b]) {
      if (x >= g.n) return bad(TdViolation::Structure, "bag contains an unknown vertex");
      bags_of[x].push_back(static_cast<std::uint32_t>(b));
    }
  for (std::uint32_t x = 0; x < g.n; ++x)
    if (bags_of[x].empty()) {
      v.vertex = x;
      return bad(TdViolation::VertexCoverage,
                 "vertex " + std::to_string(x) + " appears in no bag");
    }
  for (std::uint32_t x = 0; x < g.n; ++x)
    for (std::uint32_t y : g.adj[x]) {
      if (y < x) continue;
      bool covered = false;
      for (std::uint32_t b : bags_of[x])
        if (std::binary_search(t.bags[b].begin(), t.bags[b].end(), y)) {
          covered = true;
          break;
        }
      if (!covered) {
        v.edge = {x, y};
        return bad(TdViolation::EdgeCoverage, "edge {" + std::to_string(x) + "," +
                                                  std::to_string(y) + "} is covered by no bag");
      }
    }

  // Per-vertex connectedness of the bag set within the tree.
  auto ch = t.children();
  std::vector<std::uint32_t> mark(m, 0), seen(m, 0);
  std::uint32_t stamp = 0;
  std::vector<std::uint32_t> queue;
  for (std::uint32_t x = 0; x < g.n; ++x) {
    ++stamp;
    for (std::uint32_t b : bags_of[x]) mark[b] = stamp;
    queue.assign(1, bags_of[x][0]);
    seen[bags_of[x][0]] = stamp;
    std::size_t reached = 0;
    while (!queue.empty()) {
      std::uint32_t b = queue.back();
      queue.pop_back();
      ++reached;
      auto visit = [&](std::int64_t nb) {
        if (nb < 0) return;
        auto u = static_cast<std::uint32_t>(nb);
        if (mark[u] == stamp && seen[u] != stamp) {
          seen[u] = stamp;
          queue.push_back(u);
        }
      };
      visit(t.parent[b]);
      for (std::uint32_t c : ch[b]) visit(c);
    }
    if (reached != bags_of[x].size()) {
      v.vertex = x;
      return bad(TdViolation::Connectivity,
                 "bags containing vertex " + std::to_string(x) + " are disconnected");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// min-fill elimination

TreeDecomposition decompose_minfill(const UGraph &g) {
  TreeDecomposition t;
  const std::uint32_t n = g.n;
  if (n == 0) return t;

  std::vector<BitVec> nb(n, BitVec(n));
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v : g.adj[u]) nb[u].set(v);
  std::vector<bool> gone(n, false);

  // Number of non-adjacent neighbor pairs (doubled) of a live vertex.
  auto fill2 = [&](std::uint32_t v) {
    std::uint64_t c = 0;
    nb[v].for_each_set([&](std::size_t a) {
      // |N(v) \ (N(a) ∪ {a})| counts a itself once since a ∉ N(a).
      const auto &va = nb[v].words();
      const auto &aa = nb[a].words();
      for (std::size_t k = 0; k < va.size(); ++k) c += std::popcount(va[k] & ~aa[k]);
      --c; // remove the count of a itself
    });
    return c;
  };

  std::vector<std::uint64_t> fill(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) fill[v] = fill2(v);

  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> pos(n, 0);
  t.bags.resize(n);
  order.reserve(n);

  for (std::uint32_t step = 0; step < n; ++step) {
    std::uint32_t best = n;
    for (std::uint32_t v = 0; v < n; ++v)
      if (!gone[v] && (best == n || fill[v] < fill[best])) best = v;
    assert(best < n);

    // Bag: the vertex plus its current neighborhood.
    std::vector<std::uint32_t> bag{best};
    nb[best].for_each_set([&](std::size_t a) { bag.push_back(static_cast<std::uint32_t>(a)); });
    std::sort(bag.begin(), bag.end());
    t.bags[step] = std::move(bag);
    pos[best] = step;
    order.push_back(best);

    // Eliminate: clique the neighborhood, drop the vertex.
    std::vector<std::uint32_t> nbs;
    nb[best].for_each_set([&](std::size_t a) { nbs.push_back(static_cast<std::uint32_t>(a)); });
    for (std::uint32_t a : nbs) {
      for (std::uint32_t b : nbs)
        if (a != b) nb[a].set(b);
      nb[a].clear(best);
    }
    gone[best] = true;

    // Fill counts change only around the touched neighborhood.
    std::vector<bool> dirty(n, false);
    for (std::uint32_t a : nbs) {
      dirty[a] = true;
      nb[a].for_each_set([&](std::size_t b) { dirty[b] = true; });
    }
    for (std::uint32_t v = 0; v < n; ++v)
      if (dirty[v] && !gone[v]) fill[v] = fill2(v);
  }

  // Each bag hangs under the bag of its earliest-eliminated live neighbor.
  t.parent.assign(n, -1);
  std::vector<std::int32_t> roots;
  for (std::uint32_t step = 0; step < n; ++step) {
    std::uint32_t v = order[step];
    std::uint32_t nxt = n;
    for (std::uint32_t x : t.bags[step]) {
      if (x == v) continue;
      if (nxt == n || pos[x] < pos[nxt]) nxt = x;
    }
    if (nxt == n)
      roots.push_back(static_cast<std::int32_t>(step));
    else
      t.parent[step] = static_cast<std::int32_t>(pos[nxt]);
  }

  if (roots.size() == 1) {
    t.root = roots[0];
  } else {
    // Disconnected input: join the component roots under one empty bag so
    // downstream passes always see a single rooted tree.
    t.bags.push_back({});
    t.parent.push_back(-1);
    t.root = static_cast<std::int32_t>(t.bags.size()) - 1;
    for (std::int32_t r : roots) t.parent[r] = t.root;
  }
  return t;
}

// ---------------------------------------------------------------------------
// balancing

namespace {

// Working state for the centroid/path-split recursion. The input tree is the
// binarized decomposition; membership timestamps avoid reallocating per call.
struct Balancer {
  const std::vector<std::vector<std::uint32_t>> &bags;
  const std::vector<std::vector<std::uint32_t>> &adj;
  std::vector<std::uint32_t> stamp_of;
  std::uint32_t stamp = 0;

  TreeDecomposition out;

  Balancer(const std::vector<std::vector<std::uint32_t>> &bags,
           const std::vector<std::vector<std::uint32_t>> &adj)
      : bags(bags), adj(adj), stamp_of(bags.size(), 0) {}

  std::int32_t emit(std::vector<std::uint32_t> bag, std::int32_t parent) {
    std::sort(bag.begin(), bag.end());
    bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
    out.bags.push_back(std::move(bag));
    out.parent.push_back(parent);
    return static_cast<std::int32_t>(out.bags.size()) - 1;
  }

  std::vector<std::uint32_t> bag_union(std::uint32_t c, const std::vector<std::uint32_t> &p) {
    std::vector<std::uint32_t> u = bags[c];
    for (std::uint32_t q : p) u.insert(u.end(), bags[q].begin(), bags[q].end());
    return u;
  }

  // Size of the component of S \ {cut} containing from (0 when from == cut).
  std::uint32_t side_size(const std::vector<std::uint32_t> &s, std::uint32_t cut,
                          std::uint32_t from) {
    if (from == cut) return 0;
    ++stamp;
    for (std::uint32_t x : s) stamp_of[x] = stamp;
    stamp_of[cut] = 0;
    std::vector<std::uint32_t> q{from};
    stamp_of[from] = 0;
    std::uint32_t cnt = 0;
    while (!q.empty()) {
      std::uint32_t x = q.back();
      q.pop_back();
      ++cnt;
      for (std::uint32_t y : adj[x])
        if (stamp_of[y] == stamp) {
          stamp_of[y] = 0;
          q.push_back(y);
        }
    }
    return cnt;
  }

  // Tree path between two members of S (both inclusive).
  std::vector<std::uint32_t> tree_path(const std::vector<std::uint32_t> &s, std::uint32_t a,
                                       std::uint32_t b) {
    ++stamp;
    for (std::uint32_t x : s) stamp_of[x] = stamp;
    std::vector<std::int64_t> prev(bags.size(), -1);
    std::deque<std::uint32_t> q{a};
    stamp_of[a] = 0;
    while (!q.empty()) {
      std::uint32_t x = q.front();
      q.pop_front();
      if (x == b) break;
      for (std::uint32_t y : adj[x])
        if (stamp_of[y] == stamp) {
          stamp_of[y] = 0;
          prev[y] = x;
          q.push_back(y);
        }
    }
    std::vector<std::uint32_t> path;
    for (std::int64_t cur = b; cur >= 0; cur = prev[cur]) {
      path.push_back(static_cast<std::uint32_t>(cur));
      if (cur == a) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::uint32_t centroid(const std::vector<std::uint32_t> &s) {
    // Root at the smallest member, compute subtree sizes, then minimize the
    // largest component left by removing each node.
    ++stamp;
    for (std::uint32_t x : s) stamp_of[x] = stamp;
    std::vector<std::uint32_t> order;
    std::vector<std::int64_t> par(bags.size(), -1);
    std::vector<std::uint32_t> q{s[0]};
    stamp_of[s[0]] = 0;
    while (!q.empty()) {
      std::uint32_t x = q.back();
      q.pop_back();
      order.push_back(x);
      for (std::uint32_t y : adj[x])
        if (stamp_of[y] == stamp) {
          stamp_of[y] = 0;
          par[y] = x;
          q.push_back(y);
        }
    }
    std::vector<std::uint32_t> size(bags.size(), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      size[*it] += 1;
      if (par[*it] >= 0) size[par[*it]] += size[*it];
    }
    const std::uint32_t total = static_cast<std::uint32_t>(s.size());
    std::uint32_t best = s[0], best_val = total + 1;
    for (std::uint32_t x : s) {
      std::uint32_t worst = total - size[x];
      for (std::uint32_t y : adj[x])
        if (par[y] == x) worst = std::max(worst, size[y]);
      if (worst < best_val || (worst == best_val && x < best)) {
        best_val = worst;
        best = x;
      }
    }
    return best;
  }

  std::int32_t build(std::vector<std::uint32_t> s, std::vector<std::uint32_t> p,
                     std::int32_t parent) {
    if (s.size() == 1) return emit(bag_union(s[0], p), parent);

    std::uint32_t c;
    if (p.size() < 2) {
      c = centroid(s);
    } else {
      // Split on the p0-p1 path at the last node whose p0 side holds at most
      // half the bags; the p1 side is then at most half as well, and the two
      // interfaces land in different components.
      auto path = tree_path(s, p[0], p[1]);
      c = path[0];
      for (std::uint32_t node : path) {
        if (2 * side_size(s, node, p[0]) <= s.size())
          c = node;
        else
          break;
      }
    }

    // Components of S minus the split bag, each with its interfaces.
    ++stamp;
    for (std::uint32_t x : s) stamp_of[x] = stamp;
    stamp_of[c] = 0;
    std::vector<std::vector<std::uint32_t>> comps;
    std::vector<std::vector<std::uint32_t>> ifaces;
    for (std::uint32_t seed : adj[c]) {
      if (stamp_of[seed] != stamp) continue;
      std::vector<std::uint32_t> comp;
      std::vector<std::uint32_t> q{seed};
      stamp_of[seed] = 0;
      while (!q.empty()) {
        std::uint32_t x = q.back();
        q.pop_back();
        comp.push_back(x);
        for (std::uint32_t y : adj[x])
          if (stamp_of[y] == stamp) {
            stamp_of[y] = 0;
            q.push_back(y);
          }
      }
      std::sort(comp.begin(), comp.end());
      std::vector<std::uint32_t> iface{seed}; // covers the separator toward c
      for (std::uint32_t q2 : p)
        if (q2 != seed && std::binary_search(comp.begin(), comp.end(), q2)) iface.push_back(q2);
      comps.push_back(std::move(comp));
      ifaces.push_back(std::move(iface));
    }

    std::int32_t me = emit(bag_union(c, p), parent);
    if (comps.size() <= 2) {
      for (std::size_t i = 0; i < comps.size(); ++i)
        build(std::move(comps[i]), std::move(ifaces[i]), me);
    } else {
      // Binary shape: first component under this node, the rest under a twin.
      build(std::move(comps[0]), std::move(ifaces[0]), me);
      std::int32_t twin = emit(out.bags[me], me);
      for (std::size_t i = 1; i < comps.size(); ++i)
        build(std::move(comps[i]), std::move(ifaces[i]), twin);
    }
    return me;
  }
};

} // namespace

TreeDecomposition balance_decomposition(const TreeDecomposition &t) {
  TreeDecomposition out;
  if (t.bags.empty()) return out;

  // Binarize: nodes with more than two children become chains of twins.
  std::vector<std::vector<std::uint32_t>> bags2;
  std::vector<std::int32_t> parent2;
  auto ch = t.children();
  struct Item {
    std::uint32_t orig;
    std::int32_t parent;
  };
  std::vector<Item> stack{{static_cast<std::uint32_t>(t.root), -1}};
  while (!stack.empty()) {
    auto [orig, par] = stack.back();
    stack.pop_back();
    bags2.push_back(t.bags[orig]);
    parent2.push_back(par);
    std::int32_t cur = static_cast<std::int32_t>(bags2.size()) - 1;
    const auto &cs = ch[orig];
    std::size_t i = 0;
    while (cs.size() - i > 2) {
      stack.push_back({cs[i], cur});
      bags2.push_back(t.bags[orig]);
      parent2.push_back(cur);
      cur = static_cast<std::int32_t>(bags2.size()) - 1;
      ++i;
    }
    for (; i < cs.size(); ++i) stack.push_back({cs[i], cur});
  }

  std::vector<std::vector<std::uint32_t>> adj(bags2.size());
  for (std::uint32_t i = 0; i < bags2.size(); ++i)
    if (parent2[i] >= 0) {
      adj[i].push_back(parent2[i]);
      adj[parent2[i]].push_back(i);
    }
  for (auto &v : adj) std::sort(v.begin(), v.end());

  Balancer b(bags2, adj);
  std::vector<std::uint32_t> all(bags2.size());
  std::iota(all.begin(), all.end(), 0);
  b.build(std::move(all), {}, -1);
  b.out.root = 0;
  return b.out;
}

// ---------------------------------------------------------------------------
// elimination forest

std::uint32_t ElimForest::max_depth() const {
  std::uint32_t d = 0;
  for (std::uint32_t x : depth) d = std::max(d, x);
  return d;
}

namespace {

struct Dissector {
  const UGraph &g;
  const TreeDecomposition &td;
  ElimForest &f;
  std::vector<std::uint32_t> stamp_of;
  std::uint32_t stamp = 0;

  Dissector(const UGraph &g, const TreeDecomposition &td, ElimForest &f)
      : g(g), td(td), f(f), stamp_of(g.n, 0) {}

  // Largest component size of g[comp \ sep]; comp must carry the current stamp.
  std::uint32_t worst_component(const std::vector<std::uint32_t> &comp,
                                const std::vector<std::uint32_t> &sep) {
    ++stamp;
    for (std::uint32_t x : comp) stamp_of[x] = stamp;
    for (std::uint32_t x : sep) stamp_of[x] = 0;
    std::uint32_t worst = 0;
    std::vector<std::uint32_t> q;
    for (std::uint32_t s : comp) {
      if (stamp_of[s] != stamp) continue;
      q.assign(1, s);
      stamp_of[s] = 0;
      std::uint32_t cnt = 0;
      while (!q.empty()) {
        std::uint32_t x = q.back();
        q.pop_back();
        ++cnt;
        for (std::uint32_t y : g.adj[x])
          if (stamp_of[y] == stamp) {
            stamp_of[y] = 0;
            q.push_back(y);
          }
      }
      worst = std::max(worst, cnt);
    }
    return worst;
  }

  void dissect(std::vector<std::uint32_t> comp, std::int32_t attach) {
    if (comp.empty()) return;

    // Pick the decomposition bag that best balances this component.
    std::vector<std::uint32_t> sep;
    std::uint32_t best_worst = 0;
    bool have = false;
    for (const auto &bag : td.bags) {
      std::vector<std::uint32_t> cand;
      for (std::uint32_t x : bag)
        if (std::binary_search(comp.begin(), comp.end(), x)) cand.push_back(x);
      if (cand.empty()) continue;
      std::uint32_t worst = worst_component(comp, cand);
      if (2 * worst > comp.size()) continue;
      if (!have || worst < best_worst || (worst == best_worst && cand.size() < sep.size())) {
        have = true;
        best_worst = worst;
        sep = std::move(cand);
      }
    }
    if (!have) sep = comp; // cannot happen for a valid decomposition; stay safe

    // Shrink the separator greedily (high ids first) while it stays balanced.
    for (std::size_t i = sep.size(); i-- > 0;) {
      if (sep.size() == 1) break;
      std::vector<std::uint32_t> trial = sep;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      if (2 * worst_component(comp, trial) <= comp.size()) sep = std::move(trial);
    }

    // Chain the separator (ascending ids), then recurse into the remainder.
    for (std::uint32_t x : sep) {
      f.parent[x] = attach;
      attach = static_cast<std::int32_t>(x);
    }

    ++stamp;
    for (std::uint32_t x : comp) stamp_of[x] = stamp;
    for (std::uint32_t x : sep) stamp_of[x] = 0;
    std::vector<std::vector<std::uint32_t>> subs;
    std::vector<std::uint32_t> q;
    for (std::uint32_t s : comp) {
      if (stamp_of[s] != stamp) continue;
      std::vector<std::uint32_t> sub;
      q.assign(1, s);
      stamp_of[s] = 0;
      while (!q.empty()) {
        std::uint32_t x = q.back();
        q.pop_back();
        sub.push_back(x);
        for (std::uint32_t y : g.adj[x])
          if (stamp_of[y] == stamp) {
            stamp_of[y] = 0;
            q.push_back(y);
          }
      }
      std::sort(sub.begin(), sub.end());
      subs.push_back(std::move(sub));
    }
    for (auto &sub : subs) dissect(std::move(sub), attach);
  }
};

} // namespace

ElimForest elimination_forest(const UGraph &g) {
  ElimForest f;
  f.parent.assign(g.n, -1);
  f.depth.assign(g.n, 0);
  if (g.n == 0) return f;

  TreeDecomposition td = decompose_minfill(g);
  Dissector d(g, td, f);

  // One dissection per connected component of the graph.
  std::vector<bool> seen(g.n, false);
  for (std::uint32_t s = 0; s < g.n; ++s) {
    if (seen[s]) continue;
    std::vector<std::uint32_t> comp, q{s};
    seen[s] = true;
    while (!q.empty()) {
      std::uint32_t x = q.back();
      q.pop_back();
      comp.push_back(x);
      for (std::uint32_t y : g.adj[x])
        if (!seen[y]) {
          seen[y] = true;
          q.push_back(y);
        }
    }
    std::sort(comp.begin(), comp.end());
    d.dissect(std::move(comp), -1);
  }

  // Depths from the parent chains.
  for (std::uint32_t v = 0; v < g.n; ++v) {
    std::uint32_t d2 = 1;
    for (std::int32_t cur = f.parent[v]; cur >= 0; cur = f.parent[cur]) ++d2;
    f.depth[v] = d2;
  }
  return f;
}

EfVerdict verify_elim_forest(const UGraph &g, const ElimForest &f) {
  EfVerdict v;
  if (f.parent.size() != g.n || f.depth.size() != g.n) {
    v.ok = false;
    v.message = "forest tables do not match the graph size";
    return v;
  }
  for (std::uint32_t x = 0; x < g.n; ++x) {
    std::uint32_t steps = 0;
    for (std::int32_t cur = f.parent[x]; cur >= 0; cur = f.parent[cur])
      if (++steps > g.n) {
        v.ok = false;
        v.message = "parent pointers contain a cycle";
        return v;
      }
  }
  auto is_anc = [&](std::uint32_t a, std::uint32_t d) {
    std::int32_t cur = static_cast<std::int32_t>(d);
    while (cur >= 0 && f.depth[cur] > f.depth[a]) cur = f.parent[cur];
    return cur == static_cast<std::int32_t>(a);
  };
  for (std::uint32_t x = 0; x < g.n; ++x)
    for (std::uint32_t y : g.adj[x]) {
      if (y < x) continue;
      bool comparable = f.depth[x] <= f.depth[y] ? is_anc(x, y) : is_anc(y, x);
      if (!comparable) {
        v.ok = false;
        v.edge = {x, y};
        v.message = "edge {" + std::to_string(x) + "," + std::to_string(y) +
                    "} joins incomparable vertices";
        return v;
      }
    }
  return v;
}

// ---------------------------------------------------------------------------
// LCA

LcaIndex::LcaIndex(const std::vector<std::int32_t> &parent) {
  n_ = static_cast<std::uint32_t>(parent.size());
  virtual_root_ = n_;
  std::vector<std::vector<std::uint32_t>> ch(n_ + 1);
  for (std::uint32_t i = 0; i < n_; ++i)
    ch[parent[i] < 0 ? n_ : static_cast<std::uint32_t>(parent[i])].push_back(i);

  depth_.assign(n_ + 1, 0);
  first_.assign(n_ + 1, 0);
  euler_.reserve(2 * (n_ + 1));

  // Iterative Euler tour from the virtual root.
  struct Frame {
    std::uint32_t v;
    std::size_t next_child;
  };
  std::vector<Frame> st{{n_, 0}};
  depth_[n_] = 0;
  first_[n_] = 0;
  euler_.push_back(n_);
  while (!st.empty()) {
    Frame &f = st.back();
    if (f.next_child < ch[f.v].size()) {
      std::uint32_t c = ch[f.v][f.next_child++];
      depth_[c] = depth_[f.v] + 1;
      first_[c] = static_cast<std::uint32_t>(euler_.size());
      euler_.push_back(c);
      st.push_back({c, 0});
    } else {
      st.pop_back();
      if (!st.empty()) euler_.push_back(st.back().v);
    }
  }

  const std::size_t m = euler_.size();
  std::size_t levels = 1;
  while ((std::size_t(1) << levels) <= m) ++levels;
  sp_.assign(levels, std::vector<std::uint32_t>(m));
  for (std::size_t i = 0; i < m; ++i) sp_[0][i] = euler_[i];
  for (std::size_t l = 1; l < levels; ++l)
    for (std::size_t i = 0; i + (std::size_t(1) << l) <= m; ++i)
      sp_[l][i] = argmin(sp_[l - 1][i], sp_[l - 1][i + (std::size_t(1) << (l - 1))]);
}

std::uint32_t LcaIndex::argmin(std::uint32_t a, std::uint32_t b) const {
  return depth_[a] <= depth_[b] ? a : b;
}

std::uint32_t LcaIndex::lca(std::uint32_t u, std::uint32_t v) const {
  std::uint32_t a = first_[u], b = first_[v];
  if (a > b) std::swap(a, b);
  std::size_t span = b - a + 1;
  std::size_t l = std::bit_width(span) - 1;
  std::uint32_t w = argmin(sp_[l][a], sp_[l][b + 1 - (std::size_t(1) << l)]);
  if (w == virtual_root_)
    throw DifferentTrees("vertices " + std::to_string(u) + " and " + std::to_string(v) +
                         " live in different trees");
  return w;
}

} // namespace ifds
