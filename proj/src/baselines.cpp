// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/baselines.hpp"

#include "ifds/errors.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace ifds {

namespace {

constexpr Xid kNoTarget = 0xffffffffu;

struct DyckSearch {
  const ExplodedSupergraph &ex;
  const Arena &a;
  PathMode mode;
  std::uint32_t depth_cap;
  std::size_t config_cap;

  // Interned stacks: id 0 is the empty stack, every other id names
  // (parent stack, pushed return-site vertex).
  std::vector<std::pair<std::uint32_t, Vid>> stacks{{0, 0}};
  std::vector<std::uint32_t> stack_depth{0};
  std::unordered_map<std::uint64_t, std::uint32_t> stack_ids;
  std::unordered_set<std::uint64_t> visited;
  std::deque<std::uint64_t> frontier;
  bool truncated = false;

  DyckSearch(const ExplodedSupergraph &e, PathMode m, std::uint32_t depth, std::size_t cap)
      : ex(e), a(*e.arena), mode(m), depth_cap(depth), config_cap(cap) {
    if (depth_cap == 0)
      depth_cap = static_cast<std::uint32_t>(a.functions.size()) * ex.dstar * a.n_vertices();
  }

  std::uint32_t push(std::uint32_t sid, Vid ret_site) {
    const std::uint64_t key = (static_cast<std::uint64_t>(sid) << 32) | ret_site;
    auto [it, fresh] = stack_ids.try_emplace(key, static_cast<std::uint32_t>(stacks.size()));
    if (fresh) {
      stacks.emplace_back(sid, ret_site);
      stack_depth.push_back(stack_depth[sid] + 1);
    }
    return it->second;
  }

  bool accepted(std::uint32_t sid) const {
    return mode == PathMode::Interprocedural || sid == 0;
  }

  void enqueue(Xid x, std::uint32_t sid) {
    if (visited.size() >= config_cap) {
      truncated = true;
      return;
    }
    const std::uint64_t cfg = (static_cast<std::uint64_t>(x) << 32) | sid;
    if (visited.insert(cfg).second)
      frontier.push_back(cfg);
  }

  // Runs to exhaustion (or bound), marking accepted vertices; stops early
  // when `target` becomes accepted.
  bool run(Xid src, Xid target, BitVec &out) {
    enqueue(src, 0);
    while (!frontier.empty()) {
      const std::uint64_t cfg = frontier.front();
      frontier.pop_front();
      const Xid x = static_cast<Xid>(cfg >> 32);
      const std::uint32_t sid = static_cast<std::uint32_t>(cfg);
      if (accepted(sid)) {
        out.set(x);
        if (x == target)
          return true;
      }
      for (const XEdge &e : ex.adj[x])
        switch (e.cls) {
        case EdgeClass::Intra:
        case EdgeClass::CallRet:
          enqueue(e.to, sid);
          break;
        case EdgeClass::CallStart: {
          if (stack_depth[sid] + 1 > depth_cap) {
            truncated = true;
            break;
          }
          const auto ci = static_cast<std::uint32_t>(a.call_of[ex.vertex(x)]);
          enqueue(e.to, push(sid, a.calls[ci].ret_site));
          break;
        }
        case EdgeClass::ExitRet:
          if (sid != 0 && stacks[sid].second == ex.vertex(e.to))
            enqueue(e.to, stacks[sid].first);
          break;
        }
    }
    return false;
  }
};

} // namespace

bool dyck_reach(const ExplodedSupergraph &ex, Xid src, Xid dst, PathMode mode,
                std::uint32_t stack_bound, std::size_t config_cap) {
  if (src >= ex.n_xvertices() || dst >= ex.n_xvertices())
    throw UnknownVertex("exploded id out of range");
  DyckSearch s(ex, mode, stack_bound, config_cap);
  BitVec out(ex.n_xvertices());
  if (s.run(src, dst, out))
    return true;
  if (s.truncated)
    throw BoundExceeded("valid-path search hit its bound before settling the query");
  return false;
}

BitVec dyck_reach_set(const ExplodedSupergraph &ex, Xid src, PathMode mode,
                      std::uint32_t stack_bound, std::size_t config_cap) {
  if (src >= ex.n_xvertices())
    throw UnknownVertex("exploded id out of range");
  DyckSearch s(ex, mode, stack_bound, config_cap);
  BitVec out(ex.n_xvertices());
  s.run(src, kNoTarget, out);
  if (s.truncated)
    throw BoundExceeded("valid-path search hit its bound; reach set would be partial");
  return out;
}

// ---------------------------------------------------------------------------
// Tabulation: origins are exploded vertices whose same-context images are
// being computed; call-start edges activate callee-start origins; summaries
// are discovered when a start origin reaches its function's exit.

struct DemandState::Impl {
  const ExplodedSupergraph &ex;
  const Arena &a;
  std::uint32_t ds;

  struct Origin {
    Xid at = 0;
    std::uint32_t fn = 0;
    BitVec image;                       // same-context image, over fn-local slots
    std::vector<std::uint32_t> activates; // origin ids entered via call-start
  };
  std::vector<Origin> origins;
  std::unordered_map<Xid, std::uint32_t> origin_of;
  // Per call site: discovered summary fact pairs and the origins waiting at
  // the call vertex, by fact.
  std::vector<std::vector<std::pair<Fact, Fact>>> summ;
  std::vector<std::vector<std::pair<std::uint32_t, Fact>>> waiting;
  std::deque<std::uint64_t> wl; // origin id * 2^32 + local slot
  std::uint64_t explored = 0;

  explicit Impl(const ExplodedSupergraph &e)
      : ex(e), a(*e.arena), ds(e.dstar), summ(a.calls.size()), waiting(a.calls.size()) {}

  std::uint32_t local_slot(Xid x, std::uint32_t fn) const {
    return x - a.functions[fn].first * ds;
  }

  std::uint32_t activate(Xid x) {
    auto [it, fresh] = origin_of.try_emplace(x, static_cast<std::uint32_t>(origins.size()));
    if (fresh) {
      Origin o;
      o.at = x;
      o.fn = a.fn_of[ex.vertex(x)];
      o.image = BitVec(a.functions[o.fn].n_vertices * ds);
      origins.push_back(std::move(o));
      add_edge(it->second, local_slot(x, origins.back().fn));
    }
    return it->second;
  }

  void add_edge(std::uint32_t o, std::uint32_t slot) {
    if (origins[o].image.test(slot))
      return;
    origins[o].image.set(slot);
    ++explored;
    wl.push_back((static_cast<std::uint64_t>(o) << 32) | slot);
  }

  void run() {
    while (!wl.empty()) {
      const std::uint64_t item = wl.front();
      wl.pop_front();
      const std::uint32_t o = static_cast<std::uint32_t>(item >> 32);
      const std::uint32_t slot = static_cast<std::uint32_t>(item);
      const std::uint32_t fn = origins[o].fn;
      const Xid x = a.functions[fn].first * ds + slot;
      const Vid v = ex.vertex(x);
      const Fact d2 = ex.fact(x);

      for (const XEdge &e : ex.adj[x])
        switch (e.cls) {
        case EdgeClass::Intra:
        case EdgeClass::CallRet:
          add_edge(o, local_slot(e.to, fn));
          break;
        case EdgeClass::CallStart: {
          const std::uint32_t callee_origin = activate(e.to);
          auto &acts = origins[o].activates;
          if (std::find(acts.begin(), acts.end(), callee_origin) == acts.end())
            acts.push_back(callee_origin);
          break;
        }
        case EdgeClass::ExitRet:
          break; // returns flow through summaries only
        }

      if (a.kind[v] == VertexKind::Call) {
        const auto ci = static_cast<std::uint32_t>(a.call_of[v]);
        waiting[ci].emplace_back(o, d2);
        const Vid r_local = a.calls[ci].ret_site - a.functions[fn].first;
        for (auto [d3, d4] : summ[ci])
          if (d3 == d2)
            add_edge(o, r_local * ds + d4);
      }

      if (v == a.functions[fn].exit && ex.vertex(origins[o].at) == a.functions[fn].start) {
        const Fact d1 = ex.fact(origins[o].at);
        for (std::uint32_t ci = 0; ci < a.calls.size(); ++ci) {
          const CallSite &cs = a.calls[ci];
          if (cs.callee != fn)
            continue;
          const std::uint32_t caller = a.fn_of[cs.call];
          const Vid r_local = cs.ret_site - a.functions[caller].first;
          for (Fact d3 = 0; d3 < ds; ++d3) {
            if (!cs.call_rel.has(d3, d1))
              continue;
            for (Fact d4 = 0; d4 < ds; ++d4) {
              if (!cs.ret_rel.has(d2, d4))
                continue;
              auto &lst = summ[ci];
              if (std::find(lst.begin(), lst.end(), std::make_pair(d3, d4)) != lst.end())
                continue;
              lst.emplace_back(d3, d4);
              for (auto [o2, dw] : waiting[ci])
                if (dw == d3)
                  add_edge(o2, r_local * ds + d4);
            }
          }
        }
      }
    }
  }

  bool reachable(Xid src, Xid dst) {
    const std::uint32_t seed = activate(src);
    run();
    // Union of images over the activation closure of the seed.
    std::vector<std::uint8_t> seen(origins.size(), 0);
    std::vector<std::uint32_t> stack{seed};
    seen[seed] = 1;
    while (!stack.empty()) {
      const std::uint32_t o = stack.back();
      stack.pop_back();
      const Xid base = a.functions[origins[o].fn].first * ds;
      if (dst >= base && dst < base + origins[o].image.size() && origins[o].image.test(dst - base))
        return true;
      for (std::uint32_t nx : origins[o].activates)
        if (!seen[nx]) {
          seen[nx] = 1;
          stack.push_back(nx);
        }
    }
    return false;
  }
};

DemandState::DemandState(const ExplodedSupergraph &ex) : impl_(std::make_unique<Impl>(ex)) {}
DemandState::~DemandState() = default;
DemandState::DemandState(DemandState &&) noexcept = default;
DemandState &DemandState::operator=(DemandState &&) noexcept = default;

bool DemandState::query(Xid src, Xid dst) {
  if (src >= impl_->ex.n_xvertices() || dst >= impl_->ex.n_xvertices())
    throw UnknownVertex("exploded id out of range");
  return impl_->reachable(src, dst);
}

std::uint64_t DemandState::explored() const { return impl_->explored; }

BitVec exhaustive_tabulate(const ExplodedSupergraph &ex, const std::vector<Xid> &seeds) {
  DemandState::Impl impl(ex);
  std::vector<std::uint32_t> ids;
  ids.reserve(seeds.size());
  for (Xid s : seeds) {
    if (s >= ex.n_xvertices())
      throw UnknownVertex("exploded id out of range");
    ids.push_back(impl.activate(s));
  }
  impl.run();
  BitVec out(ex.n_xvertices());
  std::vector<std::uint8_t> seen(impl.origins.size(), 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s : ids)
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const std::uint32_t o = stack.back();
    stack.pop_back();
    const Xid base = impl.a.functions[impl.origins[o].fn].first * impl.ds;
    impl.origins[o].image.for_each_set([&](std::uint32_t slot) { out.set(base + slot); });
    for (std::uint32_t nx : impl.origins[o].activates)
      if (!seen[nx]) {
        seen[nx] = 1;
        stack.push_back(nx);
      }
  }
  return out;
}

} // namespace ifds
