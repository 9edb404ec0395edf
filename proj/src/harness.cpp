// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/harness.hpp"

#include "ifds/baselines.hpp"
#include "ifds/decomp.hpp"
#include "ifds/engine.hpp"
#include "ifds/errors.hpp"
#include "ifds/summaries.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>
#include <utility>

#include <json.hpp>

namespace ifds {

using nlohmann::json;

Template template_from_name(std::string_view name) {
  if (name == "reach") return Template::Reach;
  if (name == "uninit") return Template::Uninit;
  if (name == "nullness") return Template::Nullness;
  throw ValidationError("unknown template '" + std::string(name) +
                        "' (expected reach, uninit or nullness)");
}

namespace {

// How eagerly identity pairs survive an edge: reaching-definitions style
// problems mostly preserve facts, uninitialized-variable style problems kill
// more, nullness problems kill the most and shuffle facts around instead.
std::uint32_t keep_pct(Template t) {
  switch (t) {
  case Template::Reach: return 85;
  case Template::Uninit: return 75;
  case Template::Nullness: return 65;
  }
  return 85;
}

// Random distributive flow relation as a JSON pair list. Always contains
// (0,0); per-fact in/out degrees stay within the default bandwidth of 4.
json rel_json(Rng &rng, std::uint32_t facts, Template tmpl, bool across_call) {
  std::uint32_t keep = keep_pct(tmpl);
  if (across_call && keep > 15) keep -= 15;

  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<std::uint32_t> outdeg(facts + 1, 0), indeg(facts + 1, 0);
  auto add = [&](std::uint32_t s, std::uint32_t d) {
    if (outdeg[s] >= 4 || indeg[d] >= 4) return;
    if (pairs.emplace(s, d).second) {
      ++outdeg[s];
      ++indeg[d];
    }
  };

  add(0, 0);
  if (facts > 0) {
    for (std::uint32_t d = 1; d <= facts; ++d)
      if (rng.chance(keep)) add(d, d);
    std::uint32_t gens = 0;
    switch (tmpl) {
    case Template::Reach: gens = rng.chance(60) ? rng.range(1, 2) : 0; break;
    case Template::Uninit: gens = rng.chance(40) ? 1 : 0; break;
    case Template::Nullness: gens = rng.chance(50) ? 1 : 0; break;
    }
    for (std::uint32_t i = 0; i < gens; ++i) add(0, 1 + rng.below(facts));
    std::uint32_t transfers = tmpl == Template::Nullness ? rng.below(3) : rng.below(2);
    for (std::uint32_t i = 0; i < transfers; ++i)
      add(1 + rng.below(facts), 1 + rng.below(facts));
  }

  json out = json::array();
  for (auto [s, d] : pairs) out.push_back(json::array({s, d}));
  return out;
}

// Partial permutation over the data facts (plus the fixed (0,0) pair), the
// shape of parameter-passing maps: injective, so bandwidth-1 on its own.
json perm_rel(Rng &rng, std::uint32_t facts, Template tmpl) {
  std::uint32_t keep = keep_pct(tmpl);
  std::vector<std::uint32_t> target(facts);
  for (std::uint32_t i = 0; i < facts; ++i) target[i] = i + 1;
  for (std::uint32_t i = facts; i > 1; --i) std::swap(target[i - 1], target[rng.below(i)]);

  json out = json::array();
  out.push_back(json::array({0, 0}));
  for (std::uint32_t d = 1; d <= facts; ++d)
    if (rng.chance(keep)) out.push_back(json::array({d, target[d - 1]}));
  return out;
}

// One function's control-flow graph under construction. Vertex 0 is the
// start, vertex 1 the exit; seq() lays a structured region of a given vertex
// budget between two existing vertices, so the skeleton stays series-parallel
// (treewidth at most 2) or a plain chain when only width 1 is allowed.
struct FnBuilder {
  FnBuilder(Rng &r, bool s, const std::vector<std::uint32_t> &c, std::uint32_t cl)
      : rng(r), structured(s), callable(c), calls_left(cl) {}

  Rng &rng;
  bool structured;                            // branches/loops allowed
  const std::vector<std::uint32_t> &callable; // proper call-forest ancestors
  std::uint32_t calls_left;

  std::vector<const char *> kinds{"start", "exit"};
  struct CallSpec {
    std::uint32_t call, retsite, callee;
  };
  std::vector<CallSpec> calls;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::uint32_t fresh(const char *kind) {
    kinds.push_back(kind);
    return static_cast<std::uint32_t>(kinds.size() - 1);
  }

  void edge(std::uint32_t u, std::uint32_t v) { edges.emplace_back(u, v); }

  // Emits a region of exactly `budget` fresh vertices between from and to.
  void seq(std::uint32_t from, std::uint32_t to, std::uint32_t budget) {
    std::uint32_t cur = from;
    while (budget > 0) {
      std::uint32_t pick = rng.below(100);
      if (budget >= 2 && pick < 30 && !callable.empty() && calls_left > 0) {
        std::uint32_t c = fresh("call"), r = fresh("retsite");
        edge(cur, c);
        edge(c, r);
        calls.push_back({c, r, callable[rng.below(static_cast<std::uint32_t>(callable.size()))]});
        --calls_left;
        cur = r;
        budget -= 2;
      } else if (structured && budget >= 3 && pick < 55) {
        std::uint32_t k = rng.range(1, std::min(budget - 1, 6u)); // leg vertices
        std::uint32_t m = fresh("plain");                         // merge point
        std::uint32_t left = rng.below(k + 1);
        seq(cur, m, left); // a leg of zero vertices is the direct edge cur->m
        seq(cur, m, k - left);
        cur = m;
        budget -= k + 1;
      } else if (structured && budget >= 2 && pick < 75) {
        std::uint32_t h = fresh("plain"); // loop header
        edge(cur, h);
        std::uint32_t body = rng.range(1, std::min(budget - 1, 5u));
        seq(h, h, body); // back edge closes the cycle; body >= 1 bars self loops
        cur = h;
        budget -= body + 1;
      } else {
        std::uint32_t s = fresh("plain");
        edge(cur, s);
        cur = s;
        budget -= 1;
      }
    }
    edge(cur, to);
  }
};

json build_document(const GenSpec &spec, Rng &rng) {
  std::uint32_t k = spec.functions;

  // Call forest: parents always have smaller indices, so calls to proper
  // ancestors keep the call graph acyclic and the forest itself witnesses
  // elimination depth at most depth_cap.
  std::vector<std::int32_t> fparent(k, -1);
  std::vector<std::uint32_t> fdepth(k, 1);
  for (std::uint32_t i = 1; i < k; ++i) {
    if (!rng.chance(70)) continue;
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t j = 0; j < i; ++j)
      if (fdepth[j] < spec.depth_cap) eligible.push_back(j);
    if (eligible.empty()) continue;
    std::uint32_t p = eligible[rng.below(static_cast<std::uint32_t>(eligible.size()))];
    fparent[i] = static_cast<std::int32_t>(p);
    fdepth[i] = fdepth[p] + 1;
  }

  json fns = json::array();
  for (std::uint32_t i = 0; i < k; ++i) {
    std::vector<std::uint32_t> ancestors;
    for (std::int32_t a = fparent[i]; a >= 0; a = fparent[a])
      ancestors.push_back(static_cast<std::uint32_t>(a));

    FnBuilder b(rng, spec.width_cap >= 2, ancestors, spec.calls_cap);
    std::uint32_t lines = rng.range(spec.min_lines, spec.max_lines);
    b.seq(0, 1, lines - 2);

    json verts = json::array();
    for (std::uint32_t v = 0; v < b.kinds.size(); ++v) {
      json jv;
      jv["id"] = v;
      jv["kind"] = b.kinds[v];
      for (const auto &c : b.calls)
        if (c.call == v) {
          jv["callee"] = "f" + std::to_string(c.callee);
          jv["retsite"] = c.retsite;
        }
      verts.push_back(std::move(jv));
    }
    json edges = json::array();
    for (auto [u, v] : b.edges) {
      bool across_call = b.kinds[u] == std::string_view("call");
      json je;
      je["from"] = u;
      je["to"] = v;
      je["rel"] = rel_json(rng, spec.facts, spec.tmpl, across_call);
      edges.push_back(std::move(je));
    }
    json calls = json::array();
    for (const auto &c : b.calls) {
      json jc;
      jc["call"] = c.call;
      jc["call_rel"] = perm_rel(rng, spec.facts, spec.tmpl);
      jc["ret_rel"] = perm_rel(rng, spec.facts, spec.tmpl);
      calls.push_back(std::move(jc));
    }

    json jf;
    jf["name"] = "f" + std::to_string(i);
    jf["vertices"] = std::move(verts);
    jf["edges"] = std::move(edges);
    jf["calls"] = std::move(calls);
    fns.push_back(std::move(jf));
  }

  json facts = json::array();
  for (std::uint32_t d = 1; d <= spec.facts; ++d) facts.push_back("d" + std::to_string(d));
  json doc;
  doc["facts"] = std::move(facts);
  doc["bandwidth"] = 4;
  doc["functions"] = std::move(fns);
  return doc;
}

bool caps_ok(const Arena &a, const GenSpec &spec) {
  for (std::uint32_t fi = 0; fi < a.functions.size(); ++fi) {
    TreeDecomposition td = decompose_minfill(UGraph::cfg_skeleton(a, fi));
    if (td.width() > static_cast<int>(spec.width_cap)) return false;
  }
  ElimForest ef = elimination_forest(UGraph::from_call_graph(build_call_graph(a)));
  return ef.max_depth() <= spec.depth_cap;
}

} // namespace

Arena generate(const GenSpec &spec) {
  if (spec.functions == 0) throw InfeasibleSpec("at least one function is required");
  if (spec.facts > 63) throw InfeasibleSpec("at most 63 data facts are supported");
  if (spec.min_lines < 2) throw InfeasibleSpec("functions need at least 2 vertices (start and exit)");
  if (spec.min_lines > spec.max_lines) throw InfeasibleSpec("min_lines exceeds max_lines");
  if (spec.width_cap < 1) throw InfeasibleSpec("width_cap must be at least 1");
  if (spec.depth_cap < 1) throw InfeasibleSpec("depth_cap must be at least 1");

  for (std::uint64_t attempt = 0; attempt <= 8; ++attempt) {
    Rng rng(spec.seed ^ (0xa5a5a5a5a5a5a5a5ull * attempt));
    json doc = build_document(spec, rng);
    Arena a = load_arena_string(doc.dump());
    if (caps_ok(a, spec)) return a;
  }
  throw InfeasibleSpec("width/depth caps not met after 9 attempts; relax the caps");
}

std::vector<QueryTuple> gen_workload(const Arena &a, std::size_t m, std::uint64_t seed) {
  std::uint32_t n = a.n_vertices(), ds = a.dstar();
  if (m > n)
    throw ValidationError("workload of " + std::to_string(m) + " queries exceeds the " +
                          std::to_string(n) + " vertices available");
  Rng rng(seed);
  std::vector<QueryTuple> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    out.push_back({rng.below(n), rng.below(ds), rng.below(n), rng.below(ds)});
  return out;
}

namespace {

class ParamEngine final : public QueryEngine {
public:
  std::string_view name() const override { return "param"; }
  void prepare(const Arena &a) override { idx_.emplace(preprocess(a)); }
  bool answer(Vid u1, Fact d1, Vid u2, Fact d2) override {
    return query(*idx_, u1, d1, u2, d2).verdict;
  }

private:
  std::optional<QueryIndex> idx_;
};

class IvpDfsEngine final : public QueryEngine {
public:
  std::string_view name() const override { return "ivp-dfs"; }
  void prepare(const Arena &a) override {
    ex_ = std::make_unique<ExplodedSupergraph>(build_exploded(a));
    sg_ = std::make_unique<SummaryGraph>(compute_summaries(*ex_));
  }
  bool answer(Vid u1, Fact d1, Vid u2, Fact d2) override {
    View v(*sg_, PathMode::Interprocedural);
    return reach_view(v, ex_->xid(u1, d1), ex_->xid(u2, d2));
  }

private:
  std::unique_ptr<ExplodedSupergraph> ex_;
  std::unique_ptr<SummaryGraph> sg_;
};

class ExhaustiveEngine final : public QueryEngine {
public:
  std::string_view name() const override { return "exhaustive"; }
  void prepare(const Arena &a) override {
    ex_ = std::make_unique<ExplodedSupergraph>(build_exploded(a));
    cache_.clear();
  }
  bool answer(Vid u1, Fact d1, Vid u2, Fact d2) override {
    Xid s = ex_->xid(u1, d1);
    auto it = cache_.find(s);
    if (it == cache_.end()) it = cache_.emplace(s, exhaustive_tabulate(*ex_, {s})).first;
    return it->second.test(ex_->xid(u2, d2));
  }

private:
  std::unique_ptr<ExplodedSupergraph> ex_;
  std::unordered_map<Xid, BitVec> cache_;
};

class DemandEngine final : public QueryEngine {
public:
  std::string_view name() const override { return "demand"; }
  void prepare(const Arena &a) override {
    ex_ = std::make_unique<ExplodedSupergraph>(build_exploded(a));
    state_.emplace(*ex_);
  }
  bool answer(Vid u1, Fact d1, Vid u2, Fact d2) override {
    return state_->query(ex_->xid(u1, d1), ex_->xid(u2, d2));
  }

private:
  std::unique_ptr<ExplodedSupergraph> ex_;
  std::optional<DemandState> state_;
};

class DyckEngine final : public QueryEngine {
public:
  std::string_view name() const override { return "dyck"; }
  void prepare(const Arena &a) override {
    ex_ = std::make_unique<ExplodedSupergraph>(build_exploded(a));
  }
  bool answer(Vid u1, Fact d1, Vid u2, Fact d2) override {
    return dyck_reach(*ex_, ex_->xid(u1, d1), ex_->xid(u2, d2), PathMode::Interprocedural);
  }

private:
  std::unique_ptr<ExplodedSupergraph> ex_;
};

} // namespace

std::unique_ptr<QueryEngine> make_engine(std::string_view name) {
  if (name == "param") return std::make_unique<ParamEngine>();
  if (name == "ivp-dfs") return std::make_unique<IvpDfsEngine>();
  if (name == "exhaustive") return std::make_unique<ExhaustiveEngine>();
  if (name == "demand") return std::make_unique<DemandEngine>();
  if (name == "dyck") return std::make_unique<DyckEngine>();
  throw ValidationError("unknown engine '" + std::string(name) +
                        "' (expected param, ivp-dfs, exhaustive, demand or dyck)");
}

std::vector<BenchRecord> bench(const Arena &a, const std::vector<QueryTuple> &workload,
                               const std::vector<std::string> &engines,
                               const std::string &arena_id) {
  std::vector<std::unique_ptr<QueryEngine>> built;
  built.reserve(engines.size());
  for (const std::string &name : engines) built.push_back(make_engine(name));
  return bench(a, workload, std::move(built), arena_id);
}

std::vector<BenchRecord> bench(const Arena &a, const std::vector<QueryTuple> &workload,
                               std::vector<std::unique_ptr<QueryEngine>> engines,
                               const std::string &arena_id) {
  using clock = std::chrono::steady_clock;

  std::uint64_t xedges = build_exploded(a).n_edges();

  std::vector<double> prep_s(engines.size(), 0.0);
  for (std::size_t i = 0; i < engines.size(); ++i) {
    auto t0 = clock::now();
    engines[i]->prepare(a);
    prep_s[i] = std::chrono::duration<double>(clock::now() - t0).count();
  }

  // Every engine must agree on every tuple before any timing is trusted.
  for (const QueryTuple &q : workload) {
    bool expect = false;
    for (std::size_t i = 0; i < engines.size(); ++i) {
      bool got = engines[i]->answer(q[0], q[1], q[2], q[3]);
      if (i == 0) {
        expect = got;
      } else if (got != expect) {
        throw EngineDisagreement("engines '" + std::string(engines[0]->name()) + "' and '" +
                                 std::string(engines[i]->name()) +
                                 "' disagree on query (u1=" + std::to_string(q[0]) +
                                 ",d1=" + std::to_string(q[1]) + ",u2=" + std::to_string(q[2]) +
                                 ",d2=" + std::to_string(q[3]) + ")");
      }
    }
  }

  std::vector<BenchRecord> records;
  volatile std::size_t sink = 0;
  for (std::size_t i = 0; i < engines.size(); ++i) {
    std::array<double, 3> pass_us{};
    std::size_t hits = 0;
    for (int pass = 0; pass < 3; ++pass) {
      auto t0 = clock::now();
      for (const QueryTuple &q : workload)
        hits += engines[i]->answer(q[0], q[1], q[2], q[3]) ? 1 : 0;
      double us = std::chrono::duration<double, std::micro>(clock::now() - t0).count();
      pass_us[pass] = workload.empty() ? 0.0 : us / static_cast<double>(workload.size());
    }
    sink = sink + hits;

    std::array<double, 3> sorted = pass_us;
    std::sort(sorted.begin(), sorted.end());
    BenchRecord r;
    r.engine = std::string(engines[i]->name());
    r.arena_id = arena_id;
    r.exploded_edges = xedges;
    r.preprocess_s = prep_s[i];
    r.mean_query_us = (pass_us[0] + pass_us[1] + pass_us[2]) / 3.0;
    r.median_query_us = sorted[1];
    r.queries = workload.size();
    records.push_back(std::move(r));
  }
  return records;
}

void write_csv(std::ostream &out, const std::vector<BenchRecord> &records) {
  out << "engine,arena,exploded_edges,preprocess_s,mean_query_us,queries\n";
  char buf[64];
  for (const BenchRecord &r : records) {
    std::snprintf(buf, sizeof buf, "%.6f", r.preprocess_s);
    out << r.engine << ',' << r.arena_id << ',' << r.exploded_edges << ',' << buf << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.mean_query_us);
    out << buf << ',' << r.queries << '\n';
  }
}

} // namespace ifds
