// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/harness.hpp"

#include "ifds/decomp.hpp"
#include "ifds/errors.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace ifds;

namespace {

// Wraps a real engine and negates every verdict; used to prove the benchmark
// gate actually trips.
class ContraryEngine : public QueryEngine {
public:
  explicit ContraryEngine(std::unique_ptr<QueryEngine> inner) : inner_(std::move(inner)) {}
  std::string_view name() const override { return "contrary"; }
  void prepare(const Arena &a) override { inner_->prepare(a); }
  bool answer(Vid u1, Fact d1, Vid u2, Fact d2) override {
    return !inner_->answer(u1, d1, u2, d2);
  }

private:
  std::unique_ptr<QueryEngine> inner_;
};

} // namespace

TEST_CASE("generation is deterministic and respects its caps") {
  GenSpec spec;
  spec.functions = 4;
  spec.min_lines = 5;
  spec.max_lines = 11;
  spec.width_cap = 3;
  spec.depth_cap = 3;
  spec.facts = 2;
  spec.calls_cap = 2;
  spec.seed = 11;

  Arena a = generate(spec);
  Arena b = generate(spec);
  CHECK(canonical_document(a) == canonical_document(b));
  spec.seed = 12;
  CHECK(canonical_document(generate(spec)) != canonical_document(a));

  CHECK(a.functions.size() == 4);
  CHECK(a.facts.size() == 2);
  for (const Function &f : a.functions) {
    CHECK(f.n_vertices >= 5);
    CHECK(f.n_vertices <= 11);
    CHECK(f.call_sites.size() <= 2);
    TreeDecomposition td = decompose_minfill(UGraph::cfg_skeleton(a, a.fn_of[f.first]));
    CHECK(verify_decomposition(UGraph::cfg_skeleton(a, a.fn_of[f.first]), td).ok());
    CHECK(td.width() <= 3);
  }
  UGraph cgraph = UGraph::from_call_graph(build_call_graph(a));
  ElimForest ef = elimination_forest(cgraph);
  CHECK(verify_elim_forest(cgraph, ef).ok);
  CHECK(ef.max_depth() <= 3);
}

TEST_CASE("a tight spec still comes out consistent") {
  GenSpec spec;
  spec.functions = 2;
  spec.width_cap = 2;
  spec.depth_cap = 2;
  spec.facts = 1;
  spec.seed = 7;
  Arena a = generate(spec);
  CHECK(a.functions.size() == 2);
  for (std::uint32_t fn = 0; fn < 2; ++fn)
    CHECK(decompose_minfill(UGraph::cfg_skeleton(a, fn)).width() <= 2);
  CHECK(elimination_forest(UGraph::from_call_graph(build_call_graph(a))).max_depth() <= 2);
}

TEST_CASE("a single function with no call budget has an edgeless call graph") {
  GenSpec spec;
  spec.functions = 1;
  spec.calls_cap = 0;
  spec.seed = 3;
  Arena a = generate(spec);
  CHECK(a.functions.size() == 1);
  CHECK(a.calls.empty());
  CallGraph cg = build_call_graph(a);
  CHECK(cg.callees[0].empty());
}

TEST_CASE("contradictory knobs are refused up front") {
  const GenSpec base;
  auto broken = [&](auto tweak) {
    GenSpec s = base;
    tweak(s);
    CHECK_THROWS_AS(generate(s), InfeasibleSpec);
  };
  broken([](GenSpec &s) { s.functions = 0; });
  broken([](GenSpec &s) { s.min_lines = 1; });
  broken([](GenSpec &s) { s.min_lines = 9, s.max_lines = 4; });
  broken([](GenSpec &s) { s.width_cap = 0; });
  broken([](GenSpec &s) { s.depth_cap = 0; });
  broken([](GenSpec &s) { s.facts = 64; });
}

TEST_CASE("workloads are sized, bounded and reproducible") {
  Arena a = fixtures::arena_a();
  CHECK(gen_workload(a, 0, 1).empty());

  std::vector<QueryTuple> w = gen_workload(a, a.n_vertices(), 42);
  CHECK(w.size() == 6);
  CHECK(w == gen_workload(a, a.n_vertices(), 42));
  for (const QueryTuple &t : w) {
    CHECK(t[0] < a.n_vertices());
    CHECK(t[1] < a.dstar());
    CHECK(t[2] < a.n_vertices());
    CHECK(t[3] < a.dstar());
  }
  CHECK_THROWS_AS(gen_workload(a, a.n_vertices() + 1, 1), ValidationError);

  // On a larger arena two seeds almost surely draw different tuples.
  GenSpec spec;
  spec.functions = 10;
  spec.min_lines = 10;
  spec.max_lines = 12;
  spec.facts = 3;
  spec.seed = 9;
  Arena big = generate(spec);
  REQUIRE(big.n_vertices() >= 100);
  CHECK(gen_workload(big, 50, 1) != gen_workload(big, 50, 2));
}

TEST_CASE("benchmark races engines and reports one row each") {
  Arena a = fixtures::arena_a();
  std::vector<QueryTuple> w = gen_workload(a, 6, 5);
  std::vector<BenchRecord> rec = bench(a, w, {"param", "ivp-dfs", "dyck"}, "fixture-a");

  REQUIRE(rec.size() == 3);
  CHECK(rec[0].engine == "param");
  CHECK(rec[1].engine == "ivp-dfs");
  CHECK(rec[2].engine == "dyck");
  for (const BenchRecord &r : rec) {
    CHECK(r.arena_id == "fixture-a");
    CHECK(r.exploded_edges == 11);
    CHECK(r.queries == 6);
    CHECK(r.preprocess_s >= 0.0);
    CHECK(r.mean_query_us >= 0.0);
    CHECK(r.median_query_us >= 0.0);
  }

  const std::vector<std::string> two_names = {"param", "demand"};
  std::vector<BenchRecord> none = bench(a, std::vector<QueryTuple>{}, two_names, "fixture-a");
  REQUIRE(none.size() == 2);
  CHECK(none[0].queries == 0);
  CHECK(none[1].queries == 0);
}

TEST_CASE("the agreement gate names the engines that fall out of line") {
  Arena a = fixtures::arena_a();
  std::vector<QueryTuple> w = gen_workload(a, 6, 5);
  std::vector<std::unique_ptr<QueryEngine>> engines;
  engines.push_back(make_engine("param"));
  engines.push_back(std::make_unique<ContraryEngine>(make_engine("dyck")));
  try {
    bench(a, w, std::move(engines), "fixture-a");
    FAIL("expected the cross-check to throw");
  } catch (const EngineDisagreement &e) {
    const std::string msg = e.what();
    CHECK(msg.find("param") != std::string::npos);
    CHECK(msg.find("contrary") != std::string::npos);
    CHECK(msg.find("u1=") != std::string::npos);
  }
}

TEST_CASE("csv output keeps its stable header and row shape") {
  BenchRecord r;
  r.engine = "param";
  r.arena_id = "t1";
  r.exploded_edges = 11;
  r.preprocess_s = 0.25;
  r.mean_query_us = 3.5;
  r.queries = 6;
  std::ostringstream out;
  write_csv(out, {r});
  std::istringstream lines(out.str());
  std::string header, row, extra;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row));
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(header == "engine,arena,exploded_edges,preprocess_s,mean_query_us,queries");
  CHECK(row == "param,t1,11,0.250000,3.500,6");
}

TEST_CASE("names map to templates and engines strictly") {
  CHECK(template_from_name("reach") == Template::Reach);
  CHECK(template_from_name("uninit") == Template::Uninit);
  CHECK(template_from_name("nullness") == Template::Nullness);
  CHECK_THROWS_AS(template_from_name("taint"), ValidationError);

  for (const char *n : {"param", "ivp-dfs", "exhaustive", "demand", "dyck"}) {
    std::unique_ptr<QueryEngine> e = make_engine(n);
    REQUIRE(e != nullptr);
    CHECK(e->name() == n);
  }
  CHECK_THROWS_AS(make_engine("oracle"), ValidationError);
}

TEST_CASE("all five engines answer a mixed workload identically") {
  GenSpec spec;
  spec.functions = 3;
  spec.min_lines = 4;
  spec.max_lines = 9;
  spec.facts = 2;
  spec.calls_cap = 2;
  spec.seed = 21;
  spec.tmpl = Template::Nullness;
  Arena a = generate(spec);
  std::vector<QueryTuple> w = gen_workload(a, a.n_vertices(), 77);
  std::vector<BenchRecord> rec =
      bench(a, w, {"param", "ivp-dfs", "exhaustive", "demand", "dyck"}, "gen-21");
  CHECK(rec.size() == 5); // the gate inside bench is the real assertion
}
