// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/summaries.hpp"

#include "ifds/baselines.hpp"
#include "ifds/errors.hpp"
#include "ifds/harness.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace ifds;
using fixtures::make_rel;

namespace {

std::vector<Xid> view_targets(const View &v, Xid x) {
  std::vector<Xid> out;
  v.for_each_out(x, [&](Xid t) { out.push_back(t); });
  std::sort(out.begin(), out.end());
  return out;
}

bool has_target(const View &v, Xid from, Xid to) {
  auto t = view_targets(v, from);
  return std::binary_search(t.begin(), t.end(), to);
}

} // namespace

TEST_CASE("canonical fixture summaries: start-to-exit relations and call-site edges") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  SummaryGraph sg = compute_summaries(ex);

  // g generates `a` from the zero fact and kills `a`.
  CHECK(sg.chi[1] == make_rel(2, {{0, 0}, {0, 1}}));
  // The call-return-site edge keeps only 0, and the summary re-imports
  // g's generation; nothing propagates the source fact `a` across c1.
  CHECK(sg.chi[0] == make_rel(2, {{0, 0}, {0, 1}}));

  CHECK(sg.summary[0] == make_rel(2, {{0, 0}, {0, 1}}));
  CHECK(sg.n_summary_edges() == 2);
}

TEST_CASE("arenas without calls have no summary edges and closure-only chi") {
  std::string doc = R"({"facts":["a"],"functions":[{"name":"f",
    "vertices":[{"id":0,"kind":"start"},{"id":1,"kind":"plain"},{"id":2,"kind":"exit"}],
    "edges":[{"from":0,"to":1,"rel":[[0,0],[0,1]]},{"from":1,"to":2,"rel":[[0,0],[1,1]]}],
    "calls":[]}]})";
  Arena a = load_arena_string(doc);
  ExplodedSupergraph ex = build_exploded(a);
  SummaryGraph sg = compute_summaries(ex);
  CHECK(sg.summary.empty());
  CHECK(sg.n_summary_edges() == 0);
  CHECK(sg.chi[0] == make_rel(2, {{0, 0}, {0, 1}}));
}

TEST_CASE("self-recursive function with identity relations has identity summaries") {
  Arena a = fixtures::recursive_arena();
  ExplodedSupergraph ex = build_exploded(a);
  SummaryGraph sg = compute_summaries(ex);

  CHECK(sg.chi[0] == FlowRelation::identity(2));
  CHECK(sg.summary[0] == FlowRelation::identity(2));

  // The positive verdict is reachable before any stack bound bites...
  CHECK(dyck_reach(ex, ex.xid(0, 0), ex.xid(3, 0), PathMode::SameContext));
  CHECK(dyck_reach(ex, ex.xid(0, 1), ex.xid(3, 1), PathMode::SameContext));
  // ...but a negative on a recursive arena exhausts the stack bound instead
  // of risking a wrong answer.
  CHECK_THROWS_AS(dyck_reach(ex, ex.xid(0, 1), ex.xid(3, 0), PathMode::Interprocedural),
                  BoundExceeded);
}

TEST_CASE("worklist order does not change the fixpoint") {
  for (std::uint64_t seed : {3ull, 17ull, 99ull}) {
    GenSpec spec;
    spec.functions = 4;
    spec.facts = 2;
    spec.calls_cap = 3;
    spec.seed = seed;
    Arena a = generate(spec);
    ExplodedSupergraph ex = build_exploded(a);
    SummaryGraph fifo = compute_summaries(ex, WorklistOrder::Fifo);
    SummaryGraph lifo = compute_summaries(ex, WorklistOrder::Lifo);
    CHECK(fifo.summary == lifo.summary);
    CHECK(fifo.chi == lifo.chi);
  }
}

TEST_CASE("recomputing summaries is idempotent") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  SummaryGraph s1 = compute_summaries(ex);
  SummaryGraph s2 = compute_summaries(ex);
  CHECK(s1.summary == s2.summary);
  CHECK(s1.chi == s2.chi);
}

TEST_CASE("views filter call-start edges but keep summaries") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  SummaryGraph sg = compute_summaries(ex);
  View scvp(sg, PathMode::SameContext), ivp(sg, PathMode::Interprocedural);

  Xid c1_0 = ex.xid(fixtures::kC1, 0);
  CHECK_FALSE(has_target(scvp, c1_0, ex.xid(fixtures::kSg, 0)));
  CHECK(has_target(ivp, c1_0, ex.xid(fixtures::kSg, 0)));

  // Summary edge (c1,0) -> (r1,a) visible in both views.
  CHECK(has_target(scvp, c1_0, ex.xid(fixtures::kR1, fixtures::kA)));
  CHECK(has_target(ivp, c1_0, ex.xid(fixtures::kR1, fixtures::kA)));

  // Exit-to-return-site edges appear in neither view.
  CHECK(view_targets(scvp, ex.xid(fixtures::kEg, fixtures::kA)).empty());
  CHECK(view_targets(ivp, ex.xid(fixtures::kEg, fixtures::kA)).empty());
}

TEST_CASE("view reachability answers the two path classes") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  SummaryGraph sg = compute_summaries(ex);
  View scvp(sg, PathMode::SameContext), ivp(sg, PathMode::Interprocedural);

  Xid src = ex.xid(fixtures::kSm, 0), dst = ex.xid(fixtures::kEg, fixtures::kA);
  CHECK(reach_view(ivp, src, dst));
  CHECK_FALSE(reach_view(scvp, src, dst));
  CHECK(reach_view(scvp, dst, dst));
  CHECK(reach_view(ivp, src, src));

  BitVec all = reach_set_view(ivp, src);
  CHECK(all.test(dst));
  CHECK(all.test(src));
  CHECK_FALSE(all.test(ex.xid(fixtures::kSg, fixtures::kA)));
}

TEST_CASE("removing relation pairs can only shrink the summary edge set") {
  Arena full = fixtures::arena_a();
  std::string weaker = fixtures::kArenaA;
  // Drop g's generating pair; its start-exit edge keeps only the zero fact.
  std::size_t at = weaker.find("[[0,0],[0,1]]");
  REQUIRE(at != std::string::npos);
  weaker.replace(at, 13, "[[0,0]]");
  Arena sub = load_arena_string(weaker);

  ExplodedSupergraph exf = build_exploded(full), exs = build_exploded(sub);
  SummaryGraph sf = compute_summaries(exf), ss = compute_summaries(exs);
  for (Fact s = 0; s < 2; ++s)
    for (Fact d = 0; d < 2; ++d)
      if (ss.summary[0].has(s, d)) CHECK(sf.summary[0].has(s, d));
  CHECK(ss.n_summary_edges() < sf.n_summary_edges());
}

TEST_CASE("chi agrees with the stack oracle on generated corpora") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    GenSpec spec;
    spec.functions = 3;
    spec.min_lines = 4;
    spec.max_lines = 7;
    spec.facts = 2;
    spec.width_cap = 2;
    spec.depth_cap = 3;
    spec.calls_cap = 2;
    spec.tmpl = seed % 3 == 0   ? Template::Reach
                : seed % 3 == 1 ? Template::Uninit
                                : Template::Nullness;
    spec.seed = seed;
    Arena a = generate(spec);
    ExplodedSupergraph ex = build_exploded(a);
    SummaryGraph sg = compute_summaries(ex);

    for (std::uint32_t fi = 0; fi < a.functions.size(); ++fi) {
      const Function &f = a.functions[fi];
      for (Fact d1 = 0; d1 < a.dstar(); ++d1)
        for (Fact d2 = 0; d2 < a.dstar(); ++d2) {
          bool oracle =
              dyck_reach(ex, ex.xid(f.start, d1), ex.xid(f.exit, d2), PathMode::SameContext);
          CHECK(sg.chi[fi].has(d1, d2) == oracle);
        }
    }
  }
}
