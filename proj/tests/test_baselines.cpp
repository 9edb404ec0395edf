// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/baselines.hpp"

#include "ifds/errors.hpp"
#include "ifds/harness.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

using namespace ifds;

TEST_CASE("stack-explicit search on the canonical fixture") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  const Xid src = ex.xid(fixtures::kSm, 0);
  const Xid mid_call = ex.xid(fixtures::kEg, fixtures::kA);

  // Reaching g's exit with the fact requires one pending unreturned call.
  CHECK(dyck_reach(ex, src, mid_call, PathMode::Interprocedural));
  CHECK_FALSE(dyck_reach(ex, src, mid_call, PathMode::SameContext));
  // The same endpoint is fine in same-context mode once the call returns.
  CHECK(dyck_reach(ex, src, ex.xid(fixtures::kEm, fixtures::kA), PathMode::SameContext));
  CHECK_FALSE(
      dyck_reach(ex, ex.xid(fixtures::kSm, fixtures::kA), ex.xid(fixtures::kEm, 0),
                 PathMode::Interprocedural));

  SUBCASE("a vertex reaches itself in both modes") {
    for (Xid x = 0; x < ex.n_xvertices(); ++x) {
      CHECK(dyck_reach(ex, x, x, PathMode::Interprocedural));
      CHECK(dyck_reach(ex, x, x, PathMode::SameContext));
    }
  }
}

TEST_CASE("unreachable targets come back false, not bounded") {
  // Single function, no edges at all: the frontier exhausts immediately.
  Arena a = load_arena_string(R"({"facts":["a"],"functions":[{"name":"f","vertices":[
    {"id":0,"kind":"start"},{"id":1,"kind":"exit"}],"edges":[],"calls":[]}]})");
  ExplodedSupergraph ex = build_exploded(a);
  CHECK_FALSE(dyck_reach(ex, ex.xid(0, 0), ex.xid(1, 0), PathMode::Interprocedural));
  CHECK_FALSE(dyck_reach(ex, ex.xid(0, 1), ex.xid(1, 1), PathMode::SameContext));
}

TEST_CASE("recursion returns positives and refuses unprovable negatives") {
  Arena a = fixtures::recursive_arena();
  ExplodedSupergraph ex = build_exploded(a);

  // Positive answers are exact even though the stack space is unbounded: the
  // witness path is found before any bound can bite.
  CHECK(dyck_reach(ex, ex.xid(0, 0), ex.xid(3, 0), PathMode::SameContext));
  CHECK(dyck_reach(ex, ex.xid(0, 1), ex.xid(3, 1), PathMode::SameContext));
  CHECK(dyck_reach(ex, ex.xid(0, 1), ex.xid(1, 1), PathMode::Interprocedural));

  // (0,a) never reaches (3,0): the search keeps recursing and must give up
  // once it hits the configuration cap instead of claiming false.
  CHECK_THROWS_AS(dyck_reach(ex, ex.xid(0, 1), ex.xid(3, 0), PathMode::Interprocedural, 0, 2000),
                  BoundExceeded);
  CHECK_THROWS_AS(dyck_reach(ex, ex.xid(0, 1), ex.xid(3, 0), PathMode::Interprocedural, 8, 2000),
                  BoundExceeded);
  CHECK_THROWS_AS(dyck_reach_set(ex, ex.xid(0, 0), PathMode::Interprocedural, 0, 2000),
                  BoundExceeded);
}

TEST_CASE("full tabulation from seed sets on the canonical fixture") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);

  BitVec from_start = exhaustive_tabulate(ex, {ex.xid(fixtures::kSm, 0)});
  // Everything is reachable except the fact rows that only a prior fact
  // generation could feed: (s_m,a), (c1,a), (s_g,a).
  std::vector<Xid> excluded = {ex.xid(fixtures::kSm, 1), ex.xid(fixtures::kC1, 1),
                               ex.xid(fixtures::kSg, 1)};
  for (Xid x = 0; x < ex.n_xvertices(); ++x) {
    bool out = std::find(excluded.begin(), excluded.end(), x) != excluded.end();
    CHECK(from_start.test(x) == !out);
  }

  CHECK(exhaustive_tabulate(ex, {}).count() == 0);

  std::vector<Xid> all;
  for (Xid x = 0; x < ex.n_xvertices(); ++x)
    all.push_back(x);
  CHECK(exhaustive_tabulate(ex, all).count() == ex.n_xvertices());
}

TEST_CASE("full tabulation matches the stack-explicit set search") {
  for (std::uint64_t seed = 60; seed <= 69; ++seed) {
    GenSpec spec;
    spec.functions = 3;
    spec.min_lines = 4;
    spec.max_lines = 9;
    spec.facts = 2;
    spec.calls_cap = 2;
    spec.seed = seed;
    spec.tmpl = seed % 2 ? Template::Uninit : Template::Reach;
    Arena a = generate(spec);
    ExplodedSupergraph ex = build_exploded(a);
    for (Xid src = 0; src < ex.n_xvertices(); src += 3) {
      BitVec tab = exhaustive_tabulate(ex, {src});
      BitVec dyck = dyck_reach_set(ex, src, PathMode::Interprocedural);
      for (Xid x = 0; x < ex.n_xvertices(); ++x)
        CHECK(tab.test(x) == dyck.test(x));
    }
  }
}

TEST_CASE("incremental tabulation memoizes work across queries") {
  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  DemandState state(ex);
  CHECK(state.explored() == 0);

  CHECK(state.query(ex.xid(fixtures::kSm, 0), ex.xid(fixtures::kEg, fixtures::kA)));
  const std::uint64_t after_first = state.explored();
  CHECK(after_first > 0);

  // Re-asking the same question touches nothing new.
  CHECK(state.query(ex.xid(fixtures::kSm, 0), ex.xid(fixtures::kEg, fixtures::kA)));
  CHECK(state.explored() == after_first);

  CHECK_FALSE(state.query(ex.xid(fixtures::kSm, fixtures::kA), ex.xid(fixtures::kEm, 0)));
  CHECK(demand_tabulate(state, ex.xid(fixtures::kSm, 0), ex.xid(fixtures::kEm, fixtures::kA)));
  // The tables only ever grow.
  CHECK(state.explored() >= after_first);
}

TEST_CASE("incremental tabulation agrees with the stack-explicit oracle") {
  for (std::uint64_t seed = 70; seed <= 75; ++seed) {
    GenSpec spec;
    spec.functions = 3;
    spec.min_lines = 4;
    spec.max_lines = 8;
    spec.facts = 2;
    spec.calls_cap = 2;
    spec.seed = seed;
    spec.tmpl = Template::Nullness;
    Arena a = generate(spec);
    ExplodedSupergraph ex = build_exploded(a);
    DemandState state(ex);
    std::uint64_t last = 0;
    for (Xid src = 0; src < ex.n_xvertices(); src += 5) {
      BitVec dyck = dyck_reach_set(ex, src, PathMode::Interprocedural);
      for (Xid dst = 0; dst < ex.n_xvertices(); dst += 2) {
        CHECK(state.query(src, dst) == dyck.test(dst));
        CHECK(state.explored() >= last);
        last = state.explored();
      }
    }
  }
}
