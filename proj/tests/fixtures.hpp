// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/arena.hpp"

#include <initializer_list>
#include <utility>

namespace fixtures {

// Canonical two-function fixture used across the suite: `main` calls `g`
// once (call site c1 with return site r1, identity call/ret relations); the
// call-return-site edge keeps only the zero fact, and `g`'s single edge
// generates fact `a` from the zero fact.
//
// Global vertex ids: main = {0 s_m(start), 1 c1(call), 2 r1(retsite),
// 3 e_m(exit)}, g = {4 s_g(start), 5 e_g(exit)}; |D*| = 2, fact `a` = 1.
inline constexpr const char *kArenaA = R"json({
  "facts": ["a"],
  "functions": [
    {
      "name": "main",
      "vertices": [
        {"id": 0, "kind": "start"},
        {"id": 1, "kind": "call", "callee": "g", "retsite": 2},
        {"id": 2, "kind": "retsite"},
        {"id": 3, "kind": "exit"}
      ],
      "edges": [
        {"from": 0, "to": 1, "rel": [[0,0],[1,1]]},
        {"from": 1, "to": 2, "rel": [[0,0]]},
        {"from": 2, "to": 3, "rel": [[0,0],[1,1]]}
      ],
      "calls": [
        {"call": 1, "call_rel": [[0,0],[1,1]], "ret_rel": [[0,0],[1,1]]}
      ]
    },
    {
      "name": "g",
      "vertices": [
        {"id": 0, "kind": "start"},
        {"id": 1, "kind": "exit"}
      ],
      "edges": [
        {"from": 0, "to": 1, "rel": [[0,0],[0,1]]}
      ],
      "calls": []
    }
  ]
})json";

inline ifds::Arena arena_a() { return ifds::load_arena_string(kArenaA); }

inline constexpr ifds::Vid kSm = 0, kC1 = 1, kR1 = 2, kEm = 3, kSg = 4, kEg = 5;
inline constexpr ifds::Fact kA = 1;

// One function `f` that calls itself through identity relations everywhere;
// the self loop in the call graph makes stacks unbounded, so it exercises
// the oracle's bound handling. Vertices: 0 start, 1 call, 2 retsite, 3 exit.
inline constexpr const char *kRecursive = R"json({
  "facts": ["a"],
  "functions": [
    {
      "name": "f",
      "vertices": [
        {"id": 0, "kind": "start"},
        {"id": 1, "kind": "call", "callee": "f", "retsite": 2},
        {"id": 2, "kind": "retsite"},
        {"id": 3, "kind": "exit"}
      ],
      "edges": [
        {"from": 0, "to": 1, "rel": [[0,0],[1,1]]},
        {"from": 1, "to": 2, "rel": [[0,0],[1,1]]},
        {"from": 2, "to": 3, "rel": [[0,0],[1,1]]}
      ],
      "calls": [
        {"call": 1, "call_rel": [[0,0],[1,1]], "ret_rel": [[0,0],[1,1]]}
      ]
    }
  ]
})json";

inline ifds::Arena recursive_arena() { return ifds::load_arena_string(kRecursive); }

inline ifds::FlowRelation make_rel(std::uint32_t dstar,
                                   std::initializer_list<std::pair<int, int>> pairs) {
  ifds::FlowRelation r(dstar);
  for (auto [s, d] : pairs) r.add(static_cast<ifds::Fact>(s), static_cast<ifds::Fact>(d));
  return r;
}

} // namespace fixtures
