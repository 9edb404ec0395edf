// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include "ifds/arena.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ifds {

// Deterministic splitmix64 stream; all generator randomness flows through
// this so identical seeds give identical arenas on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform draw from [0, n); n must be positive.
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }
  // Uniform draw from [lo, hi], inclusive.
  std::uint32_t range(std::uint32_t lo, std::uint32_t hi) { return lo + below(hi - lo + 1); }
  // True with probability pct/100.
  bool chance(std::uint32_t pct) { return below(100) < pct; }

private:
  std::uint64_t s_;
};

enum class Template { Reach, Uninit, Nullness };

Template template_from_name(std::string_view name); // reach | uninit | nullness

// Knobs for synthetic arenas. Functions get structured CFGs (sequences,
// branches, loops nested inside single-entry blocks), so their treewidth is
// small by construction; the call graph is drawn as a forest of depth at
// most depth_cap with calls going only to ancestors, so its elimination
// depth is bounded by construction too. Both caps are re-checked with the
// engine's own heuristics before an arena is returned.
struct GenSpec {
  std::uint32_t functions = 2;  // k
  std::uint32_t min_lines = 4;  // vertices per function, uniform draw
  std::uint32_t max_lines = 12;
  std::uint32_t width_cap = 3;  // per-CFG heuristic treewidth cap
  std::uint32_t depth_cap = 4;  // call-graph elimination-forest depth cap
  std::uint32_t facts = 1;      // |D|
  std::uint32_t calls_cap = 2;  // call sites per function
  Template tmpl = Template::Reach;
  std::uint64_t seed = 1;
};

// Deterministic for a fixed spec. Throws InfeasibleSpec when the knobs are
// contradictory or the caps cannot be met after bounded re-draws.
Arena generate(const GenSpec &spec);

// (u1, d1, u2, d2), all indices raw.
using QueryTuple = std::array<std::uint32_t, 4>;

// m uniformly drawn tuples; requires m <= vertex count.
std::vector<QueryTuple> gen_workload(const Arena &a, std::size_t m, std::uint64_t seed);

// Uniform facade over the query engines the benchmark can race.
class QueryEngine {
public:
  virtual ~QueryEngine() = default;
  virtual std::string_view name() const = 0;
  virtual void prepare(const Arena &a) = 0;
  virtual bool answer(Vid u1, Fact d1, Vid u2, Fact d2) = 0;
};

// name in {param, ivp-dfs, exhaustive, demand, dyck}.
std::unique_ptr<QueryEngine> make_engine(std::string_view name);

struct BenchRecord {
  std::string engine;
  std::string arena_id;
  std::uint64_t exploded_edges = 0;
  double preprocess_s = 0.0;
  double mean_query_us = 0.0;
  double median_query_us = 0.0; // median of the per-pass means
  std::size_t queries = 0;
};

// Prepares every engine, cross-checks all answers on the workload (throwing
// EngineDisagreement before any timing is reported), then times three passes
// per engine.
std::vector<BenchRecord> bench(const Arena &a, const std::vector<QueryTuple> &workload,
                               const std::vector<std::string> &engines,
                               const std::string &arena_id);

// Same contract over caller-supplied engine instances (rows named by
// engine->name()); lets tests inject deliberately wrong engines.
std::vector<BenchRecord> bench(const Arena &a, const std::vector<QueryTuple> &workload,
                               std::vector<std::unique_ptr<QueryEngine>> engines,
                               const std::string &arena_id);

// Exact header: engine,arena,exploded_edges,preprocess_s,mean_query_us,queries
void write_csv(std::ostream &out, const std::vector<BenchRecord> &records);

} // namespace ifds
