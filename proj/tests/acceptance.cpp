// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
//
// Release gate: one line per criterion, PASS or FAIL with the measured
// numbers, nonzero exit when anything fails. Tolerances are pinned as
// constants next to the checks that use them.
#include "ifds/arena.hpp"
#include "ifds/baselines.hpp"
#include "ifds/decomp.hpp"
#include "ifds/engine.hpp"
#include "ifds/errors.hpp"
#include "ifds/harness.hpp"
#include "ifds/summaries.hpp"

#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace ifds;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

GenSpec corpus_spec(std::uint32_t i) {
  GenSpec s;
  s.functions = 1 + i % 6;
  s.min_lines = 4;
  s.max_lines = 6 + i % 7; // up to 12 vertices per function
  s.width_cap = 3;
  s.depth_cap = 4;
  s.facts = 1 + i % 3; // |D*| up to 4
  s.calls_cap = i % 3;
  s.tmpl = static_cast<Template>(i % 3);
  s.seed = 1000 + i;
  return s;
}

// ---------------------------------------------------------------------------
// Criteria 1-3 share one corpus sweep: every (u1,d1,u2,d2) tuple of every
// arena is answered by the engine, the plain view search, the incremental
// tabulator and the stack-explicit oracle, in both path modes; function
// summaries are checked against the oracle's start-to-exit enumeration.

struct SweepResult {
  Outcome interproc, same_context, summaries;
  std::uint64_t arenas = 0, tuples = 0, triples = 0;
  double elapsed = 0.0;
};

SweepResult corpus_sweep(std::uint32_t n_arenas) {
  SweepResult r;
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t bad1 = 0, bad2 = 0, bad3 = 0;
  std::string first1, first2, first3;

  for (std::uint32_t i = 0; i < n_arenas; ++i) {
    Arena a = generate(corpus_spec(i));
    QueryIndex idx = preprocess(a);
    const ExplodedSupergraph &ex = *idx.ex;
    View ivp(*idx.sg, PathMode::Interprocedural);
    View scvp(*idx.sg, PathMode::SameContext);
    DemandState demand(ex);
    const std::uint32_t nx = ex.n_xvertices();

    for (Xid src = 0; src < nx; ++src) {
      const Vid u1 = ex.vertex(src);
      const Fact d1 = ex.fact(src);
      const BitVec dy_i = dyck_reach_set(ex, src, PathMode::Interprocedural);
      const BitVec dy_s = dyck_reach_set(ex, src, PathMode::SameContext);
      const BitVec vw_i = reach_set_view(ivp, src);
      const BitVec vw_s = reach_set_view(scvp, src);
      for (Xid dst = 0; dst < nx; ++dst) {
        const Vid u2 = ex.vertex(dst);
        const Fact d2 = ex.fact(dst);
        ++r.tuples;

        const bool want = dy_i.test(dst);
        if (query(idx, u1, d1, u2, d2).verdict != want || vw_i.test(dst) != want ||
            demand.query(src, dst) != want) {
          if (!bad1++)
            first1 = fmt(" first: seed=%llu u1=%u d1=%u u2=%u d2=%u",
                         (unsigned long long)corpus_spec(i).seed, u1, d1, u2, d2);
        }
        const bool want_sc = dy_s.test(dst);
        if (same_context_query(idx.sc, u1, d1, u2, d2) != want_sc ||
            vw_s.test(dst) != want_sc) {
          if (!bad2++)
            first2 = fmt(" first: seed=%llu u1=%u d1=%u u2=%u d2=%u",
                         (unsigned long long)corpus_spec(i).seed, u1, d1, u2, d2);
        }
      }
    }

    for (std::uint32_t fn = 0; fn < a.functions.size(); ++fn) {
      const Function &f = a.functions[fn];
      for (Fact d1 = 0; d1 < ex.dstar; ++d1) {
        const BitVec set = dyck_reach_set(ex, ex.xid(f.start, d1), PathMode::SameContext);
        for (Fact d2 = 0; d2 < ex.dstar; ++d2) {
          ++r.triples;
          if (idx.sg->chi[fn].has(d1, d2) != set.test(ex.xid(f.exit, d2)))
            if (!bad3++)
              first3 = fmt(" first: seed=%llu fn=%u d1=%u d2=%u",
                           (unsigned long long)corpus_spec(i).seed, fn, d1, d2);
        }
      }
    }
    ++r.arenas;
  }
  r.elapsed = secs_since(t0);

  r.interproc.pass = bad1 == 0;
  r.interproc.detail =
      fmt("%llu arenas, %llu tuples, engine==view==demand==oracle, %llu mismatches (%.1fs)",
          (unsigned long long)r.arenas, (unsigned long long)r.tuples,
          (unsigned long long)bad1, r.elapsed) +
      first1;
  r.same_context.pass = bad2 == 0;
  r.same_context.detail =
      fmt("%llu arenas, %llu tuples, tables==view==oracle, %llu mismatches",
          (unsigned long long)r.arenas, (unsigned long long)r.tuples,
          (unsigned long long)bad2) +
      first2;
  r.summaries.pass = bad3 == 0;
  r.summaries.detail = fmt("%llu (function,d1,d2) triples, chi==oracle, %llu mismatches",
                           (unsigned long long)r.triples, (unsigned long long)bad3) +
                       first3;
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: decomposition verifiers and bounds on generated structures.

std::uint32_t ceil_log2(std::uint64_t x) { // smallest c with 2^c >= x
  std::uint32_t c = 0;
  while ((std::uint64_t{1} << c) < x)
    ++c;
  return c;
}

Outcome decomposition_contracts() {
  Outcome o;
  std::uint32_t cfgs = 0, graphs = 0;
  std::uint64_t bad = 0;
  std::string first;
  auto flag = [&](const std::string &what) {
    if (!bad++)
      first = " first: " + what;
  };

  for (std::uint32_t i = 0; cfgs < 1000; ++i) {
    GenSpec s;
    s.functions = 5;
    s.min_lines = 4;
    s.max_lines = 12;
    s.facts = 1;
    s.calls_cap = 2;
    s.seed = 5000 + i;
    Arena a = generate(s);
    for (std::uint32_t fn = 0; fn < a.functions.size() && cfgs < 1000; ++fn, ++cfgs) {
      UGraph g = UGraph::cfg_skeleton(a, fn);
      TreeDecomposition td = decompose_minfill(g);
      if (!verify_decomposition(g, td).ok())
        flag(fmt("raw decomposition invalid (seed %u fn %u)", 5000 + i, fn));
      TreeDecomposition bal = balance_decomposition(td);
      if (!verify_decomposition(g, bal).ok())
        flag(fmt("balanced decomposition invalid (seed %u fn %u)", 5000 + i, fn));
      const int hmax =
          static_cast<int>(4 * ceil_log2(static_cast<std::uint64_t>(td.bags.size()) + 1) + 4);
      if (bal.height() > hmax)
        flag(fmt("height %d > %d (seed %u fn %u)", bal.height(), hmax, 5000 + i, fn));
      if (bal.width() > 3 * (td.width() + 1) - 1)
        flag(fmt("width %d > %d (seed %u fn %u)", bal.width(), 3 * (td.width() + 1) - 1,
                 5000 + i, fn));
    }
  }

  for (std::uint32_t i = 0; i < 200; ++i, ++graphs) {
    GenSpec s;
    s.functions = 2 + i % 7;
    s.min_lines = 4;
    s.max_lines = 8;
    s.calls_cap = 1 + i % 3;
    s.depth_cap = 2 + i % 4;
    s.seed = 7000 + i;
    Arena a = generate(s);
    UGraph g = UGraph::from_call_graph(build_call_graph(a));
    ElimForest ef = elimination_forest(g);
    if (!verify_elim_forest(g, ef).ok)
      flag(fmt("call forest invalid (seed %u)", 7000 + i));
    if (ef.max_depth() > s.depth_cap)
      flag(fmt("call forest depth %u > cap %u (seed %u)", ef.max_depth(), s.depth_cap,
               7000 + i));
  }

  for (std::uint32_t n = 2; n <= 8; ++n) {
    UGraph k(n);
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v)
        k.add_edge(u, v);
    if (elimination_forest(k).max_depth() != n)
      flag(fmt("complete graph on %u vertices not depth %u", n, n));
  }

  o.pass = bad == 0;
  o.detail = fmt("%u cfgs within bounds, %u call forests verified, complete graphs 2..8 "
                 "exact, %llu violations",
                 cfgs, graphs, (unsigned long long)bad) +
             first;
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 5: scaling across a 10x size step. Thresholds pinned here.

constexpr double kMaxPreprocessRatio = 15.0; // 10x vertices -> at most 15x preprocess
constexpr double kMaxQueryRatio = 2.0;       // mean query stays near size-independent
constexpr double kMinSpeedup = 10.0;         // vs per-query search at the large size
constexpr std::size_t kDfsSample = 200;      // per-query search is too slow for all m

struct Scaled {
  std::uint32_t n = 0;
  double pre_s = 0.0, query_us = 0.0;
  Arena a;
  QueryIndex idx;
  std::vector<QueryTuple> work;
};

Scaled scale_point(std::uint32_t functions, std::uint64_t seed) {
  GenSpec s;
  s.functions = functions;
  s.min_lines = 150;
  s.max_lines = 150;
  s.width_cap = 10;
  s.depth_cap = 20;
  s.facts = 4;
  s.calls_cap = 2;
  s.seed = seed;

  Scaled p;
  p.a = generate(s);
  p.n = p.a.n_vertices();
  p.work = gen_workload(p.a, p.n, seed ^ 0x9e3779b9ull);

  auto t0 = std::chrono::steady_clock::now();
  p.idx = preprocess(p.a);
  p.pre_s = secs_since(t0);

  volatile std::uint64_t sink = 0;
  double total = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    t0 = std::chrono::steady_clock::now();
    for (const QueryTuple &q : p.work)
      sink = sink + query(p.idx, q[0], q[1], q[2], q[3]).verdict;
    total += secs_since(t0);
  }
  p.query_us = total * 1e6 / (3.0 * static_cast<double>(p.work.size()));
  return p;
}

Outcome scaling() {
  Outcome o;
  Scaled small = scale_point(67, 20260825);   // ~1e4 vertices
  Scaled big = scale_point(667, 20260826);    // ~1e5 vertices

  // Per-query search baseline at the large size, on a uniform subsample.
  View ivp(*big.idx.sg, PathMode::Interprocedural);
  const ExplodedSupergraph &ex = *big.idx.ex;
  const std::size_t stride = big.work.size() / kDfsSample;
  volatile std::uint64_t sink = 0;
  std::size_t sampled = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < kDfsSample; ++k) {
    const QueryTuple &q = big.work[k * stride];
    sink = sink + reach_view(ivp, ex.xid(q[0], q[1]), ex.xid(q[2], q[3]));
    ++sampled;
  }
  const double dfs_us = secs_since(t0) * 1e6 / static_cast<double>(sampled);

  const double pre_ratio = big.pre_s / small.pre_s;
  const double query_ratio = big.query_us / small.query_us;
  const double speedup = dfs_us / big.query_us;
  o.pass = pre_ratio <= kMaxPreprocessRatio && query_ratio <= kMaxQueryRatio &&
           speedup >= kMinSpeedup;
  o.detail = fmt("n=%u->%u m=n: preprocess %.2fs->%.2fs (x%.2f<=%.0f), query "
                 "%.3fus->%.3fus (x%.2f<=%.0f), vs per-query search %.0fus "
                 "(x%.0f>=%.0f, %zu-query subsample)",
                 small.n, big.n, small.pre_s, big.pre_s, pre_ratio, kMaxPreprocessRatio,
                 small.query_us, big.query_us, query_ratio, kMaxQueryRatio, dfs_us,
                 speedup, kMinSpeedup, sampled);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 6: persistence round-trips and damage rejection.

Outcome persistence() {
  Outcome o;
  std::uint32_t trips = 0, rejected = 0;
  std::uint64_t bad = 0;
  std::string first;
  auto flag = [&](const std::string &what) {
    if (!bad++)
      first = " first: " + what;
  };

  std::vector<Arena> arenas;
  arenas.push_back(fixtures::arena_a());
  for (std::uint64_t seed : {301u, 302u}) {
    GenSpec s;
    s.functions = 3 + static_cast<std::uint32_t>(seed % 3);
    s.facts = 2;
    s.seed = seed;
    arenas.push_back(generate(s));
  }
  std::string reference;
  for (const Arena &a : arenas) {
    std::ostringstream s1, s2;
    save_index(preprocess(a), s1);
    std::istringstream in(s1.str());
    save_index(load_index(in), s2);
    if (s1.str() != s2.str())
      flag("round-trip bytes differ");
    else
      ++trips;
    if (reference.empty())
      reference = s1.str();
  }

  auto expect_reject = [&](std::string bytes, const char *what, auto tag) {
    using E = decltype(tag);
    try {
      std::istringstream in(bytes);
      load_index(in);
      flag(fmt("%s accepted", what));
    } catch (const E &) {
      ++rejected;
    } catch (const Error &e) {
      flag(fmt("%s raised the wrong error: %s", what, e.what()));
    }
  };
  std::string d = reference;
  d[0] ^= 0x40;
  expect_reject(d, "bad magic", CorruptIndex{""});
  d = reference;
  d[8] = 9;
  expect_reject(d, "future version", VersionMismatch{""});
  d = reference;
  d[10] ^= 0x01;
  expect_reject(d, "flipped fingerprint", FingerprintMismatch{""});
  d = reference;
  d[100] ^= 0x20;
  expect_reject(d, "flipped payload byte", CorruptIndex{""});
  expect_reject(reference.substr(0, reference.size() / 2), "truncated stream",
                CorruptIndex{""});

  o.pass = bad == 0;
  o.detail = fmt("%u round-trips byte-identical, %u damaged streams rejected, %llu failures",
                 trips, rejected, (unsigned long long)bad) +
             first;
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 7: frozen verdicts on the canonical two-function fixture. The
// oracle answers are computed first and the engine is held to them.

Outcome fixture_goldens() {
  Outcome o;
  std::uint64_t bad = 0, checks = 0;
  std::string first;
  auto expect = [&](bool got, bool want, const char *what) {
    ++checks;
    if (got != want && !bad++)
      first = fmt(" first: %s got %d want %d", what, got, want);
  };

  Arena a = fixtures::arena_a();
  ExplodedSupergraph ex = build_exploded(a);
  using fixtures::kA;
  using fixtures::kEg;
  using fixtures::kEm;
  using fixtures::kSg;
  using fixtures::kSm;

  // Stack-explicit oracle first; these are the frozen expectations.
  expect(dyck_reach(ex, ex.xid(kSm, 0), ex.xid(kEg, kA), PathMode::Interprocedural), true,
         "oracle (s_m,0)->(e_g,a) unbalanced");
  expect(dyck_reach(ex, ex.xid(kSm, kA), ex.xid(kEm, kA), PathMode::Interprocedural), false,
         "oracle (s_m,a)->(e_m,a)");
  expect(dyck_reach(ex, ex.xid(kSm, 0), ex.xid(kEg, kA), PathMode::SameContext), false,
         "oracle (s_m,0)->(e_g,a) balanced");
  FlowRelation chi_g(a.dstar());
  for (Fact d1 = 0; d1 < a.dstar(); ++d1)
    for (Fact d2 = 0; d2 < a.dstar(); ++d2)
      if (dyck_reach(ex, ex.xid(kSg, d1), ex.xid(kEg, d2), PathMode::SameContext))
        chi_g.add(d1, d2);
  FlowRelation want_chi(a.dstar());
  want_chi.add(0, 0);
  want_chi.add(0, kA);
  expect(chi_g == want_chi, true, "oracle chi(g) == {(0,0),(0,a)}");

  // Now the engine, held to the oracle's answers.
  QueryIndex idx = preprocess(a);
  expect(idx.sg->chi[1] == chi_g, true, "engine chi(g)");
  expect(query(idx, kSm, 0, kEg, kA).verdict, true, "query (s_m,0)->(e_g,a)");
  expect(query(idx, kSm, kA, kEm, kA).verdict, false, "query (s_m,a)->(e_m,a)");
  expect(same_context_query(idx.sc, kSm, 0, kEg, kA), false,
         "same-context (s_m,0)->(e_g,a)");
  const std::vector<std::uint32_t> want_main0 = {idx.cg.node(1, 0)};
  const std::vector<std::uint32_t> want_maina = {idx.cg.node(1, kA)};
  expect(idx.cg.succ[idx.cg.node(0, 0)] == want_main0, true, "lifted edge (main,0)->(g,0)");
  expect(idx.cg.succ[idx.cg.node(0, kA)] == want_maina, true, "lifted edge (main,a)->(g,a)");
  expect(idx.cg.n_edges() == 2, true, "lifted call graph has exactly 2 edges");

  o.pass = bad == 0;
  o.detail = fmt("%llu golden verdicts match the stack oracle, %llu failures",
                 (unsigned long long)checks, (unsigned long long)bad) +
             first;
  return o;
}

void report(const char *name, const Outcome &o, int &failures) {
  if (!o.pass)
    ++failures;
  std::printf("%s %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
}

} // namespace

int main() {
  int failures = 0;
  const auto t0 = std::chrono::steady_clock::now();

  SweepResult sweep = corpus_sweep(500);
  report("oracle-equivalence", sweep.interproc, failures);
  report("same-context-equivalence", sweep.same_context, failures);
  report("summary-correctness", sweep.summaries, failures);
  report("decomposition-contracts", decomposition_contracts(), failures);
  report("scaling", scaling(), failures);
  report("index-persistence", persistence(), failures);
  report("fixture-goldens", fixture_goldens(), failures);

  std::printf("%s acceptance: %d/7 criteria passed (%.1fs)\n", failures ? "FAIL" : "PASS",
              7 - failures, secs_since(t0));
  return failures ? 1 : 0;
}
