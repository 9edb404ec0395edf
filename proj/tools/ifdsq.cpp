// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
//
// ifdsq — command-line front end: validate and summarize arena documents,
// generate synthetic arenas, build/save query indexes, answer reachability
// queries, and race the query engines on a workload.
#include "ifds/arena.hpp"
#include "ifds/baselines.hpp"
#include "ifds/decomp.hpp"
#include "ifds/engine.hpp"
#include "ifds/errors.hpp"
#include "ifds/harness.hpp"
#include "ifds/samectx.hpp"
#include "ifds/summaries.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

using namespace ifds;

std::uint64_t parse_number(const std::string &s, const std::string &what) {
  std::uint64_t out = 0;
  std::size_t used = 0;
  try {
    out = std::stoull(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw ValidationError(what + ": '" + s + "' is not a number");
  return out;
}

// Vertex spells either a global id or `function/local`.
Vid parse_vertex(const Arena &a, const std::string &s) {
  std::size_t slash = s.find('/');
  if (slash == std::string::npos) {
    std::uint64_t v = parse_number(s, "vertex");
    if (v >= a.n_vertices())
      throw UnknownVertex("vertex " + s + " outside [0," + std::to_string(a.n_vertices()) + ")");
    return static_cast<Vid>(v);
  }
  std::string fn = s.substr(0, slash);
  for (const Function &f : a.functions)
    if (f.name == fn) {
      std::uint64_t local = parse_number(s.substr(slash + 1), "vertex");
      if (local >= f.n_vertices)
        throw UnknownVertex("vertex '" + s + "': function '" + fn + "' has only " +
                            std::to_string(f.n_vertices) + " vertices");
      return f.first + static_cast<Vid>(local);
    }
  throw UnknownVertex("vertex '" + s + "': no function named '" + fn + "'");
}

// Fact spells either an index (0 = zero fact) or a fact name.
Fact parse_fact(const Arena &a, const std::string &s) {
  for (std::size_t i = 0; i < a.facts.size(); ++i)
    if (a.facts[i] == s) return static_cast<Fact>(i + 1);
  std::uint64_t d = parse_number(s, "fact");
  if (d >= a.dstar())
    throw DomainMismatch("fact " + s + " outside domain of size " + std::to_string(a.dstar()));
  return static_cast<Fact>(d);
}

// `V:D` with V a vertex spec and D a fact spec.
std::pair<Vid, Fact> parse_point(const Arena &a, const std::string &s) {
  std::size_t colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    throw ValidationError("point '" + s + "' must look like VERTEX:FACT");
  return {parse_vertex(a, s.substr(0, colon)), parse_fact(a, s.substr(colon + 1))};
}

std::string point_name(const Arena &a, Vid v, Fact d) {
  std::string fact = d == 0 ? std::string("0") : a.facts[d - 1];
  return a.vertex_name(v) + ":" + fact;
}

int run_validate(const std::string &path, bool fix_zero) {
  Arena a = load_arena_file(path, fix_zero);
  std::cout << "ok: " << a.functions.size() << " functions, " << a.n_vertices() << " vertices, "
            << a.facts.size() << " facts, " << a.calls.size() << " call sites\n";
  return 0;
}

int run_stats(const std::string &path, bool csv) {
  Arena a = load_arena_file(path);
  struct Row {
    std::string name;
    int width;
    int height;
  };
  std::vector<Row> rows;
  for (std::uint32_t fi = 0; fi < a.functions.size(); ++fi) {
    TreeDecomposition td = decompose_minfill(UGraph::cfg_skeleton(a, fi));
    TreeDecomposition bal = balance_decomposition(td);
    rows.push_back({a.functions[fi].name, td.width(), bal.height()});
  }
  std::uint32_t cg_depth =
      elimination_forest(UGraph::from_call_graph(build_call_graph(a))).max_depth();

  if (csv) {
    std::cout << "function,width,height\n";
    for (const Row &r : rows) std::cout << r.name << ',' << r.width << ',' << r.height << '\n';
    std::cout << "callgraph," << cg_depth << '\n';
    return 0;
  }
  std::size_t w = 8;
  for (const Row &r : rows) w = std::max(w, r.name.size());
  std::cout << std::left << std::setw(static_cast<int>(w + 2)) << "function"
            << std::setw(7) << "width" << "height\n";
  for (const Row &r : rows)
    std::cout << std::left << std::setw(static_cast<int>(w + 2)) << r.name << std::setw(7)
              << r.width << r.height << '\n';
  std::cout << "call-graph elimination depth: " << cg_depth << '\n';
  return 0;
}

int run_gen(const GenSpec &spec, const std::string &out_path) {
  Arena a = generate(spec);
  std::string doc = canonical_document(a);
  if (out_path.empty()) {
    std::cout << doc << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");
    out << doc << '\n';
    if (!out) throw IoError("write to '" + out_path + "' failed");
    std::cerr << "wrote " << out_path << ": " << a.functions.size() << " functions, "
              << a.n_vertices() << " vertices\n";
  }
  return 0;
}

int run_preprocess(const std::string &arena_path, const std::string &out_path, bool fix_zero) {
  Arena a = load_arena_file(arena_path, fix_zero);
  QueryIndex idx = preprocess(a);
  save_index_file(idx, out_path);
  std::cerr << "wrote " << out_path << ": " << idx.arena->n_vertices() << " vertices, "
            << idx.ex->n_edges() << " exploded edges, " << idx.sg->n_summary_edges()
            << " summary edges\n";
  return 0;
}

void print_witness(const Arena &a, const ExplodedCallGraph &cg, const Witness &w, Vid u1, Fact d1,
                   Vid u2, Fact d2) {
  auto cg_name = [&](std::uint32_t node) {
    return a.functions[node / cg.dstar].name + ":" +
           (node % cg.dstar == 0 ? std::string("0") : a.facts[node % cg.dstar - 1]);
  };
  if (w.same_context) {
    std::cout << "witness: same-context path " << point_name(a, u1, d1) << " -> "
              << point_name(a, u2, d2) << '\n';
    return;
  }
  std::cout << "witness:\n";
  std::cout << "  in-function leg: " << point_name(a, u1, d1) << " -> "
            << point_name(a, w.call, w.call_fact) << " (call vertex)\n";
  std::cout << "  call-graph leg:  " << cg_name(w.entry_node);
  for (auto [from, to] : w.cg_edges) {
    (void)from;
    std::cout << " -> " << cg_name(to);
  }
  std::cout << '\n';
  std::cout << "  final leg:       "
            << point_name(a, a.functions[a.fn_of[u2]].start, w.final_fact) << " -> "
            << point_name(a, u2, d2) << " (same-context)\n";
}

int run_query(const std::string &index_path, const std::string &from, const std::string &to,
              bool same_context, const std::string &engine, bool witness,
              const std::string &arena_path) {
  QueryIndex idx = load_index_file(index_path);
  if (!arena_path.empty()) ensure_match(idx, load_arena_file(arena_path));
  const Arena &a = *idx.arena;
  auto [u1, d1] = parse_point(a, from);
  auto [u2, d2] = parse_point(a, to);

  bool verdict = false;
  if (engine == "param") {
    if (same_context) {
      verdict = same_context_query(idx.sc, u1, d1, u2, d2);
    } else {
      QueryResult r = query(idx, u1, d1, u2, d2, witness);
      verdict = r.verdict;
      std::cout << (verdict ? "true" : "false") << '\n';
      if (witness && r.witness) print_witness(a, idx.cg, *r.witness, u1, d1, u2, d2);
      return 0;
    }
  } else if (engine == "ivp-dfs") {
    View v(*idx.sg, same_context ? PathMode::SameContext : PathMode::Interprocedural);
    verdict = reach_view(v, idx.ex->xid(u1, d1), idx.ex->xid(u2, d2));
  } else if (engine == "dyck") {
    verdict = dyck_reach(*idx.ex, idx.ex->xid(u1, d1), idx.ex->xid(u2, d2),
                         same_context ? PathMode::SameContext : PathMode::Interprocedural);
  } else if (engine == "exhaustive" || engine == "demand") {
    if (same_context)
      throw ValidationError("engine '" + engine + "' answers interprocedural queries only");
    if (engine == "exhaustive") {
      verdict = exhaustive_tabulate(*idx.ex, {idx.ex->xid(u1, d1)}).test(idx.ex->xid(u2, d2));
    } else {
      DemandState st(*idx.ex);
      verdict = st.query(idx.ex->xid(u1, d1), idx.ex->xid(u2, d2));
    }
  } else {
    throw ValidationError("unknown engine '" + engine +
                          "' (expected param, ivp-dfs, exhaustive, demand or dyck)");
  }
  if (witness) throw ValidationError("--witness requires the param engine without --same-context");
  std::cout << (verdict ? "true" : "false") << '\n';
  return 0;
}

int run_bench(const std::string &arena_path, std::uint64_t queries, bool queries_set,
              std::uint64_t seed, const std::string &engines_csv, const std::string &csv_path,
              std::string arena_id) {
  Arena a = load_arena_file(arena_path);
  if (arena_id.empty()) {
    std::size_t from = arena_path.find_last_of('/');
    arena_id = arena_path.substr(from == std::string::npos ? 0 : from + 1);
    std::size_t dot = arena_id.find_last_of('.');
    if (dot != std::string::npos && dot > 0) arena_id = arena_id.substr(0, dot);
  }

  std::vector<std::string> engines;
  std::stringstream ss(engines_csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) engines.push_back(item);
  if (engines.empty()) throw ValidationError("--engines names no engine");

  std::size_t m = queries_set ? static_cast<std::size_t>(queries) : a.n_vertices();
  std::vector<QueryTuple> workload = gen_workload(a, m, seed);
  std::vector<BenchRecord> records = bench(a, workload, engines, arena_id);

  if (csv_path.empty()) {
    write_csv(std::cout, records);
  } else {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open '" + csv_path + "' for writing");
    write_csv(out, records);
    if (!out) throw IoError("write to '" + csv_path + "' failed");
    std::cerr << "wrote " << csv_path << ": " << records.size() << " records\n";
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"on-demand interprocedural data-flow reachability"};
  app.require_subcommand(1);

  std::string arena_path, index_path, out_path, from, to, arena_check;
  bool fix_zero = false, csv_flag = false, same_context = false, witness = false;
  std::string engine = "param";

  CLI::App *validate = app.add_subcommand("validate", "parse and validate an arena document");
  validate->add_option("arena", arena_path, "arena JSON file")->required();
  validate->add_flag("--fix-zero", fix_zero, "insert missing (0,0) relation pairs while loading");

  CLI::App *stats = app.add_subcommand("stats", "per-function width/height and call-graph depth");
  stats->add_option("arena", arena_path, "arena JSON file")->required();
  stats->add_flag("--csv", csv_flag, "machine-readable output");

  GenSpec spec;
  std::string tmpl_name = "reach";
  CLI::App *gen = app.add_subcommand("gen", "generate a synthetic arena");
  gen->add_option("-k,--functions", spec.functions, "function count");
  gen->add_option("--min-lines", spec.min_lines, "minimum vertices per function");
  gen->add_option("--max-lines", spec.max_lines, "maximum vertices per function");
  gen->add_option("-w,--width-cap", spec.width_cap, "per-CFG treewidth cap");
  gen->add_option("-d,--depth-cap", spec.depth_cap, "call-graph elimination depth cap");
  gen->add_option("--facts", spec.facts, "data fact count |D|");
  gen->add_option("--calls-cap", spec.calls_cap, "call sites per function cap");
  gen->add_option("--template", tmpl_name, "reach | uninit | nullness");
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("-o,--out", out_path, "output file (default stdout)");

  CLI::App *prep = app.add_subcommand("preprocess", "build and save a query index");
  prep->add_option("arena", arena_path, "arena JSON file")->required();
  prep->add_option("-o,--out", out_path, "index output file")->required();
  prep->add_flag("--fix-zero", fix_zero, "insert missing (0,0) relation pairs while loading");

  CLI::App *query = app.add_subcommand("query", "answer one reachability query from an index");
  query->add_option("index", index_path, "index file from `preprocess`")->required();
  query->add_option("--from", from, "source VERTEX:FACT (vertex = id or fn/local)")->required();
  query->add_option("--to", to, "target VERTEX:FACT")->required();
  query->add_flag("--same-context", same_context, "restrict to same-context paths");
  query->add_option("--engine", engine, "param | ivp-dfs | exhaustive | demand | dyck");
  query->add_flag("--witness", witness, "print a re-verifiable path sketch");
  query->add_option("--arena", arena_check, "cross-check the index against this arena file");

  std::uint64_t queries = 0, seed = 1;
  std::string engines_csv = "param,ivp-dfs,demand", csv_path, arena_id;
  CLI::App *bench_cmd = app.add_subcommand("bench", "race engines on a random workload");
  bench_cmd->add_option("arena", arena_path, "arena JSON file")->required();
  CLI::Option *q_opt = bench_cmd->add_option("--queries", queries, "workload size (default: vertex count)");
  bench_cmd->add_option("--seed", seed, "workload seed");
  bench_cmd->add_option("--engines", engines_csv, "comma-separated engine list");
  bench_cmd->add_option("--csv", csv_path, "CSV output file (default stdout)");
  bench_cmd->add_option("--id", arena_id, "arena id for the CSV (default: file stem)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(arena_path, fix_zero);
    if (stats->parsed()) return run_stats(arena_path, csv_flag);
    if (gen->parsed()) {
      spec.tmpl = ifds::template_from_name(tmpl_name);
      return run_gen(spec, out_path);
    }
    if (prep->parsed()) return run_preprocess(arena_path, out_path, fix_zero);
    if (query->parsed())
      return run_query(index_path, from, to, same_context, engine, witness, arena_check);
    if (bench_cmd->parsed())
      return run_bench(arena_path, queries, q_opt->count() > 0, seed, engines_csv, csv_path,
                       arena_id);
  } catch (const ifds::EngineDisagreement &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ifds::IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ifds::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
