// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/arena.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <json.hpp>
#include <openssl/sha.h>

namespace ifds {

using nlohmann::json;

const char *to_string(VertexKind k) {
  switch (k) {
  case VertexKind::Start: return "start";
  case VertexKind::Exit: return "exit";
  case VertexKind::Call: return "call";
  case VertexKind::RetSite: return "retsite";
  case VertexKind::Plain: return "plain";
  }
  return "?";
}

FlowRelation FlowRelation::identity(std::uint32_t dstar) {
  FlowRelation r(dstar);
  for (Fact d = 0; d < dstar; ++d) r.add(d, d);
  return r;
}

std::vector<std::pair<Fact, Fact>> FlowRelation::pairs() const {
  std::vector<std::pair<Fact, Fact>> out;
  for (Fact s = 0; s < dstar(); ++s) {
    std::uint64_t m = rows_[s];
    while (m) {
      Fact d = static_cast<Fact>(std::countr_zero(m));
      out.emplace_back(s, d);
      m &= m - 1;
    }
  }
  return out;
}

FlowRelation compose_relations(const FlowRelation &r1, const FlowRelation &r2) {
  if (r1.dstar() != r2.dstar())
    throw DomainMismatch("compose_relations: fact domains differ (" +
                         std::to_string(r1.dstar()) + " vs " + std::to_string(r2.dstar()) + ")");
  FlowRelation out(r1.dstar());
  for (Fact s = 0; s < r1.dstar(); ++s) {
    std::uint64_t m = r1.row(s);
    std::uint64_t acc = 0;
    while (m) {
      Fact mid = static_cast<Fact>(std::countr_zero(m));
      acc |= r2.row(mid);
      m &= m - 1;
    }
    if (acc)
      for (Fact d = 0; d < r1.dstar(); ++d)
        if ((acc >> d) & 1u) out.add(s, d);
  }
  return out;
}

std::uint64_t apply_relation(const FlowRelation &r, std::uint64_t facts) {
  std::uint64_t out = 0;
  std::uint64_t m = facts;
  while (m) {
    Fact s = static_cast<Fact>(std::countr_zero(m));
    if (s >= r.dstar())
      throw DomainMismatch("apply_relation: fact " + std::to_string(s) + " outside domain of size " +
                           std::to_string(r.dstar()));
    out |= r.row(s);
    m &= m - 1;
  }
  return out;
}

std::string Arena::vertex_name(Vid v) const {
  const Function &f = functions[fn_of[v]];
  return f.name + "/" + std::to_string(v - f.first);
}

namespace {

[[noreturn]] void fail(const std::string &where, const std::string &what) {
  throw ValidationError(where + ": " + what);
}

FlowRelation parse_rel(const json &j, std::uint32_t dstar, bool fix_zero, const std::string &where) {
  if (!j.is_array()) fail(where, "relation must be an array of [src,dst] pairs");
  FlowRelation r(dstar);
  for (const auto &p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned())
      fail(where, "relation entries must be [src,dst] index pairs");
    std::uint64_t s = p[0].get<std::uint64_t>(), d = p[1].get<std::uint64_t>();
    if (s >= dstar || d >= dstar)
      fail(where, "relation pair (" + std::to_string(s) + "," + std::to_string(d) +
                      ") outside fact domain of size " + std::to_string(dstar));
    r.add(static_cast<Fact>(s), static_cast<Fact>(d));
  }
  if (!r.has(0, 0)) {
    if (fix_zero)
      r.add(0, 0);
    else
      fail(where, "relation lacks the (0,0) zero-fact pair (use fix-zero ingestion to insert it)");
  }
  return r;
}

// Bipartite degree check for interprocedural relations: every left and right
// node of the relation graph must have degree <= bandwidth.
void check_bandwidth(const FlowRelation &r, std::uint32_t beta, const std::string &where) {
  std::vector<std::uint32_t> right(r.dstar(), 0);
  for (Fact s = 0; s < r.dstar(); ++s) {
    std::uint32_t left = 0;
    std::uint64_t m = r.row(s);
    while (m) {
      ++left;
      ++right[std::countr_zero(m)];
      m &= m - 1;
    }
    if (left > beta)
      fail(where, "fact " + std::to_string(s) + " has out-degree " + std::to_string(left) +
                      " > bandwidth " + std::to_string(beta));
  }
  for (Fact d = 0; d < r.dstar(); ++d)
    if (right[d] > beta)
      fail(where, "fact " + std::to_string(d) + " has in-degree " + std::to_string(right[d]) +
                      " > bandwidth " + std::to_string(beta));
}

} // namespace

Arena load_arena(std::istream &in, bool fix_zero) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw ParseError(std::string("arena document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("arena document: top level must be an object");

  Arena a;

  // ---- fact domain ----
  if (!doc.contains("facts") || !doc["facts"].is_array())
    fail("document", "'facts' must be an array of fact names");
  std::set<std::string> seen_facts;
  for (const auto &f : doc["facts"]) {
    if (!f.is_string() || f.get<std::string>().empty())
      fail("facts", "fact names must be non-empty strings");
    if (!seen_facts.insert(f.get<std::string>()).second)
      fail("facts", "duplicate fact name '" + f.get<std::string>() + "'");
    a.facts.push_back(f.get<std::string>());
  }
  if (a.facts.size() > 63) fail("facts", "at most 63 data facts are supported");
  const std::uint32_t dstar = a.dstar();

  if (doc.contains("bandwidth")) {
    if (!doc["bandwidth"].is_number_unsigned() || doc["bandwidth"].get<std::uint64_t>() == 0)
      fail("document", "'bandwidth' must be a positive integer");
    a.bandwidth = doc["bandwidth"].get<std::uint32_t>();
  }

  if (!doc.contains("functions") || !doc["functions"].is_array())
    fail("document", "'functions' must be an array");

  // ---- pass 1: names and sizes (for callee resolution and global ids) ----
  std::unordered_map<std::string, std::uint32_t> fn_index;
  for (const auto &jf : doc["functions"]) {
    if (!jf.is_object() || !jf.contains("name") || !jf["name"].is_string())
      fail("functions", "every function needs a string 'name'");
    std::string name = jf["name"].get<std::string>();
    if (name.empty()) fail("functions", "function names must be non-empty");
    if (fn_index.count(name)) fail("functions", "duplicate function name '" + name + "'");
    fn_index[name] = static_cast<std::uint32_t>(a.functions.size());
    Function f;
    f.name = name;
    if (!jf.contains("vertices") || !jf["vertices"].is_array() || jf["vertices"].empty())
      fail("function '" + name + "'", "'vertices' must be a non-empty array");
    f.n_vertices = static_cast<std::uint32_t>(jf["vertices"].size());
    a.functions.push_back(std::move(f));
  }
  Vid next = 0;
  for (auto &f : a.functions) {
    f.first = next;
    next += f.n_vertices;
  }
  a.kind.assign(next, VertexKind::Plain);
  a.fn_of.assign(next, 0);
  a.call_of.assign(next, -1);

  // ---- pass 2: vertices, edges, calls ----
  std::uint32_t fi = 0;
  for (const auto &jf : doc["functions"]) {
    Function &f = a.functions[fi];
    const std::string where = "function '" + f.name + "'";

    std::vector<bool> id_seen(f.n_vertices, false);
    // Document-side call metadata, keyed by local id.
    std::unordered_map<Vid, std::pair<std::string, Vid>> call_meta; // call -> (callee, retsite)
    std::int32_t start_local = -1, exit_local = -1;

    for (const auto &jv : jf["vertices"]) {
      if (!jv.is_object() || !jv.contains("id") || !jv["id"].is_number_unsigned())
        fail(where, "every vertex needs an unsigned 'id'");
      std::uint64_t id = jv["id"].get<std::uint64_t>();
      if (id >= f.n_vertices)
        fail(where, "vertex id " + std::to_string(id) + " not dense in [0," +
                        std::to_string(f.n_vertices) + ")");
      if (id_seen[id]) fail(where, "duplicate vertex id " + std::to_string(id));
      id_seen[id] = true;
      if (!jv.contains("kind") || !jv["kind"].is_string())
        fail(where, "vertex " + std::to_string(id) + " needs a string 'kind'");
      std::string ks = jv["kind"].get<std::string>();
      VertexKind k;
      if (ks == "start") k = VertexKind::Start;
      else if (ks == "exit") k = VertexKind::Exit;
      else if (ks == "call") k = VertexKind::Call;
      else if (ks == "retsite") k = VertexKind::RetSite;
      else if (ks == "plain") k = VertexKind::Plain;
      else fail(where, "vertex " + std::to_string(id) + ": unknown kind '" + ks + "'");

      if (k == VertexKind::Call) {
        if (!jv.contains("callee") || !jv["callee"].is_string())
          fail(where, "call vertex " + std::to_string(id) + " needs a 'callee' function name");
        if (!jv.contains("retsite") || !jv["retsite"].is_number_unsigned())
          fail(where, "call vertex " + std::to_string(id) + " needs a 'retsite' vertex id");
        call_meta[static_cast<Vid>(id)] = {jv["callee"].get<std::string>(),
                                           jv["retsite"].get<Vid>()};
      } else if (jv.contains("callee") || jv.contains("retsite")) {
        fail(where, "vertex " + std::to_string(id) + ": 'callee'/'retsite' only belong on call vertices");
      }

      if (k == VertexKind::Start) {
        if (start_local >= 0) fail(where, "more than one start vertex");
        start_local = static_cast<std::int32_t>(id);
      }
      if (k == VertexKind::Exit) {
        if (exit_local >= 0) fail(where, "more than one exit vertex");
        exit_local = static_cast<std::int32_t>(id);
      }
      a.kind[f.first + id] = k;
      a.fn_of[f.first + id] = fi;
    }
    if (start_local < 0) fail(where, "no start vertex");
    if (exit_local < 0) fail(where, "no exit vertex");
    f.start = f.first + static_cast<Vid>(start_local);
    f.exit = f.first + static_cast<Vid>(exit_local);

    // Call/ret-site partnership.
    std::unordered_map<Vid, Vid> ret_partner; // local retsite -> local call
    for (const auto &[call, meta] : call_meta) {
      Vid rs = meta.second;
      if (rs >= f.n_vertices || a.kind[f.first + rs] != VertexKind::RetSite)
        fail(where, "call vertex " + std::to_string(call) + ": retsite " + std::to_string(rs) +
                        " is not a retsite vertex");
      if (!ret_partner.emplace(rs, call).second)
        fail(where, "retsite " + std::to_string(rs) + " is shared by two call vertices");
    }
    for (Vid v = 0; v < f.n_vertices; ++v)
      if (a.kind[f.first + v] == VertexKind::RetSite && !ret_partner.count(v))
        fail(where, "retsite " + std::to_string(v) + " has no call partner");

    // Edges.
    if (!jf.contains("edges") || !jf["edges"].is_array())
      fail(where, "'edges' must be an array");
    std::set<std::pair<Vid, Vid>> seen_edges;
    for (const auto &je : jf["edges"]) {
      if (!je.is_object() || !je.contains("from") || !je.contains("to") || !je.contains("rel") ||
          !je["from"].is_number_unsigned() || !je["to"].is_number_unsigned())
        fail(where, "every edge needs 'from', 'to' and 'rel'");
      Vid u = je["from"].get<Vid>(), v = je["to"].get<Vid>();
      const std::string ewhere = where + ", edge " + std::to_string(u) + "->" + std::to_string(v);
      if (u >= f.n_vertices || v >= f.n_vertices) fail(ewhere, "endpoint outside this function");
      if (u == v) fail(ewhere, "self loops are not allowed");
      if (!seen_edges.emplace(u, v).second) fail(ewhere, "duplicate edge");

      VertexKind ku = a.kind[f.first + u], kv = a.kind[f.first + v];
      if (ku == VertexKind::Call && call_meta[u].second != v)
        fail(ewhere, "call vertices have no out-edges besides the one to their retsite");
      if (ku == VertexKind::Exit)
        fail(ewhere, "exit vertices have no intraprocedural out-edges");
      if (kv == VertexKind::RetSite && (ku != VertexKind::Call || call_meta[u].second != v))
        fail(ewhere, "retsite in-edges must come from the partner call vertex");

      Edge e;
      e.from = f.first + u;
      e.to = f.first + v;
      e.rel = parse_rel(je["rel"], dstar, fix_zero, ewhere);
      f.edges.push_back(std::move(e));
    }
    std::sort(f.edges.begin(), f.edges.end(),
              [](const Edge &x, const Edge &y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });

    // Call-site relations.
    if (!jf.contains("calls") || !jf["calls"].is_array())
      fail(where, "'calls' must be an array");
    std::set<Vid> seen_calls;
    for (const auto &jc : jf["calls"]) {
      if (!jc.is_object() || !jc.contains("call") || !jc["call"].is_number_unsigned() ||
          !jc.contains("call_rel") || !jc.contains("ret_rel"))
        fail(where, "every calls entry needs 'call', 'call_rel' and 'ret_rel'");
      Vid c = jc["call"].get<Vid>();
      const std::string cwhere = where + ", call site at vertex " + std::to_string(c);
      if (c >= f.n_vertices || a.kind[f.first + c] != VertexKind::Call)
        fail(cwhere, "'call' must name a call vertex");
      if (!seen_calls.insert(c).second) fail(cwhere, "duplicate calls entry");

      const auto &meta = call_meta[c];
      auto it = fn_index.find(meta.first);
      if (it == fn_index.end()) fail(cwhere, "callee '" + meta.first + "' names no function");

      CallSite site;
      site.call = f.first + c;
      site.ret_site = f.first + meta.second;
      site.callee = it->second;
      site.call_rel = parse_rel(jc["call_rel"], dstar, fix_zero, cwhere + " (call_rel)");
      site.ret_rel = parse_rel(jc["ret_rel"], dstar, fix_zero, cwhere + " (ret_rel)");
      check_bandwidth(site.call_rel, a.bandwidth, cwhere + " (call_rel)");
      check_bandwidth(site.ret_rel, a.bandwidth, cwhere + " (ret_rel)");
      a.calls.push_back(std::move(site));
    }
    for (const auto &[call, meta] : call_meta)
      if (!seen_calls.count(call))
        fail(where, "call vertex " + std::to_string(call) + " has no calls entry");
    ++fi;
  }

  // Deterministic call-site order: by call vertex id.
  std::sort(a.calls.begin(), a.calls.end(),
            [](const CallSite &x, const CallSite &y) { return x.call < y.call; });
  for (std::uint32_t ci = 0; ci < a.calls.size(); ++ci) {
    const CallSite &s = a.calls[ci];
    a.call_of[s.call] = static_cast<std::int32_t>(ci);
    a.call_of[s.ret_site] = static_cast<std::int32_t>(ci);
    a.functions[a.fn_of[s.call]].call_sites.push_back(ci);
  }
  return a;
}

Arena load_arena_file(const std::string &path, bool fix_zero) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return load_arena(in, fix_zero);
}

Arena load_arena_string(const std::string &text, bool fix_zero) {
  std::istringstream in(text);
  return load_arena(in, fix_zero);
}

namespace {

json rel_to_json(const FlowRelation &r) {
  json out = json::array();
  for (auto [s, d] : r.pairs()) out.push_back(json::array({s, d}));
  return out;
}

} // namespace

std::string canonical_document(const Arena &a) {
  json doc;
  doc["facts"] = a.facts;
  doc["bandwidth"] = a.bandwidth;
  json fns = json::array();
  for (std::uint32_t fi = 0; fi < a.functions.size(); ++fi) {
    const Function &f = a.functions[fi];
    json jf;
    jf["name"] = f.name;
    json verts = json::array();
    for (Vid v = 0; v < f.n_vertices; ++v) {
      json jv;
      jv["id"] = v;
      jv["kind"] = to_string(a.kind[f.first + v]);
      if (a.kind[f.first + v] == VertexKind::Call) {
        const CallSite &s = a.calls[a.call_of[f.first + v]];
        jv["callee"] = a.functions[s.callee].name;
        jv["retsite"] = s.ret_site - f.first;
      }
      verts.push_back(std::move(jv));
    }
    jf["vertices"] = std::move(verts);
    json edges = json::array();
    for (const Edge &e : f.edges) {
      json je;
      je["from"] = e.from - f.first;
      je["to"] = e.to - f.first;
      je["rel"] = rel_to_json(e.rel);
      edges.push_back(std::move(je));
    }
    jf["edges"] = std::move(edges);
    json calls = json::array();
    for (std::uint32_t ci : f.call_sites) {
      const CallSite &s = a.calls[ci];
      json jc;
      jc["call"] = s.call - f.first;
      jc["call_rel"] = rel_to_json(s.call_rel);
      jc["ret_rel"] = rel_to_json(s.ret_rel);
      calls.push_back(std::move(jc));
    }
    jf["calls"] = std::move(calls);
    fns.push_back(std::move(jf));
  }
  doc["functions"] = std::move(fns);
  return doc.dump();
}

std::array<unsigned char, 32> fingerprint(const Arena &a) {
  std::string doc = canonical_document(a);
  std::array<unsigned char, 32> out{};
  SHA256(reinterpret_cast<const unsigned char *>(doc.data()), doc.size(), out.data());
  return out;
}

std::uint64_t ExplodedSupergraph::n_edges() const {
  std::uint64_t c = 0;
  for (const auto &v : adj) c += v.size();
  return c;
}

ExplodedSupergraph build_exploded(const Arena &a) {
  ExplodedSupergraph ex;
  ex.arena = &a;
  ex.dstar = a.dstar();
  ex.adj.assign(static_cast<std::size_t>(a.n_vertices()) * ex.dstar, {});

  auto add = [&](Vid u, Fact s, Vid v, Fact d, EdgeClass cls) {
    ex.adj[ex.xid(u, s)].push_back({ex.xid(v, d), cls});
  };

  for (const Function &f : a.functions) {
    for (const Edge &e : f.edges) {
      EdgeClass cls =
          a.kind[e.from] == VertexKind::Call ? EdgeClass::CallRet : EdgeClass::Intra;
      for (auto [s, d] : e.rel.pairs()) add(e.from, s, e.to, d, cls);
    }
  }
  for (const CallSite &site : a.calls) {
    Vid callee_start = a.functions[site.callee].start;
    Vid callee_exit = a.functions[site.callee].exit;
    for (auto [s, d] : site.call_rel.pairs()) add(site.call, s, callee_start, d, EdgeClass::CallStart);
    for (auto [s, d] : site.ret_rel.pairs()) add(callee_exit, s, site.ret_site, d, EdgeClass::ExitRet);
  }
  for (auto &v : ex.adj) std::sort(v.begin(), v.end());
  return ex;
}

CallGraph build_call_graph(const Arena &a) {
  CallGraph c;
  c.n = static_cast<std::uint32_t>(a.functions.size());
  c.callees.assign(c.n, {});
  c.callers.assign(c.n, {});
  for (const CallSite &s : a.calls) {
    c.callees[a.fn_of[s.call]].push_back(s.callee);
    c.callers[s.callee].push_back(a.fn_of[s.call]);
  }
  auto dedup = [](std::vector<std::uint32_t> &v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  for (auto &v : c.callees) dedup(v);
  for (auto &v : c.callers) dedup(v);

  c.edge_sites.assign(c.n, {});
  for (std::uint32_t f = 0; f < c.n; ++f) c.edge_sites[f].resize(c.callees[f].size());
  for (std::uint32_t ci = 0; ci < a.calls.size(); ++ci) {
    const CallSite &s = a.calls[ci];
    std::uint32_t f = a.fn_of[s.call];
    const auto &tv = c.callees[f];
    std::size_t k = std::lower_bound(tv.begin(), tv.end(), s.callee) - tv.begin();
    c.edge_sites[f][k].push_back(ci);
  }
  return c;
}

} // namespace ifds
