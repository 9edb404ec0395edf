// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#include "ifds/engine.hpp"

#include "ifds/decomp.hpp"
#include "ifds/errors.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace ifds {

namespace {

// One in-context closure row per (function, entry fact), computed by plain
// search over the same-context view.
std::vector<std::vector<BitVec>> build_entry_rows(const SummaryGraph &sg) {
  const ExplodedSupergraph &ex = *sg.ex;
  const Arena &a = *ex.arena;
  const std::uint32_t ds = ex.dstar;
  View scvp(sg, PathMode::SameContext);
  std::vector<std::vector<BitVec>> rows(a.functions.size());
  for (std::uint32_t fn = 0; fn < a.functions.size(); ++fn) {
    const Function &f = a.functions[fn];
    rows[fn].reserve(ds);
    for (Fact d = 0; d < ds; ++d) {
      const BitVec all = reach_set_view(scvp, ex.xid(f.start, d));
      BitVec row(std::size_t{f.n_vertices} * ds);
      for (std::uint32_t s = 0; s < f.n_vertices * ds; ++s)
        if (all.test(f.first * ds + s))
          row.set(s);
      rows[fn].push_back(std::move(row));
    }
  }
  return rows;
}

} // namespace

QueryIndex preprocess(const Arena &a) {
  QueryIndex idx;
  idx.arena = std::make_unique<Arena>(a);
  idx.fp = fingerprint(*idx.arena);
  idx.ex = std::make_unique<ExplodedSupergraph>(build_exploded(*idx.arena));
  idx.sg = std::make_unique<SummaryGraph>(compute_summaries(*idx.ex));
  idx.sc = preprocess_same_context(*idx.sg);
  idx.entry_rows = build_entry_rows(*idx.sg);
  idx.reach = call_reach_lists(*idx.sg);
  idx.cg = exploded_call_graph(idx.sc);
  const CallGraph calls = build_call_graph(*idx.arena);
  const ElimForest ef = elimination_forest(UGraph::from_call_graph(calls));
  idx.forest = expand_forest(ef, static_cast<std::uint32_t>(idx.arena->functions.size()),
                             idx.ex->dstar);
  idx.updown = up_down_tables(idx.cg, idx.forest);
  return idx;
}

namespace {

Witness trace_witness(const QueryIndex &idx, Vid c, Fact d3, std::uint32_t from,
                      std::uint32_t target) {
  Witness w;
  w.call = c;
  w.call_fact = d3;
  w.entry_node = from;
  w.final_fact = target % idx.cg.dstar;
  if (from == target)
    return w;
  std::vector<std::int32_t> par(idx.cg.n_nodes(), -1);
  std::deque<std::uint32_t> bfs{from};
  par[from] = static_cast<std::int32_t>(from);
  while (!bfs.empty()) {
    const std::uint32_t u = bfs.front();
    bfs.pop_front();
    if (u == target)
      break;
    for (std::uint32_t v : idx.cg.succ[u])
      if (par[v] < 0) {
        par[v] = static_cast<std::int32_t>(u);
        bfs.push_back(v);
      }
  }
  if (par[target] < 0)
    throw Error("internal: ancestor tables accepted an unreachable call-graph pair");
  std::vector<std::uint32_t> path{target};
  while (path.back() != from)
    path.push_back(static_cast<std::uint32_t>(par[path.back()]));
  std::reverse(path.begin(), path.end());
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    w.cg_edges.emplace_back(path[i], path[i + 1]);
  return w;
}

} // namespace

QueryResult query(const QueryIndex &idx, Vid u1, Fact d1, Vid u2, Fact d2,
                  bool want_witness) {
  const Arena &a = *idx.arena;
  if (u1 >= a.n_vertices() || u2 >= a.n_vertices())
    throw UnknownVertex("vertex id out of range");
  const std::uint32_t ds = idx.ex->dstar;
  if (d1 >= ds || d2 >= ds)
    throw DomainMismatch("fact id out of range");

  QueryResult res;
  const std::uint32_t fj = a.fn_of[u2];
  if (a.fn_of[u1] == fj && same_context_query(idx.sc, u1, d1, u2, d2)) {
    res.verdict = true;
    if (want_witness) {
      Witness w;
      w.same_context = true;
      res.witness = w;
    }
    return res;
  }

  // Last-leg cache: from which start facts of fn(u2) is (u2,d2) reachable
  // in-context? One precomputed row bit per fact; |D*| <= 64 by construction,
  // so a stack buffer suffices.
  const std::uint32_t target_slot = (u2 - a.functions[fj].first) * ds + d2;
  std::array<char, 64> last{};
  bool last_any = false;
  for (Fact d5 = 0; d5 < ds; ++d5) {
    last[d5] = idx.entry_rows[fj][d5].test(target_slot) ? 1 : 0;
    last_any = last_any || last[d5];
  }
  if (!last_any)
    return res;

  for (auto [c, d3] : idx.reach.at(idx.ex->xid(u1, d1)))
    for (const XEdge &e : idx.ex->adj[idx.ex->xid(c, d3)]) {
      if (e.cls != EdgeClass::CallStart)
        continue;
      const std::uint32_t from =
          idx.cg.node(a.fn_of[idx.ex->vertex(e.to)], idx.ex->fact(e.to));
      for (Fact d5 = 0; d5 < ds; ++d5) {
        if (!last[d5])
          continue;
        if (!call_graph_reachable(idx.updown, idx.forest, from, idx.cg.node(fj, d5)))
          continue;
        res.verdict = true;
        if (want_witness)
          res.witness = trace_witness(idx, c, d3, from, idx.cg.node(fj, d5));
        return res;
      }
    }
  return res;
}

std::vector<Fact> mivp(const QueryIndex &idx, Vid u1, const std::vector<Fact> &d1s, Vid u2) {
  const std::uint32_t ds = idx.ex->dstar;
  std::vector<Fact> sources{0};
  for (Fact d : d1s) {
    if (d >= ds)
      throw DomainMismatch("fact id out of range");
    sources.push_back(d);
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  std::vector<Fact> out;
  for (Fact d2 = 1; d2 < ds; ++d2)
    for (Fact d1 : sources)
      if (query(idx, u1, d1, u2, d2).verdict) {
        out.push_back(d2);
        break;
      }
  return out;
}

void ensure_match(const QueryIndex &idx, const Arena &a) {
  if (fingerprint(a) != idx.fp)
    throw IndexMismatch("index was built from a different arena");
}

// ---------------------------------------------------------------------------
// Index container. Little-endian throughout; every section is independently
// length-framed and crc32-checked; section 0 is the canonical arena document.

namespace {

struct Buf {
  std::string s;

  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i)
      s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void bytes(const void *p, std::size_t n) { s.append(static_cast<const char *>(p), n); }

  void rel(const FlowRelation &r) {
    u32(r.dstar());
    for (Fact f = 0; f < r.dstar(); ++f)
      u64(r.row(f));
  }
  void bits(const BitVec &b) {
    for (std::uint64_t w : b.words())
      u64(w);
  }
};

struct Rd {
  const std::string &s;
  std::size_t p = 0;

  std::uint64_t get(int n) {
    if (p + static_cast<std::size_t>(n) > s.size())
      throw CorruptIndex("truncated index data");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[p + i])) << (8 * i);
    p += n;
    return v;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
  std::string bytes(std::size_t n) {
    if (p + n > s.size())
      throw CorruptIndex("truncated index data");
    std::string out = s.substr(p, n);
    p += n;
    return out;
  }

  FlowRelation rel(std::uint32_t want_dstar) {
    const std::uint32_t ds = u32();
    if (ds != want_dstar)
      throw CorruptIndex("relation domain does not match the arena");
    FlowRelation r(ds);
    for (Fact f = 0; f < ds; ++f) {
      std::uint64_t m = u64();
      while (m) {
        const int d = std::countr_zero(m);
        if (static_cast<std::uint32_t>(d) >= ds)
          throw CorruptIndex("relation bit outside the fact domain");
        r.add(f, static_cast<Fact>(d));
        m &= m - 1;
      }
    }
    return r;
  }
  BitVec bits(std::size_t nbits) {
    BitVec b(nbits);
    for (auto &w : b.words())
      w = u64();
    return b;
  }
};

std::uint32_t checksum(const std::string &payload) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef *>(payload.data()),
            static_cast<uInt>(payload.size())));
}

enum : std::uint32_t {
  kSecArena = 0,
  kSecSummaries = 1,
  kSecSameCtx = 2,
  kSecReach = 3,
  kSecCallGraph = 4,
  kSecForest = 5,
  kSecUpDown = 6,
  kSecCount = 7,
};

} // namespace

void save_index(const QueryIndex &idx, std::ostream &out) {
  const Arena &a = *idx.arena;
  std::string sections[kSecCount];

  sections[kSecArena] = canonical_document(a);

  {
    Buf b;
    b.u32(static_cast<std::uint32_t>(a.calls.size()));
    for (const FlowRelation &r : idx.sg->summary)
      b.rel(r);
    b.u32(static_cast<std::uint32_t>(a.functions.size()));
    for (const FlowRelation &r : idx.sg->chi)
      b.rel(r);
    sections[kSecSummaries] = std::move(b.s);
  }
  {
    Buf b;
    b.u32(static_cast<std::uint32_t>(idx.sc.fns.size()));
    for (const FunctionContextIndex &F : idx.sc.fns) {
      b.u32(static_cast<std::uint32_t>(F.balanced.bags.size()));
      for (const auto &bag : F.balanced.bags) {
        b.u32(static_cast<std::uint32_t>(bag.size()));
        for (Vid v : bag)
          b.u32(v);
      }
      for (std::int32_t p : F.balanced.parent)
        b.i32(p);
      b.u32(F.balanced.root);
      for (std::uint32_t d : F.bag_depth)
        b.u32(d);
      b.u32(static_cast<std::uint32_t>(F.designated.size()));
      for (std::uint32_t d : F.designated)
        b.u32(d);
      for (const BitVec &row : F.fwd)
        b.bits(row);
      for (const BitVec &row : F.rev)
        b.bits(row);
    }
    sections[kSecSameCtx] = std::move(b.s);
  }
  {
    Buf b;
    b.u32(static_cast<std::uint32_t>(idx.reach.lists.size()));
    for (const auto &l : idx.reach.lists) {
      b.u32(static_cast<std::uint32_t>(l.size()));
      for (auto [c, d] : l) {
        b.u32(c);
        b.u32(d);
      }
    }
    sections[kSecReach] = std::move(b.s);
  }
  {
    Buf b;
    b.u32(idx.cg.n_functions);
    b.u32(idx.cg.dstar);
    for (const auto &s : idx.cg.succ) {
      b.u32(static_cast<std::uint32_t>(s.size()));
      for (std::uint32_t v : s)
        b.u32(v);
    }
    sections[kSecCallGraph] = std::move(b.s);
  }
  {
    Buf b;
    b.u32(idx.forest.n_functions);
    b.u32(idx.forest.dstar);
    for (std::int32_t p : idx.forest.parent)
      b.i32(p);
    sections[kSecForest] = std::move(b.s);
  }
  {
    Buf b;
    for (std::uint32_t v = 0; v < idx.forest.n_nodes(); ++v) {
      b.bits(idx.updown.up[v]);
      b.bits(idx.updown.down[v]);
    }
    sections[kSecUpDown] = std::move(b.s);
  }

  Buf head;
  head.bytes(kIndexMagic, sizeof kIndexMagic);
  head.u16(kIndexVersion);
  head.bytes(idx.fp.data(), idx.fp.size());
  head.u32(kSecCount);
  out.write(head.s.data(), static_cast<std::streamsize>(head.s.size()));
  for (std::uint32_t id = 0; id < kSecCount; ++id) {
    Buf h;
    h.u32(id);
    h.u64(sections[id].size());
    h.u32(checksum(sections[id]));
    out.write(h.s.data(), static_cast<std::streamsize>(h.s.size()));
    out.write(sections[id].data(), static_cast<std::streamsize>(sections[id].size()));
  }
  if (!out)
    throw IoError("failed to write index stream");
}

void save_index_file(const QueryIndex &idx, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  save_index(idx, out);
}

QueryIndex load_index(std::istream &in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Rd rd{data};

  const std::string magic = rd.bytes(sizeof kIndexMagic);
  if (std::memcmp(magic.data(), kIndexMagic, sizeof kIndexMagic) != 0)
    throw CorruptIndex("not an index file (bad magic)");
  const std::uint16_t version = rd.u16();
  if (version != kIndexVersion)
    throw VersionMismatch("index format version " + std::to_string(version) +
                          " is not supported");
  std::array<unsigned char, 32> fp{};
  {
    const std::string raw = rd.bytes(fp.size());
    std::memcpy(fp.data(), raw.data(), fp.size());
  }
  const std::uint32_t nsec = rd.u32();
  std::string sections[kSecCount];
  bool have[kSecCount] = {};
  for (std::uint32_t i = 0; i < nsec; ++i) {
    const std::uint32_t id = rd.u32();
    const std::uint64_t len = rd.u64();
    const std::uint32_t crc = rd.u32();
    std::string payload = rd.bytes(len);
    if (checksum(payload) != crc)
      throw CorruptIndex("section checksum mismatch");
    if (id < kSecCount) {
      sections[id] = std::move(payload);
      have[id] = true;
    }
  }
  for (std::uint32_t id = 0; id < kSecCount; ++id)
    if (!have[id])
      throw CorruptIndex("missing index section");

  QueryIndex idx;
  try {
    idx.arena = std::make_unique<Arena>(load_arena_string(sections[kSecArena]));
  } catch (const Error &e) {
    throw CorruptIndex(std::string("embedded arena does not validate: ") + e.what());
  }
  idx.fp = fingerprint(*idx.arena);
  if (idx.fp != fp)
    throw FingerprintMismatch("stored fingerprint does not match the embedded arena");
  idx.ex = std::make_unique<ExplodedSupergraph>(build_exploded(*idx.arena));
  const Arena &a = *idx.arena;
  const std::uint32_t ds = idx.ex->dstar;

  {
    Rd r{sections[kSecSummaries]};
    auto sg = std::make_unique<SummaryGraph>();
    sg->ex = idx.ex.get();
    if (r.u32() != a.calls.size())
      throw CorruptIndex("summary table size mismatch");
    sg->summary.reserve(a.calls.size());
    for (std::size_t i = 0; i < a.calls.size(); ++i)
      sg->summary.push_back(r.rel(ds));
    if (r.u32() != a.functions.size())
      throw CorruptIndex("summary table size mismatch");
    sg->chi.reserve(a.functions.size());
    for (std::size_t i = 0; i < a.functions.size(); ++i)
      sg->chi.push_back(r.rel(ds));
    idx.sg = std::move(sg);
  }
  {
    Rd r{sections[kSecSameCtx]};
    idx.sc.sg = idx.sg.get();
    idx.sc.dstar = ds;
    if (r.u32() != a.functions.size())
      throw CorruptIndex("context table count mismatch");
    idx.sc.fns.reserve(a.functions.size());
    for (std::uint32_t fn = 0; fn < a.functions.size(); ++fn) {
      FunctionContextIndex F;
      F.fn = fn;
      const std::uint32_t nverts = a.functions[fn].n_vertices;
      const std::uint32_t nbags = r.u32();
      if (nbags == 0)
        throw CorruptIndex("empty decomposition");
      F.balanced.bags.resize(nbags);
      for (auto &bag : F.balanced.bags) {
        bag.resize(r.u32());
        for (Vid &v : bag) {
          v = r.u32();
          if (v >= nverts)
            throw CorruptIndex("bag vertex out of range");
        }
      }
      F.balanced.parent.resize(nbags);
      for (std::int32_t &p : F.balanced.parent) {
        p = r.i32();
        if (p >= static_cast<std::int32_t>(nbags))
          throw CorruptIndex("bag parent out of range");
      }
      F.balanced.root = r.u32();
      F.bag_depth.resize(nbags);
      for (std::uint32_t &d : F.bag_depth)
        d = r.u32();
      if (r.u32() != nverts)
        throw CorruptIndex("designated-bag table size mismatch");
      F.designated.resize(nverts);
      for (std::uint32_t &d : F.designated) {
        d = r.u32();
        if (d >= nbags)
          throw CorruptIndex("designated bag out of range");
      }
      const std::uint32_t nslots = nverts * ds;
      F.fwd.reserve(nslots);
      F.rev.reserve(nslots);
      for (std::uint32_t s = 0; s < nslots; ++s)
        F.fwd.push_back(r.bits(nslots));
      for (std::uint32_t s = 0; s < nslots; ++s)
        F.rev.push_back(r.bits(nslots));
      F.lca = LcaIndex(F.balanced.parent);
      idx.sc.fns.push_back(std::move(F));
    }
  }
  {
    Rd r{sections[kSecReach]};
    idx.reach.dstar = ds;
    if (r.u32() != idx.ex->n_xvertices())
      throw CorruptIndex("call-reach table size mismatch");
    idx.reach.lists.resize(idx.ex->n_xvertices());
    for (auto &l : idx.reach.lists) {
      l.resize(r.u32());
      for (auto &[c, d] : l) {
        c = r.u32();
        d = r.u32();
        if (c >= a.n_vertices() || d >= ds)
          throw CorruptIndex("call-reach entry out of range");
      }
    }
  }
  {
    Rd r{sections[kSecCallGraph]};
    idx.cg.n_functions = r.u32();
    idx.cg.dstar = r.u32();
    if (idx.cg.n_functions != a.functions.size() || idx.cg.dstar != ds)
      throw CorruptIndex("call graph dimensions mismatch");
    idx.cg.succ.resize(idx.cg.n_nodes());
    idx.cg.pred.assign(idx.cg.n_nodes(), {});
    for (std::uint32_t u = 0; u < idx.cg.n_nodes(); ++u) {
      auto &s = idx.cg.succ[u];
      s.resize(r.u32());
      for (std::uint32_t &v : s) {
        v = r.u32();
        if (v >= idx.cg.n_nodes())
          throw CorruptIndex("call graph edge out of range");
      }
    }
    for (std::uint32_t u = 0; u < idx.cg.n_nodes(); ++u)
      for (std::uint32_t v : idx.cg.succ[u])
        idx.cg.pred[v].push_back(u);
  }
  {
    Rd r{sections[kSecForest]};
    idx.forest.n_functions = r.u32();
    idx.forest.dstar = r.u32();
    if (idx.forest.n_functions != a.functions.size() || idx.forest.dstar != ds)
      throw CorruptIndex("forest dimensions mismatch");
    idx.forest.parent.resize(idx.forest.n_nodes());
    for (std::int32_t &p : idx.forest.parent) {
      p = r.i32();
      if (p >= static_cast<std::int32_t>(idx.forest.n_nodes()))
        throw CorruptIndex("forest parent out of range");
    }
    try {
      finish_forest(idx.forest);
    } catch (const Error &) {
      throw CorruptIndex("forest parent table is not a forest");
    }
  }
  {
    Rd r{sections[kSecUpDown]};
    idx.updown.up.reserve(idx.forest.n_nodes());
    idx.updown.down.reserve(idx.forest.n_nodes());
    for (std::uint32_t v = 0; v < idx.forest.n_nodes(); ++v) {
      idx.updown.up.push_back(r.bits(idx.forest.sub[v]));
      idx.updown.down.push_back(r.bits(idx.forest.sub[v]));
    }
    finish_tables(idx.forest, idx.updown);
  }
  idx.entry_rows = build_entry_rows(*idx.sg);
  return idx;
}

QueryIndex load_index_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "' for reading");
  return load_index(in);
}

} // namespace ifds
