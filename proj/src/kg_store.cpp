#include "kgpathrl/kg_store.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/log.hpp"

namespace kgpathrl {
namespace {

std::uint32_t intern(std::string_view name, std::vector<std::string>& names,
                     std::unordered_map<std::string, std::uint32_t>& ids) {
  auto [it, inserted] =
      ids.try_emplace(std::string(name), static_cast<std::uint32_t>(names.size()));
  if (inserted) names.emplace_back(name);
  return it->second;
}

void build_csr(std::size_t n, const std::vector<Triple>& triples, bool forward,
               std::vector<std::uint32_t>& offsets, std::vector<Neighbor>& adj) {
  offsets.assign(n + 1, 0);
  for (const Triple& t : triples) {
    ++offsets[(forward ? t.head : t.tail).value + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  adj.resize(triples.size());
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    const EntityId from = forward ? t.head : t.tail;
    const EntityId other = forward ? t.tail : t.head;
    adj[cursor[from.value]++] = Neighbor{t.relation, other, i};
  }
  for (std::size_t e = 0; e < n; ++e) {
    std::sort(adj.begin() + offsets[e], adj.begin() + offsets[e + 1],
              [](const Neighbor& a, const Neighbor& b) {
                return std::tie(a.relation, a.other) < std::tie(b.relation, b.other);
              });
  }
}

std::string sanitize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                       c == '\f' || c == '\v';
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

KnowledgeGraph KnowledgeGraph::from_triples(std::span<const NamedTriple> triples,
                                            std::size_t* duplicates) {
  KnowledgeGraph g;
  std::size_t dup = 0;
  g.triples_.reserve(triples.size());
  for (const NamedTriple& nt : triples) {
    Triple t{EntityId{intern(nt.head, g.entity_names_, g.entity_ids_)},
             RelationId{intern(nt.relation, g.relation_names_, g.relation_ids_)},
             EntityId{intern(nt.tail, g.entity_names_, g.entity_ids_)}};
    auto [it, inserted] =
        g.index_.try_emplace(t, static_cast<std::uint32_t>(g.triples_.size()));
    if (!inserted) {
      ++dup;
      continue;
    }
    g.triples_.push_back(t);
  }
  build_csr(g.entity_names_.size(), g.triples_, true, g.fwd_offsets_, g.fwd_);
  build_csr(g.entity_names_.size(), g.triples_, false, g.bwd_offsets_, g.bwd_);
  if (duplicates) *duplicates = dup;
  return g;
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
  auto it = entity_ids_.find(std::string(name));
  if (it == entity_ids_.end()) return std::nullopt;
  return EntityId{it->second};
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
  auto it = relation_ids_.find(std::string(name));
  if (it == relation_ids_.end()) return std::nullopt;
  return RelationId{it->second};
}

EntityId KnowledgeGraph::entity(std::string_view name) const {
  if (auto e = find_entity(name)) return *e;
  throw LookupError("unknown entity '" + std::string(name) + "'");
}

RelationId KnowledgeGraph::relation(std::string_view name) const {
  if (auto r = find_relation(name)) return *r;
  throw LookupError("unknown relation '" + std::string(name) + "'");
}

NamedTriple KnowledgeGraph::named(const Triple& t) const {
  return {name(t.head), name(t.relation), name(t.tail)};
}

std::optional<Triple> KnowledgeGraph::resolve(const NamedTriple& t) const {
  auto h = find_entity(t.head);
  auto r = find_relation(t.relation);
  auto tl = find_entity(t.tail);
  if (!h || !r || !tl) return std::nullopt;
  return Triple{*h, *r, *tl};
}

bool KnowledgeGraph::contains(const NamedTriple& t) const {
  auto resolved = resolve(t);
  return resolved && contains(*resolved);
}

std::optional<std::uint32_t> KnowledgeGraph::index_of(const Triple& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NamedTriple> parse_triples(std::istream& in) {
  std::vector<NamedTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 3) {
      throw ParseError(lineno, "expected 3 tab-separated fields, found " +
                                   std::to_string(fields.size()));
    }
    for (auto f : fields) {
      if (f.empty()) throw ParseError(lineno, "empty field");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]),
                   std::string(fields[2])});
  }
  return out;
}

std::vector<NamedTriple> read_triples_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_triples(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

namespace {

KnowledgeGraph graph_from_parsed(const std::vector<NamedTriple>& triples,
                                 LoadReport* report) {
  if (triples.empty()) throw EmptyGraphError("no triples in input");
  std::size_t dup = 0;
  KnowledgeGraph g = KnowledgeGraph::from_triples(triples, &dup);
  if (dup > 0) warn(std::to_string(dup) + " duplicate triple(s) ignored");
  if (report) *report = LoadReport{triples.size(), dup};
  return g;
}

}  // namespace

KnowledgeGraph load_graph(std::istream& in, LoadReport* report) {
  return graph_from_parsed(parse_triples(in), report);
}

KnowledgeGraph load_graph_file(const std::filesystem::path& path,
                               LoadReport* report) {
  return graph_from_parsed(read_triples_file(path), report);
}

void write_triples(std::ostream& out, std::span<const NamedTriple> triples) {
  for (const NamedTriple& t : triples) {
    out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  }
}

void write_graph(std::ostream& out, const KnowledgeGraph& g) {
  for (const Triple& t : g.triples()) {
    out << g.name(t.head) << '\t' << g.name(t.relation) << '\t' << g.name(t.tail)
        << '\n';
  }
}

void write_graph_file(const std::filesystem::path& path, const KnowledgeGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_graph(out, g);
}

std::vector<EntityId> k_hop_neighbors(const KnowledgeGraph& g, EntityId e, int k) {
  if (!g.has_entity(e)) {
    throw LookupError("unknown entity id " + std::to_string(e.value));
  }
  if (k < 1) throw InvalidQueryError("k must be >= 1");
  std::vector<int> dist(g.num_entities(), -1);
  std::deque<EntityId> frontier{e};
  dist[e.value] = 0;
  std::vector<EntityId> out;
  while (!frontier.empty()) {
    const EntityId u = frontier.front();
    frontier.pop_front();
    if (dist[u.value] == k) continue;
    auto visit = [&](EntityId v) {
      if (dist[v.value] >= 0) return;
      dist[v.value] = dist[u.value] + 1;
      out.push_back(v);
      frontier.push_back(v);
    };
    for (const Neighbor& n : g.outgoing(u)) visit(n.other);
    for (const Neighbor& n : g.incoming(u)) visit(n.other);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fallback_text(std::string_view id) {
  std::string_view tail = id;
  if (const auto slash = tail.rfind('/'); slash != std::string_view::npos) {
    tail.remove_prefix(slash + 1);
  }
  std::string spaced(tail);
  std::replace_if(
      spaced.begin(), spaced.end(), [](char c) { return c == '_' || c == '.'; },
      ' ');
  std::string out = sanitize(spaced);
  if (out.empty()) out = sanitize(id);
  if (out.empty()) out = std::string(id);
  return out;
}

void TextMap::set_entity(std::string id, std::string text) {
  entities_[std::move(id)] = sanitize(text);
}

void TextMap::set_relation(std::string id, std::string text) {
  relations_[std::move(id)] = sanitize(text);
}

const std::string* TextMap::find_entity(std::string_view id) const {
  auto it = entities_.find(std::string(id));
  return it == entities_.end() || it->second.empty() ? nullptr : &it->second;
}

const std::string* TextMap::find_relation(std::string_view id) const {
  auto it = relations_.find(std::string(id));
  return it == relations_.end() || it->second.empty() ? nullptr : &it->second;
}

std::string TextMap::entity_text(std::string_view id) const {
  if (const std::string* s = find_entity(id)) return *s;
  return fallback_text(id);
}

std::string TextMap::relation_text(std::string_view id) const {
  if (const std::string* s = find_relation(id)) return *s;
  return fallback_text(id);
}

namespace {

void read_text_map(const std::filesystem::path& path,
                   void (TextMap::*set)(std::string, std::string), TextMap& tm) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(lineno, "expected id<TAB>text", path.string());
    }
    (tm.*set)(line.substr(0, tab), line.substr(tab + 1));
  }
}

}  // namespace

TextMap TextMap::load(const std::filesystem::path& entity_file,
                      const std::filesystem::path& relation_file) {
  TextMap tm;
  if (!entity_file.empty()) read_text_map(entity_file, &TextMap::set_entity, tm);
  if (!relation_file.empty()) {
    read_text_map(relation_file, &TextMap::set_relation, tm);
  }
  return tm;
}

}  // namespace kgpathrl
