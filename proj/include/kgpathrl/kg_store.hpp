#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgpathrl {

// Dense interned ids. External interfaces always use the original strings.
struct EntityId {
  std::uint32_t value = 0;
  auto operator<=>(const EntityId&) const = default;
};

struct RelationId {
  std::uint32_t value = 0;
  auto operator<=>(const RelationId&) const = default;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (std::uint64_t{t.head.value} << 32) | t.tail.value;
    h ^= std::uint64_t{t.relation.value} * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

// A triple spelled with its original string ids.
struct NamedTriple {
  std::string head;
  std::string relation;
  std::string tail;
  auto operator<=>(const NamedTriple&) const = default;
};

// One adjacency entry: the relation, the entity at the other end, and the
// index of the stored triple it came from.
struct Neighbor {
  RelationId relation;
  EntityId other;
  std::uint32_t triple = 0;
};

// Immutable triple set with forward/backward adjacency (CSR) and vocabularies
// ordered by first appearance.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Builds a graph; repeated triples are kept once and counted in
  // *duplicates when given.
  static KnowledgeGraph from_triples(std::span<const NamedTriple> triples,
                                     std::size_t* duplicates = nullptr);

  std::size_t num_entities() const { return entity_names_.size(); }
  std::size_t num_relations() const { return relation_names_.size(); }
  std::size_t num_triples() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const {
    return relation_names_;
  }
  std::span<const Triple> triples() const { return triples_; }

  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;
  // Throw LookupError when the name is not in the vocabulary.
  EntityId entity(std::string_view name) const;
  RelationId relation(std::string_view name) const;

  const std::string& name(EntityId e) const { return entity_names_.at(e.value); }
  const std::string& name(RelationId r) const {
    return relation_names_.at(r.value);
  }
  NamedTriple named(const Triple& t) const;
  // nullopt when any component is outside the vocabularies.
  std::optional<Triple> resolve(const NamedTriple& t) const;

  bool contains(const Triple& t) const { return index_.contains(t); }
  bool contains(const NamedTriple& t) const;
  std::optional<std::uint32_t> index_of(const Triple& t) const;

  bool has_entity(EntityId e) const { return e.value < entity_names_.size(); }

  // Triples with e as head, as (relation, tail). Sorted by (relation, tail).
  std::span<const Neighbor> outgoing(EntityId e) const {
    return slice(fwd_offsets_, fwd_, e);
  }
  // Triples with e as tail, as (relation, head). Sorted by (relation, head).
  std::span<const Neighbor> incoming(EntityId e) const {
    return slice(bwd_offsets_, bwd_, e);
  }
  std::size_t degree(EntityId e) const {
    return outgoing(e).size() + incoming(e).size();
  }

 private:
  static std::span<const Neighbor> slice(const std::vector<std::uint32_t>& off,
                                         const std::vector<Neighbor>& adj,
                                         EntityId e) {
    return {adj.data() + off.at(e.value), adj.data() + off.at(e.value + 1)};
  }

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, std::uint32_t> entity_ids_;
  std::unordered_map<std::string, std::uint32_t> relation_ids_;
  std::vector<Triple> triples_;
  std::unordered_map<Triple, std::uint32_t, TripleHash> index_;
  std::vector<std::uint32_t> fwd_offsets_{0};
  std::vector<Neighbor> fwd_;
  std::vector<std::uint32_t> bwd_offsets_{0};
  std::vector<Neighbor> bwd_;
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t duplicates = 0;
};

// Parses `head<TAB>relation<TAB>tail` lines. Blank lines are skipped.
// Throws ParseError with the line number on malformed lines.
std::vector<NamedTriple> parse_triples(std::istream& in);
std::vector<NamedTriple> read_triples_file(const std::filesystem::path& path);

// Loads a graph; throws EmptyGraphError when no triple is present. Duplicate
// lines are dropped with a counted warning.
KnowledgeGraph load_graph(std::istream& in, LoadReport* report = nullptr);
KnowledgeGraph load_graph_file(const std::filesystem::path& path,
                               LoadReport* report = nullptr);

void write_triples(std::ostream& out, std::span<const NamedTriple> triples);
void write_graph(std::ostream& out, const KnowledgeGraph& g);
void write_graph_file(const std::filesystem::path& path, const KnowledgeGraph& g);

// All entities within k undirected hops of e, excluding e. Sorted by id.
std::vector<EntityId> k_hop_neighbors(const KnowledgeGraph& g, EntityId e, int k);

// Display strings for entity and relation ids. Total: ids without a mapping
// fall back to fallback_text().
class TextMap {
 public:
  void set_entity(std::string id, std::string text);
  void set_relation(std::string id, std::string text);

  std::string entity_text(std::string_view id) const;
  std::string relation_text(std::string_view id) const;

  // Explicit mappings only.
  const std::string* find_entity(std::string_view id) const;
  const std::string* find_relation(std::string_view id) const;

  // Reads `id<TAB>display text` files; either path may be empty.
  static TextMap load(const std::filesystem::path& entity_file,
                      const std::filesystem::path& relation_file);

 private:
  std::unordered_map<std::string, std::string> entities_;
  std::unordered_map<std::string, std::string> relations_;
};

// Strips namespace prefixes up to the last '/', turns '_' and '.' into
// spaces and collapses whitespace. Returns the raw id if that leaves nothing.
std::string fallback_text(std::string_view id);

}  // namespace kgpathrl
