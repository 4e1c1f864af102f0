#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/rng.hpp"

namespace kgpathrl {

// A stored triple plus the direction it was walked in. Forward connects
// head->tail, backward tail->head. The triple itself keeps stored orientation.
struct PathStep {
  Triple triple;
  bool forward = true;

  bool operator==(const PathStep&) const = default;
  // Triple first, then forward before backward.
  bool operator<(const PathStep& o) const {
    if (triple != o.triple) return triple < o.triple;
    return forward && !o.forward;
  }
};

// Simple chain of steps from source to target.
struct ReasoningPath {
  EntityId source;
  EntityId target;
  std::vector<PathStep> steps;

  std::size_t length() const { return steps.size(); }
  bool operator==(const ReasoningPath&) const = default;
};

// Canonical order: length ascending, then lexicographic over steps.
bool path_order(const ReasoningPath& a, const ReasoningPath& b);

// Entity sequence visited by the path, source first, target last.
std::vector<EntityId> path_entities(const ReasoningPath& p);

struct PathQuery {
  EntityId head;
  EntityId tail;
  int max_len = 3;
  // Excluded from every path, whichever way it would be walked. May name a
  // triple that is not in the graph, in which case it has no effect.
  std::optional<Triple> hide;
};

// Every simple path of length <= max_len between head and tail, in canonical
// order. Throws LookupError for ids outside the graph and InvalidQueryError
// when head == tail or max_len < 1.
std::vector<ReasoningPath> enumerate_paths(const KnowledgeGraph& g,
                                           const PathQuery& q);

// Only the paths of exactly `length` steps, canonical order.
std::vector<ReasoningPath> enumerate_paths_of_length(const KnowledgeGraph& g,
                                                     const PathQuery& q,
                                                     int length);

// Keeps at most n paths: all strictly shorter lengths first, then a uniform
// sample without replacement at the boundary length. Output preserves input
// order. Draws from rng only when the boundary group must be thinned.
std::vector<ReasoningPath> sample_paths(std::vector<ReasoningPath> paths,
                                        std::size_t n, Rng& rng);

// Same result and rng consumption as sample_paths(enumerate_paths(g, q), n,
// rng), but stops enumerating once the shorter lengths already supply n
// paths.
std::vector<ReasoningPath> find_sampled_paths(const KnowledgeGraph& g,
                                              const PathQuery& q, std::size_t n,
                                              Rng& rng);

// Union of the triples on all enumerated paths, ordered by the length of the
// shortest path using them, then by triple.
std::vector<Triple> extract_pruned_subgraph(const KnowledgeGraph& g,
                                            const PathQuery& q);

// String-id forms used by instances, rules and result files.
struct NamedStep {
  NamedTriple triple;
  bool forward = true;
  auto operator<=>(const NamedStep&) const = default;
};
using NamedPath = std::vector<NamedStep>;

NamedPath to_named(const KnowledgeGraph& g, const ReasoningPath& p);
std::vector<NamedPath> to_named(const KnowledgeGraph& g,
                                const std::vector<ReasoningPath>& paths);

inline const char* direction_name(bool forward) { return forward ? "fwd" : "bwd"; }

}  // namespace kgpathrl
