#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/path_engine.hpp"
#include "kgpathrl/rng.hpp"

namespace kgpathrl {

struct SamplingConfig {
  std::size_t negatives = 10;  // m, negatives per positive
  std::size_t paths = 3;       // n, max paths per example
  int max_len = 3;             // k, path length bound
  int neighborhood_k = 3;      // hop bound of the corruption pool
  std::uint64_t seed = 0;
  // Top up from the whole vocabulary when the common neighborhood runs dry.
  bool vocabulary_fallback = true;
  // Also store the pruned subgraph per example (edge-list linearization).
  bool with_subgraph = false;
  unsigned threads = 1;

  void validate() const;
};

enum class CorruptedSlot { head, tail };

struct Corruption {
  Triple triple;
  CorruptedSlot slot;
};

struct LabeledExample {
  Triple triple;
  int label = 0;
  std::vector<ReasoningPath> paths;
  // Pruned subgraph, filled only when SamplingConfig::with_subgraph is set.
  std::vector<Triple> subgraph;
  // Index in g.triples() of the positive this example was derived from.
  std::size_t source = 0;
};

// Up to cfg.negatives distinct corruptions of t (t must be in g). Replacement
// entities come from the common neighborhood_k-hop neighbors of t's head and
// tail; head vs tail is a fair coin per draw. No output is in g, equals t,
// or is a self loop. Warns when nothing can be produced.
std::vector<Corruption> corrupt(const KnowledgeGraph& g, const Triple& t,
                                const SamplingConfig& cfg, Rng& rng);

// Labeled (triple, paths) examples for every triple of g with at least one
// path once the triple itself is hidden, each followed by its path-bearing
// negatives. Per-positive rng streams make the output a pure function of
// (g, cfg) regardless of cfg.threads.
std::vector<LabeledExample> build_training_set(const KnowledgeGraph& g,
                                               const SamplingConfig& cfg);

}  // namespace kgpathrl
