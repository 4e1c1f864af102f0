#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "kgpathrl/kg_store.hpp"

namespace kgpathrl {

struct SplitReport {
  std::size_t train_entities = 0;
  std::size_t test_entities = 0;
  std::size_t shared_entities = 0;
  std::set<std::string> train_relations;
  std::set<std::string> test_relations;
  // Test relations that never occur in train.
  std::set<std::string> uncovered_test_relations;
};

// Per-relation quotas for keeping `target` of `counts` total triples.
// Largest-remainder apportionment of the exact shares, then every relation
// with at least one triple is lifted to 1, paid for where possible by the
// relations that won a remainder seat (smallest remainder first).
std::vector<std::size_t> apportion(const std::vector<std::size_t>& counts,
                                   std::size_t target);

// Keeps apportion(...) triples per relation, sampled uniformly without
// replacement, in the original triple order. Throws DatasetError when
// target_links is outside [1, |triples|] or below the relation count.
KnowledgeGraph stratified_downsample(const KnowledgeGraph& g, std::size_t target_links,
                                     std::uint64_t seed);

// Draws n relations without replacement, each draw proportional to the
// triple counts of the relations still in the pool (scanned in relation id
// order), and keeps every triple of the chosen relations.
KnowledgeGraph sample_relation_subset(const KnowledgeGraph& g, std::size_t n_relations,
                                      std::uint64_t seed);

// Relation names chosen by sample_relation_subset, in draw order.
std::vector<std::string> sample_relations(const KnowledgeGraph& g, std::size_t n_relations,
                                          std::uint64_t seed);

SplitReport verify_split(const KnowledgeGraph& train, const KnowledgeGraph& test);

// Human-readable multi-line summary.
std::string format_report(const SplitReport& r);

}  // namespace kgpathrl
