#include "kgpathrl/dataset_prep.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <sstream>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/rng.hpp"

namespace kgpathrl {
namespace {

std::vector<std::size_t> relation_counts(const KnowledgeGraph& g) {
  std::vector<std::size_t> counts(g.num_relations(), 0);
  for (const Triple& t : g.triples()) ++counts[t.relation.value];
  return counts;
}

KnowledgeGraph keep(const KnowledgeGraph& g, const std::vector<bool>& kept) {
  std::vector<NamedTriple> out;
  const auto triples = g.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (kept[i]) out.push_back(g.named(triples[i]));
  }
  return KnowledgeGraph::from_triples(out);
}

}  // namespace

std::vector<std::size_t> apportion(const std::vector<std::size_t>& counts,
                                   std::size_t target) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<std::size_t> quota(counts.size(), 0);
  if (total == 0) return quota;

  // share_r = counts[r] * target / total, kept as quotient + integer remainder.
  std::vector<std::size_t> rem(counts.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    const auto num = static_cast<unsigned __int128>(counts[r]) * target;
    quota[r] = static_cast<std::size_t>(num / total);
    rem[r] = static_cast<std::size_t>(num % total);
    assigned += quota[r];
  }

  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  std::vector<bool> seated(counts.size(), false);
  for (std::size_t i = 0; assigned < target && i < order.size(); ++i) {
    if (rem[order[i]] == 0) break;
    ++quota[order[i]];
    seated[order[i]] = true;
    ++assigned;
  }

  // Lift empty quotas; give back remainder seats from the weakest winners.
  std::vector<std::size_t> donors;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (seated[*it] && quota[*it] >= 2) donors.push_back(*it);
  }
  std::size_t next_donor = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] == 0 || quota[r] > 0) continue;
    quota[r] = 1;
    if (next_donor < donors.size()) --quota[donors[next_donor++]];
  }
  return quota;
}

KnowledgeGraph stratified_downsample(const KnowledgeGraph& g, std::size_t target_links,
                                     std::uint64_t seed) {
  const std::size_t n = g.num_triples();
  if (target_links < 1 || target_links > n) {
    throw DatasetError("target links " + std::to_string(target_links) +
                       " outside [1, " + std::to_string(n) + "]");
  }
  const auto counts = relation_counts(g);
  const auto used = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  if (target_links < used) {
    throw DatasetError("target links " + std::to_string(target_links) +
                       " cannot keep all " + std::to_string(used) + " relations");
  }
  const auto quota = apportion(counts, target_links);

  std::vector<std::vector<std::size_t>> members(g.num_relations());
  const auto triples = g.triples();
  for (std::size_t i = 0; i < n; ++i) members[triples[i].relation.value].push_back(i);

  Rng rng(seed);
  std::vector<bool> kept(n, false);
  for (std::size_t r = 0; r < members.size(); ++r) {
    auto& pool = members[r];
    for (std::size_t j = 0; j < quota[r]; ++j) {
      const std::size_t pick = j + rng.below(pool.size() - j);
      std::swap(pool[j], pool[pick]);
      kept[pool[j]] = true;
    }
  }
  return keep(g, kept);
}

std::vector<std::string> sample_relations(const KnowledgeGraph& g, std::size_t n_relations,
                                          std::uint64_t seed) {
  if (n_relations == 0) throw DatasetError("relation subset size must be >= 1");
  if (n_relations > g.num_relations()) {
    throw DatasetError("cannot sample " + std::to_string(n_relations) + " of " +
                       std::to_string(g.num_relations()) + " relations");
  }
  auto weights = relation_counts(g);
  std::size_t remaining = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  Rng rng(seed);
  std::vector<std::string> chosen;
  for (std::size_t d = 0; d < n_relations; ++d) {
    std::uint64_t x = rng.below(remaining);
    std::size_t r = 0;
    while (x >= weights[r]) {
      x -= weights[r];
      ++r;
    }
    chosen.push_back(g.name(RelationId{static_cast<std::uint32_t>(r)}));
    remaining -= weights[r];
    weights[r] = 0;
  }
  return chosen;
}

KnowledgeGraph sample_relation_subset(const KnowledgeGraph& g, std::size_t n_relations,
                                      std::uint64_t seed) {
  const auto names = sample_relations(g, n_relations, seed);
  std::vector<bool> selected(g.num_relations(), false);
  for (const std::string& name : names) selected[g.relation(name).value] = true;
  const auto triples = g.triples();
  std::vector<bool> kept(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    kept[i] = selected[triples[i].relation.value];
  }
  return keep(g, kept);
}

SplitReport verify_split(const KnowledgeGraph& train, const KnowledgeGraph& test) {
  SplitReport r;
  r.train_entities = train.num_entities();
  r.test_entities = test.num_entities();
  for (const std::string& e : test.entity_names()) {
    if (train.find_entity(e)) ++r.shared_entities;
  }
  r.train_relations.insert(train.relation_names().begin(), train.relation_names().end());
  r.test_relations.insert(test.relation_names().begin(), test.relation_names().end());
  std::set_difference(r.test_relations.begin(), r.test_relations.end(),
                      r.train_relations.begin(), r.train_relations.end(),
                      std::inserter(r.uncovered_test_relations,
                                    r.uncovered_test_relations.end()));
  return r;
}

std::string format_report(const SplitReport& r) {
  std::ostringstream out;
  out << "train_entities=" << r.train_entities << '\n'
      << "test_entities=" << r.test_entities << '\n'
      << "shared_entities=" << r.shared_entities << '\n'
      << "train_relations=" << r.train_relations.size() << '\n'
      << "test_relations=" << r.test_relations.size() << '\n'
      << "uncovered_test_relations=";
  bool first = true;
  for (const std::string& rel : r.uncovered_test_relations) {
    out << (first ? "" : ",") << rel;
    first = false;
  }
  out << '\n';
  return out.str();
}

}  // namespace kgpathrl
