#pragma once

// Shared fixtures and brute-force oracles for the test suites. The oracles
// deliberately avoid the adjacency index and work from the flat triple list.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/path_engine.hpp"
#include "kgpathrl/rng.hpp"

namespace kgpathrl::testing {

inline std::vector<NamedTriple> g0_triples() {
  return {{"FDR", "president_of", "USA"},
          {"DC", "capital_of", "USA"},
          {"FDR", "work_at", "DC"},
          {"Merkel", "chancellor_of", "Germany"},
          {"Berlin", "capital_of", "Germany"}};
}

inline KnowledgeGraph g0() {
  const auto t = g0_triples();
  return KnowledgeGraph::from_triples(t);
}

inline std::string ename(std::size_t i) { return "e" + std::to_string(i); }
inline std::string rname(std::size_t i) { return "r" + std::to_string(i); }

// Random multigraph; self loops and repeated (h, t) pairs are allowed.
inline std::vector<NamedTriple> random_triples(Rng& rng, std::size_t nodes,
                                               std::size_t edges,
                                               std::size_t relations) {
  std::vector<NamedTriple> out;
  out.reserve(edges);
  for (std::size_t i = 0; i < edges; ++i) {
    out.push_back({ename(rng.below(nodes)), rname(rng.below(relations)),
                   ename(rng.below(nodes))});
  }
  return out;
}

// ---- path oracle ----------------------------------------------------------

namespace detail {

inline void oracle_dfs(const KnowledgeGraph& g, EntityId u, EntityId tail, int k,
                       std::optional<std::size_t> hidden,
                       std::vector<EntityId>& visited, std::vector<PathStep>& steps,
                       std::vector<std::vector<PathStep>>& out) {
  if (u == tail) {
    out.push_back(steps);
    return;
  }
  if (static_cast<int>(steps.size()) == k) return;
  const auto triples = g.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (hidden && *hidden == i) continue;
    const Triple& t = triples[i];
    for (bool forward : {true, false}) {
      const EntityId from = forward ? t.head : t.tail;
      const EntityId to = forward ? t.tail : t.head;
      if (from != u) continue;
      if (std::find(visited.begin(), visited.end(), to) != visited.end()) continue;
      visited.push_back(to);
      steps.push_back({t, forward});
      oracle_dfs(g, to, tail, k, hidden, visited, steps, out);
      steps.pop_back();
      visited.pop_back();
    }
  }
}

}  // namespace detail

// Every simple path of length <= k, as a sorted list of step sequences.
inline std::vector<std::vector<PathStep>> oracle_paths(const KnowledgeGraph& g, EntityId head,
                                                       EntityId tail, int k,
                                                       std::optional<Triple> hide = {}) {
  std::optional<std::size_t> hidden;
  if (hide) {
    const auto triples = g.triples();
    for (std::size_t i = 0; i < triples.size(); ++i) {
      if (triples[i] == *hide) hidden = i;
    }
  }
  std::vector<EntityId> visited{head};
  std::vector<PathStep> steps;
  std::vector<std::vector<PathStep>> out;
  detail::oracle_dfs(g, head, tail, k, hidden, visited, steps, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<PathStep>> step_lists(const std::vector<ReasoningPath>& paths) {
  std::vector<std::vector<PathStep>> out;
  for (const ReasoningPath& p : paths) out.push_back(p.steps);
  std::sort(out.begin(), out.end());
  return out;
}

// Undirected BFS over the triple list.
inline std::vector<EntityId> oracle_k_hop(const KnowledgeGraph& g, EntityId e, int k) {
  std::map<EntityId, int> dist{{e, 0}};
  std::deque<EntityId> q{e};
  while (!q.empty()) {
    const EntityId u = q.front();
    q.pop_front();
    if (dist[u] == k) continue;
    for (const Triple& t : g.triples()) {
      for (auto [a, b] : {std::pair{t.head, t.tail}, std::pair{t.tail, t.head}}) {
        if (a == u && !dist.contains(b)) {
          dist[b] = dist[u] + 1;
          q.push_back(b);
        }
      }
    }
  }
  std::vector<EntityId> out;
  for (const auto& [v, d] : dist) {
    if (v != e) out.push_back(v);
  }
  return out;
}

// ---- rule oracle ----------------------------------------------------------

using OracleBody = std::vector<std::pair<std::string, bool>>;

inline OracleBody body_of(const KnowledgeGraph& g, const std::vector<PathStep>& steps) {
  OracleBody b;
  for (const PathStep& s : steps) b.emplace_back(g.name(s.triple.relation), s.forward);
  return b;
}

struct OracleRuleCounts {
  std::map<std::pair<std::string, OracleBody>, std::size_t> support;
  std::map<OracleBody, std::size_t> body_count;
};

// Support from each triple's paths with that triple hidden; body counts from
// all ordered entity pairs.
inline OracleRuleCounts oracle_rule_counts(const KnowledgeGraph& g, int k) {
  OracleRuleCounts out;
  for (const Triple& t : g.triples()) {
    if (t.head == t.tail) continue;
    std::set<OracleBody> seen;
    for (const auto& p : oracle_paths(g, t.head, t.tail, k, t)) seen.insert(body_of(g, p));
    for (const OracleBody& b : seen) ++out.support[{g.name(t.relation), b}];
  }
  const auto n = static_cast<std::uint32_t>(g.num_entities());
  for (std::uint32_t x = 0; x < n; ++x) {
    for (std::uint32_t y = 0; y < n; ++y) {
      if (x == y) continue;
      std::set<OracleBody> seen;
      for (const auto& p : oracle_paths(g, EntityId{x}, EntityId{y}, k)) {
        seen.insert(body_of(g, p));
      }
      for (const OracleBody& b : seen) ++out.body_count[b];
    }
  }
  return out;
}

// ---- planted rules --------------------------------------------------------

struct PlantedRule {
  std::string first;
  bool first_forward;
  std::string second;
  bool second_forward;
  std::string head;
};

// x -first-> z, z -second-> y (either orientation) implies (x, head, y).
inline const std::vector<PlantedRule>& planted_rules() {
  static const std::vector<PlantedRule> rules = {
      {"president_of", true, "capital_of", false, "work_at"},
      {"born_in", true, "located_in", true, "nationality"},
      {"parent_of", true, "parent_of", true, "grandparent_of"},
  };
  return rules;
}

struct PlantedGraph {
  std::vector<NamedTriple> triples;
  // The head triples, one block of `groundings` per rule.
  std::vector<NamedTriple> heads;
};

// Each rule is grounded `groundings` times over distinct entities (entities
// are reused across rules but never within one), then distractor edges with
// random relations are added until they make up `distractor_share` of the
// rule-generated edges.
inline PlantedGraph planted_graph(std::uint64_t seed, const std::string& prefix,
                                  std::size_t entities = 100, std::size_t groundings = 20,
                                  double distractor_share = 0.10) {
  Rng rng(seed);
  PlantedGraph out;
  std::set<NamedTriple> present;
  auto add = [&](NamedTriple t) {
    if (present.insert(t).second) out.triples.push_back(std::move(t));
  };
  auto name = [&](std::size_t i) { return prefix + std::to_string(i); };

  for (const PlantedRule& rule : planted_rules()) {
    std::vector<std::size_t> ids(entities);
    for (std::size_t i = 0; i < entities; ++i) ids[i] = i;
    for (std::size_t i = 0; i < 3 * groundings; ++i) {
      std::swap(ids[i], ids[i + rng.below(entities - i)]);
    }
    for (std::size_t gi = 0; gi < groundings; ++gi) {
      const std::string x = name(ids[3 * gi]);
      const std::string z = name(ids[3 * gi + 1]);
      const std::string y = name(ids[3 * gi + 2]);
      add(rule.first_forward ? NamedTriple{x, rule.first, z} : NamedTriple{z, rule.first, x});
      add(rule.second_forward ? NamedTriple{z, rule.second, y}
                              : NamedTriple{y, rule.second, z});
      NamedTriple h{x, rule.head, y};
      out.heads.push_back(h);
      add(std::move(h));
    }
  }

  std::vector<std::string> relations;
  for (const PlantedRule& r : planted_rules()) {
    for (const std::string& rel : {r.first, r.second, r.head}) {
      if (std::find(relations.begin(), relations.end(), rel) == relations.end()) {
        relations.push_back(rel);
      }
    }
  }
  const auto want = static_cast<std::size_t>(distractor_share *
                                             static_cast<double>(out.triples.size()) + 0.5);
  std::size_t added = 0;
  while (added < want) {
    const std::size_t a = rng.below(entities);
    const std::size_t b = rng.below(entities);
    if (a == b) continue;
    NamedTriple t{name(a), relations[rng.below(relations.size())], name(b)};
    if (present.contains(t)) continue;
    add(std::move(t));
    ++added;
  }
  return out;
}

// ---- desk-scale graph ------------------------------------------------------

// Sparse random graph with a skewed entity popularity, sized like a NELL-995
// style training split.
inline std::vector<NamedTriple> nell_scale_triples(std::uint64_t seed,
                                                   std::size_t entities = 2564,
                                                   std::size_t relations = 88,
                                                   std::size_t triples = 10063) {
  Rng rng(seed);
  // Popularity ~ 1 / sqrt(rank + 1), sampled by inverse CDF over a table.
  std::vector<double> cdf(entities);
  double acc = 0;
  for (std::size_t i = 0; i < entities; ++i) {
    acc += 1.0 / std::sqrt(static_cast<double>(i + 1));
    cdf[i] = acc;
  }
  auto pick = [&] {
    const double u = rng.uniform() * acc;
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                    cdf.begin());
  };
  std::set<NamedTriple> seen;
  std::vector<NamedTriple> out;
  // Every entity appears at least once.
  for (std::size_t i = 0; i < entities && out.size() < triples; i += 2) {
    NamedTriple t{ename(i), rname(rng.below(relations)), ename((i + 1) % entities)};
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  while (out.size() < triples) {
    const std::size_t h = std::min(pick(), entities - 1);
    const std::size_t t = std::min(pick(), entities - 1);
    if (h == t) continue;
    NamedTriple tr{ename(h), rname(rng.below(relations)), ename(t)};
    if (seen.insert(tr).second) out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace kgpathrl::testing
