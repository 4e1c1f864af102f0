#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include <json.hpp>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/parallel.hpp"
#include "kgpathrl/path_engine.hpp"
#include "kgpathrl/scorers.hpp"

namespace kgpathrl {
namespace {

using Body = std::vector<std::pair<RelationId, bool>>;

Body body_of(const ReasoningPath& p) {
  Body b;
  b.reserve(p.steps.size());
  for (const PathStep& s : p.steps) b.emplace_back(s.triple.relation, s.forward);
  return b;
}

// Neighbors of u reached through relation r in the given direction.
std::span<const Neighbor> with_relation(const KnowledgeGraph& g, EntityId u,
                                        RelationId r, bool forward) {
  auto adj = forward ? g.outgoing(u) : g.incoming(u);
  auto lo = std::lower_bound(adj.begin(), adj.end(), r,
                             [](const Neighbor& n, RelationId rel) { return n.relation < rel; });
  auto hi = std::upper_bound(lo, adj.end(), r,
                             [](RelationId rel, const Neighbor& n) { return rel < n.relation; });
  return {lo, hi};
}

void follow_body(const KnowledgeGraph& g, const Body& body, std::size_t depth,
                 std::vector<EntityId>& trail, std::vector<EntityId>& ends) {
  const EntityId u = trail.back();
  for (const Neighbor& n : with_relation(g, u, body[depth].first, body[depth].second)) {
    if (std::find(trail.begin(), trail.end(), n.other) != trail.end()) continue;
    if (depth + 1 == body.size()) {
      ends.push_back(n.other);
      continue;
    }
    trail.push_back(n.other);
    follow_body(g, body, depth + 1, trail, ends);
    trail.pop_back();
  }
}

// Distinct ordered pairs (x, y) joined by a simple path spelling `body`.
// A body of length >= 2 can never walk the triple (x, r, y) itself, and a
// length-1 body can only do so when it is (r, fwd), which never reaches
// min_support; so this count does not depend on the rule head.
std::size_t count_body_pairs(const KnowledgeGraph& g, const Body& body) {
  std::size_t total = 0;
  std::vector<EntityId> trail, ends;
  for (std::uint32_t x = 0; x < g.num_entities(); ++x) {
    trail.assign(1, EntityId{x});
    ends.clear();
    follow_body(g, body, 0, trail, ends);
    std::sort(ends.begin(), ends.end());
    total += static_cast<std::size_t>(std::unique(ends.begin(), ends.end()) - ends.begin());
  }
  return total;
}

}  // namespace

std::vector<PathRule> mine_rules(const KnowledgeGraph& g, int k,
                                 std::size_t min_support, unsigned threads) {
  if (k < 1) throw InvalidQueryError("rule length bound k must be >= 1");
  const auto triples = g.triples();

  // Distinct bodies seen per triple with the triple hidden.
  std::vector<std::vector<Body>> bodies(triples.size());
  parallel_for(triples.size(), threads, [&](std::size_t i) {
    const Triple& t = triples[i];
    if (t.head == t.tail) return;
    auto& out = bodies[i];
    for (const ReasoningPath& p : enumerate_paths(g, {t.head, t.tail, k, t})) {
      out.push_back(body_of(p));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  });

  std::map<std::pair<RelationId, Body>, std::size_t> support;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    for (Body& b : bodies[i]) ++support[{triples[i].relation, std::move(b)}];
  }

  std::map<Body, std::size_t> body_counts;
  for (const auto& [key, s] : support) {
    if (s >= min_support) body_counts.emplace(key.second, 0);
  }
  std::vector<std::map<Body, std::size_t>::iterator> slots;
  for (auto it = body_counts.begin(); it != body_counts.end(); ++it) slots.push_back(it);
  parallel_for(slots.size(), threads, [&](std::size_t i) {
    slots[i]->second = count_body_pairs(g, slots[i]->first);
  });

  std::vector<PathRule> rules;
  for (const auto& [key, s] : support) {
    if (s < min_support) continue;
    PathRule rule;
    rule.head = g.name(key.first);
    for (const auto& [rel, fwd] : key.second) rule.body.push_back({g.name(rel), fwd});
    rule.support = s;
    rule.body_count = body_counts.at(key.second);
    rules.push_back(std::move(rule));
  }
  std::sort(rules.begin(), rules.end(), [](const PathRule& a, const PathRule& b) {
    const auto lhs = a.support * b.body_count;
    const auto rhs = b.support * a.body_count;
    if (lhs != rhs) return lhs > rhs;
    if (a.support != b.support) return a.support > b.support;
    if (a.head != b.head) return a.head < b.head;
    return a.body < b.body;
  });
  return rules;
}

std::string rule_to_json(const PathRule& rule) {
  nlohmann::ordered_json j;
  auto body = nlohmann::ordered_json::array();
  for (const RuleAtom& a : rule.body) body.push_back({a.relation, direction_name(a.forward)});
  j["body"] = std::move(body);
  j["head"] = rule.head;
  j["support"] = rule.support;
  j["body_count"] = rule.body_count;
  return j.dump();
}

PathRule rule_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    PathRule rule;
    for (const auto& atom : j.at("body")) {
      const auto dir = atom.at(1).get<std::string>();
      if (dir != "fwd" && dir != "bwd") throw ProtocolError("bad rule direction " + dir);
      rule.body.push_back({atom.at(0).get<std::string>(), dir == "fwd"});
    }
    rule.head = j.at("head").get<std::string>();
    rule.support = j.at("support").get<std::size_t>();
    rule.body_count = j.at("body_count").get<std::size_t>();
    if (rule.body.empty() || rule.support == 0 || rule.support > rule.body_count) {
      throw ProtocolError("rule violates 0 < support <= body_count");
    }
    return rule;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed rule: ") + e.what());
  }
}

void write_rules(std::ostream& out, std::span<const PathRule> rules) {
  for (const PathRule& r : rules) out << rule_to_json(r) << '\n';
}

std::vector<PathRule> read_rules(std::istream& in) {
  std::vector<PathRule> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(rule_from_json(line));
  }
  return out;
}

}  // namespace kgpathrl
