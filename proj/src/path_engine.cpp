#include "kgpathrl/path_engine.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_map>

#include "kgpathrl/errors.hpp"

namespace kgpathrl {
namespace {

constexpr std::uint8_t kFar = 0xff;

// Depth-limited DFS from the head, pruned by undirected BFS distance to the
// tail. The distance ignores simplicity and hiding, so it is a lower bound
// and the pruning never drops a valid path.
class PathSearch {
 public:
  PathSearch(const KnowledgeGraph& g, const PathQuery& q) : g_(g), q_(q) {
    if (!g.has_entity(q.head) || !g.has_entity(q.tail)) {
      throw LookupError("path query entity outside the graph vocabulary");
    }
    if (q.head == q.tail) throw InvalidQueryError("path query head equals tail");
    if (q.max_len < 1) throw InvalidQueryError("max_len must be >= 1");
    if (q.hide) hidden_ = g.index_of(*q.hide);
    compute_distances();
  }

  std::vector<ReasoningPath> run(int length) {
    out_.clear();
    length_ = length;
    if (length < 1 || length > q_.max_len) return {};
    steps_.clear();
    on_path_.assign(1, q_.head);
    extend(q_.head, 0);
    std::sort(out_.begin(), out_.end(), path_order);
    return std::move(out_);
  }

 private:
  void compute_distances() {
    const int radius = q_.max_len - 1;
    dist_.clear();
    dist_.emplace(q_.tail.value, 0);
    std::deque<EntityId> frontier{q_.tail};
    while (!frontier.empty()) {
      const EntityId u = frontier.front();
      frontier.pop_front();
      const int du = dist_.at(u.value);
      if (du == radius) continue;
      auto visit = [&](const Neighbor& n) {
        if (dist_.try_emplace(n.other.value, static_cast<std::uint8_t>(du + 1))
                .second) {
          frontier.push_back(n.other);
        }
      };
      for (const Neighbor& n : g_.outgoing(u)) visit(n);
      for (const Neighbor& n : g_.incoming(u)) visit(n);
    }
  }

  std::uint8_t distance(EntityId e) const {
    auto it = dist_.find(e.value);
    return it == dist_.end() ? kFar : it->second;
  }

  bool visited(EntityId e) const {
    return std::find(on_path_.begin(), on_path_.end(), e) != on_path_.end();
  }

  void extend(EntityId u, int depth) {
    const int remaining = length_ - depth - 1;
    auto step = [&](const Neighbor& n, bool forward) {
      if (hidden_ && n.triple == *hidden_) return;
      const EntityId v = n.other;
      if (remaining == 0) {
        if (v != q_.tail) return;
      } else {
        if (v == q_.tail || visited(v)) return;
        if (distance(v) > remaining) return;
      }
      steps_.push_back({g_.triples()[n.triple], forward});
      if (remaining == 0) {
        out_.push_back({q_.head, q_.tail, steps_});
      } else {
        on_path_.push_back(v);
        extend(v, depth + 1);
        on_path_.pop_back();
      }
      steps_.pop_back();
    };
    for (const Neighbor& n : g_.outgoing(u)) step(n, true);
    for (const Neighbor& n : g_.incoming(u)) step(n, false);
  }

  const KnowledgeGraph& g_;
  const PathQuery& q_;
  std::optional<std::uint32_t> hidden_;
  std::unordered_map<std::uint32_t, std::uint8_t> dist_;
  int length_ = 0;
  std::vector<PathStep> steps_;
  std::vector<EntityId> on_path_;
  std::vector<ReasoningPath> out_;
};

// Indices of s elements chosen uniformly without replacement from [0, n),
// ascending. Draws nothing when s >= n.
std::vector<std::size_t> choose_indices(std::size_t n, std::size_t s, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (s >= n) return idx;
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

bool path_order(const ReasoningPath& a, const ReasoningPath& b) {
  if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
  return std::lexicographical_compare(a.steps.begin(), a.steps.end(),
                                      b.steps.begin(), b.steps.end());
}

std::vector<EntityId> path_entities(const ReasoningPath& p) {
  std::vector<EntityId> out{p.source};
  EntityId at = p.source;
  for (const PathStep& s : p.steps) {
    at = s.forward ? s.triple.tail : s.triple.head;
    out.push_back(at);
  }
  return out;
}

std::vector<ReasoningPath> enumerate_paths_of_length(const KnowledgeGraph& g,
                                                     const PathQuery& q,
                                                     int length) {
  PathSearch search(g, q);
  return search.run(length);
}

std::vector<ReasoningPath> enumerate_paths(const KnowledgeGraph& g,
                                           const PathQuery& q) {
  PathSearch search(g, q);
  std::vector<ReasoningPath> out;
  for (int len = 1; len <= q.max_len; ++len) {
    auto batch = search.run(len);
    out.insert(out.end(), std::make_move_iterator(batch.begin()),
               std::make_move_iterator(batch.end()));
  }
  return out;
}

std::vector<ReasoningPath> sample_paths(std::vector<ReasoningPath> paths,
                                        std::size_t n, Rng& rng) {
  if (paths.size() <= n) return paths;
  std::stable_sort(paths.begin(), paths.end(),
                   [](const ReasoningPath& a, const ReasoningPath& b) {
                     return a.length() < b.length();
                   });
  std::vector<ReasoningPath> out;
  out.reserve(n);
  std::size_t i = 0;
  while (i < paths.size() && out.size() < n) {
    std::size_t j = i;
    while (j < paths.size() && paths[j].length() == paths[i].length()) ++j;
    const std::size_t group = j - i;
    const std::size_t need = n - out.size();
    for (std::size_t k : choose_indices(group, need, rng)) {
      out.push_back(std::move(paths[i + k]));
    }
    i = j;
  }
  return out;
}

std::vector<ReasoningPath> find_sampled_paths(const KnowledgeGraph& g,
                                              const PathQuery& q, std::size_t n,
                                              Rng& rng) {
  PathSearch search(g, q);
  std::vector<ReasoningPath> out;
  for (int len = 1; len <= q.max_len && out.size() < n; ++len) {
    auto batch = search.run(len);
    const std::size_t need = n - out.size();
    for (std::size_t k : choose_indices(batch.size(), need, rng)) {
      out.push_back(std::move(batch[k]));
    }
  }
  return out;
}

std::vector<Triple> extract_pruned_subgraph(const KnowledgeGraph& g,
                                            const PathQuery& q) {
  std::unordered_map<Triple, std::size_t, TripleHash> first_len;
  std::vector<std::pair<std::size_t, Triple>> order;
  for (const ReasoningPath& p : enumerate_paths(g, q)) {
    for (const PathStep& s : p.steps) {
      if (first_len.try_emplace(s.triple, p.length()).second) {
        order.emplace_back(p.length(), s.triple);
      }
    }
  }
  std::sort(order.begin(), order.end());
  std::vector<Triple> out;
  out.reserve(order.size());
  for (auto& [len, t] : order) out.push_back(t);
  return out;
}

NamedPath to_named(const KnowledgeGraph& g, const ReasoningPath& p) {
  NamedPath out;
  out.reserve(p.steps.size());
  for (const PathStep& s : p.steps) out.push_back({g.named(s.triple), s.forward});
  return out;
}

std::vector<NamedPath> to_named(const KnowledgeGraph& g,
                                const std::vector<ReasoningPath>& paths) {
  std::vector<NamedPath> out;
  out.reserve(paths.size());
  for (const ReasoningPath& p : paths) out.push_back(to_named(g, p));
  return out;
}

}  // namespace kgpathrl
