#include "kgpathrl/sampler.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_set>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/log.hpp"
#include "kgpathrl/parallel.hpp"

namespace kgpathrl {

void SamplingConfig::validate() const {
  if (negatives < 1) throw InvalidQueryError("negatives per positive must be >= 1");
  if (paths < 1) throw InvalidQueryError("paths per example must be >= 1");
  if (max_len < 1) throw InvalidQueryError("max path length must be >= 1");
  if (neighborhood_k < 1) throw InvalidQueryError("neighborhood k must be >= 1");
}

namespace {

Triple replace(const Triple& t, CorruptedSlot slot, EntityId e) {
  Triple out = t;
  (slot == CorruptedSlot::head ? out.head : out.tail) = e;
  return out;
}

// Draws distinct candidates from per-side lists until `want` are taken or
// both lists are empty. The side is a fair coin whenever both are non-empty.
void draw_from_sides(std::vector<Triple>& heads, std::vector<Triple>& tails,
                     std::size_t want, Rng& rng, std::vector<Corruption>& out) {
  while (out.size() < want && (!heads.empty() || !tails.empty())) {
    bool use_head;
    if (heads.empty()) {
      use_head = false;
    } else if (tails.empty()) {
      use_head = true;
    } else {
      use_head = rng.coin();
    }
    auto& side = use_head ? heads : tails;
    const std::size_t j = rng.below(side.size());
    out.push_back({side[j], use_head ? CorruptedSlot::head : CorruptedSlot::tail});
    side[j] = side.back();
    side.pop_back();
  }
}

}  // namespace

std::vector<Corruption> corrupt(const KnowledgeGraph& g, const Triple& t,
                                const SamplingConfig& cfg, Rng& rng) {
  std::vector<Corruption> out;
  const std::size_t m = cfg.negatives;

  std::unordered_set<Triple, TripleHash> taken;
  auto valid = [&](const Triple& c) {
    return c.head != c.tail && c != t && !g.contains(c) && !taken.contains(c);
  };

  const auto head_pool = k_hop_neighbors(g, t.head, cfg.neighborhood_k);
  const auto tail_pool = k_hop_neighbors(g, t.tail, cfg.neighborhood_k);
  std::vector<EntityId> pool;
  std::set_intersection(head_pool.begin(), head_pool.end(), tail_pool.begin(),
                        tail_pool.end(), std::back_inserter(pool));

  std::vector<Triple> heads, tails;
  for (EntityId e : pool) {
    if (Triple c = replace(t, CorruptedSlot::head, e); valid(c)) heads.push_back(c);
    if (Triple c = replace(t, CorruptedSlot::tail, e); valid(c)) tails.push_back(c);
  }
  draw_from_sides(heads, tails, m, rng, out);

  if (out.size() < m && cfg.vocabulary_fallback && g.num_entities() > 0) {
    for (const Corruption& c : out) taken.insert(c.triple);
    const std::size_t budget = 64 * m;
    for (std::size_t attempt = 0; attempt < budget && out.size() < m; ++attempt) {
      const CorruptedSlot slot = rng.coin() ? CorruptedSlot::head : CorruptedSlot::tail;
      const Triple c = replace(
          t, slot, EntityId{static_cast<std::uint32_t>(rng.below(g.num_entities()))});
      if (!valid(c)) continue;
      taken.insert(c);
      out.push_back({c, slot});
    }
    if (out.size() < m) {
      // Rejection ran out of budget: the valid set is small, list it.
      heads.clear();
      tails.clear();
      for (std::uint32_t i = 0; i < g.num_entities(); ++i) {
        if (Triple c = replace(t, CorruptedSlot::head, EntityId{i}); valid(c)) {
          heads.push_back(c);
        }
        if (Triple c = replace(t, CorruptedSlot::tail, EntityId{i}); valid(c)) {
          tails.push_back(c);
        }
      }
      draw_from_sides(heads, tails, m, rng, out);
    }
  }

  if (out.empty()) {
    const NamedTriple n = g.named(t);
    warn("no negative available for (" + n.head + ", " + n.relation + ", " +
         n.tail + ")");
  }
  return out;
}

std::vector<LabeledExample> build_training_set(const KnowledgeGraph& g,
                                               const SamplingConfig& cfg) {
  cfg.validate();
  const auto triples = g.triples();
  std::vector<std::vector<LabeledExample>> per_positive(triples.size());

  parallel_for(triples.size(), cfg.threads, [&](std::size_t i) {
    Rng rng = Rng::stream(cfg.seed, i);
    const Triple& p = triples[i];
    if (p.head == p.tail) return;  // a self loop has no simple path to explain it
    PathQuery q{p.head, p.tail, cfg.max_len, p};
    auto paths = find_sampled_paths(g, q, cfg.paths, rng);
    if (paths.empty()) return;

    auto& bucket = per_positive[i];
    LabeledExample pos{p, 1, std::move(paths), {}, i};
    if (cfg.with_subgraph) pos.subgraph = extract_pruned_subgraph(g, q);
    bucket.push_back(std::move(pos));

    for (const Corruption& c : corrupt(g, p, cfg, rng)) {
      PathQuery nq{c.triple.head, c.triple.tail, cfg.max_len, std::nullopt};
      auto neg_paths = find_sampled_paths(g, nq, cfg.paths, rng);
      if (neg_paths.empty()) continue;
      LabeledExample neg{c.triple, 0, std::move(neg_paths), {}, i};
      if (cfg.with_subgraph) neg.subgraph = extract_pruned_subgraph(g, nq);
      bucket.push_back(std::move(neg));
    }
  });

  std::vector<LabeledExample> out;
  for (auto& bucket : per_positive) {
    std::move(bucket.begin(), bucket.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace kgpathrl
