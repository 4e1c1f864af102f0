#include "kgpathrl/eval_harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/log.hpp"
#include "kgpathrl/parallel.hpp"

namespace kgpathrl {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

NamedTriple with_slot(const NamedTriple& t, CorruptedSlot slot, const std::string& e) {
  NamedTriple out = t;
  (slot == CorruptedSlot::head ? out.head : out.tail) = e;
  return out;
}

std::vector<std::pair<NamedTriple, CorruptedSlot>> draw_negatives(
    const KnowledgeGraph& g, const NamedTriple& query, std::size_t want, Rng& rng) {
  std::vector<std::pair<NamedTriple, CorruptedSlot>> out;
  const auto& vocab = g.entity_names();
  if (vocab.empty() || want == 0) return out;
  std::set<NamedTriple> taken;
  auto valid = [&](const NamedTriple& c) {
    return c.head != c.tail && c != query && !g.contains(c) && !taken.contains(c);
  };
  const std::size_t budget = 64 * want;
  for (std::size_t attempt = 0; attempt < budget && out.size() < want; ++attempt) {
    const CorruptedSlot slot = rng.coin() ? CorruptedSlot::head : CorruptedSlot::tail;
    NamedTriple c = with_slot(query, slot, vocab[rng.below(vocab.size())]);
    if (!valid(c)) continue;
    taken.insert(c);
    out.emplace_back(std::move(c), slot);
  }
  if (out.size() < want) {
    std::vector<NamedTriple> heads, tails;
    for (const std::string& e : vocab) {
      if (auto c = with_slot(query, CorruptedSlot::head, e); valid(c)) heads.push_back(c);
      if (auto c = with_slot(query, CorruptedSlot::tail, e); valid(c)) tails.push_back(c);
    }
    while (out.size() < want && (!heads.empty() || !tails.empty())) {
      const bool use_head = heads.empty() ? false : tails.empty() ? true : rng.coin();
      auto& side = use_head ? heads : tails;
      const std::size_t j = rng.below(side.size());
      out.emplace_back(side[j], use_head ? CorruptedSlot::head : CorruptedSlot::tail);
      side[j] = side.back();
      side.pop_back();
    }
  }
  return out;
}

struct CandidateContext {
  std::vector<NamedPath> paths;
  std::vector<NamedTriple> edges;
};

CandidateContext candidate_context(const KnowledgeGraph& g, const NamedTriple& c,
                                   const EvalConfig& cfg, Rng& rng) {
  CandidateContext out;
  if (cfg.scheme == Scheme::triple_only) return out;
  const auto h = g.find_entity(c.head);
  const auto t = g.find_entity(c.tail);
  if (!h || !t || *h == *t) return out;
  std::optional<Triple> hide;
  if (const auto r = g.find_relation(c.relation)) hide = Triple{*h, *r, *t};
  const PathQuery q{*h, *t, cfg.max_len, hide};
  if (cfg.scheme == Scheme::edge_list) {
    for (const Triple& e : extract_pruned_subgraph(g, q)) out.edges.push_back(g.named(e));
    return out;
  }
  auto paths = enumerate_paths(g, q);
  if (cfg.inference_max_paths > 0) {
    paths = sample_paths(std::move(paths), cfg.inference_max_paths, rng);
  }
  out.paths = to_named(g, paths);
  return out;
}

}  // namespace

double aggregate(std::span<const double> scores, const AggregationPolicy& policy) {
  if (scores.empty()) return policy.empty_path_score;
  return *std::max_element(scores.begin(), scores.end());
}

std::size_t pessimistic_rank(double positive, std::span<const double> negatives) {
  return 1 + static_cast<std::size_t>(std::count_if(
                 negatives.begin(), negatives.end(), [&](double s) { return s >= positive; }));
}

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// p / q rounded once when both fit a double mantissa.
double ratio_to_double(u128 p, u128 q) {
  constexpr u128 kExact = u128{1} << 53;
  if (p <= kExact && q <= kExact) return static_cast<double>(p) / static_cast<double>(q);
  return static_cast<double>(static_cast<long double>(p) / static_cast<long double>(q));
}

// Mean of 1/r as an exact fraction while it fits in 128 bits.
double mean_reciprocal(std::span<const std::size_t> ranks) {
  constexpr u128 kLimit = u128{1} << 120;
  u128 p = 0, q = 1;
  std::size_t i = 0;
  for (; i < ranks.size(); ++i) {
    const u128 r = ranks[i];
    if (q > kLimit / r) break;
    p = p * r + q;
    q *= r;
    const u128 g = gcd128(p, q);
    p /= g;
    q /= g;
  }
  const u128 n = ranks.size();
  if (i == ranks.size() && q <= kLimit / n) {
    const u128 denom = q * n;
    const u128 g = gcd128(p, denom);
    return ratio_to_double(p / g, denom / g);
  }
  long double sum = static_cast<long double>(p) / static_cast<long double>(q);
  for (; i < ranks.size(); ++i) sum += 1.0L / static_cast<long double>(ranks[i]);
  return static_cast<double>(sum / static_cast<long double>(ranks.size()));
}

}  // namespace

Metrics compute_metrics(std::span<const std::size_t> ranks) {
  Metrics m;
  m.n_queries = ranks.size();
  if (ranks.empty()) return m;
  if (std::find(ranks.begin(), ranks.end(), 0) != ranks.end()) {
    throw ContractViolation("ranks start at 1");
  }
  const auto hits = static_cast<std::size_t>(std::count(ranks.begin(), ranks.end(), 1));
  m.hits_at_1 = static_cast<double>(hits) / static_cast<double>(ranks.size());
  m.mrr = mean_reciprocal(ranks);
  return m;
}

Metrics compute_metrics(std::span<const RankingResult> results) {
  std::vector<std::size_t> ranks;
  ranks.reserve(results.size());
  for (const RankingResult& r : results) ranks.push_back(r.rank);
  return compute_metrics(ranks);
}

std::string format_metrics(const Metrics& m) {
  return "hits@1=" + shortest(m.hits_at_1) + " mrr=" + shortest(m.mrr) +
         " n=" + std::to_string(m.n_queries);
}

Metrics parse_metrics(std::string_view line) {
  Metrics m;
  bool seen[3] = {false, false, false};
  while (!line.empty()) {
    const auto space = line.find(' ');
    std::string_view tok = line.substr(0, space);
    line = space == std::string_view::npos ? std::string_view{} : line.substr(space + 1);
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string_view key = tok.substr(0, eq);
    const std::string_view val = tok.substr(eq + 1);
    auto parse_double = [&](double& out) {
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), out);
      if (ec != std::errc{}) throw ProtocolError("bad metric value " + std::string(val));
    };
    if (key == "hits@1") {
      parse_double(m.hits_at_1);
      seen[0] = true;
    } else if (key == "mrr") {
      parse_double(m.mrr);
      seen[1] = true;
    } else if (key == "n") {
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), m.n_queries);
      if (ec != std::errc{}) throw ProtocolError("bad metric value " + std::string(val));
      seen[2] = true;
    }
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw ProtocolError("incomplete metrics line");
  return m;
}

RankingResult rank_candidates(const KnowledgeGraph& g, const NamedTriple& query,
                              const Scorer& scorer, const EvalConfig& cfg,
                              const TextMap& tm, Rng& rng, PhaseTimings* timings) {
  const AggregationPolicy policy{cfg.empty_path_score.value_or(scorer.empty_path_score())};
  PhaseTimings local;

  RankingResult result;
  result.query = query;
  auto negatives = draw_negatives(g, query, cfg.negatives_per_query, rng);
  if (negatives.size() < cfg.negatives_per_query) {
    warn("only " + std::to_string(negatives.size()) + " negatives available for (" +
         query.head + ", " + query.relation + ", " + query.tail + ")");
  }

  std::vector<NamedTriple> candidates{query};
  for (auto& [t, slot] : negatives) {
    candidates.push_back(t);
    result.negatives.push_back(t);
    result.negative_slots.push_back(slot);
  }

  auto start = Clock::now();
  std::vector<Instance> instances;
  std::vector<std::size_t> owner;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    auto ctx = candidate_context(g, candidates[c], cfg, rng);
    const bool has_structure = !ctx.paths.empty() || !ctx.edges.empty();
    if (!has_structure && cfg.scheme != Scheme::triple_only) continue;
    for (Instance& inst : make_instances(candidates[c], ctx.paths, ctx.edges, cfg.scheme,
                                         tm, std::nullopt, c)) {
      instances.push_back(std::move(inst));
      owner.push_back(c);
    }
  }
  local.paths_seconds = seconds_since(start);

  start = Clock::now();
  const std::vector<double> scores = scorer.score_batch(instances);
  if (scores.size() != instances.size()) {
    throw ProtocolError("scorer returned " + std::to_string(scores.size()) +
                        " scores for " + std::to_string(instances.size()) + " instances");
  }
  local.scoring_seconds = seconds_since(start);

  start = Clock::now();
  std::vector<std::vector<double>> per_candidate(candidates.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    per_candidate[owner[i]].push_back(scores[i]);
  }
  result.positive_score = aggregate(per_candidate[0], policy);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    result.negative_scores.push_back(aggregate(per_candidate[c], policy));
  }
  result.rank = pessimistic_rank(result.positive_score, result.negative_scores);
  result.reciprocal_rank = 1.0 / static_cast<double>(result.rank);

  for (std::size_t i = 0; i < instances.size() && owner[i] == 0; ++i) {
    if (instances[i].meta.paths.empty()) continue;
    if (!result.best_path || scores[i] > result.best_path_score) {
      result.best_path = instances[i].meta.paths.front();
      result.best_path_score = scores[i];
    }
  }
  local.aggregation_seconds = seconds_since(start);

  if (timings) *timings += local;
  return result;
}

Evaluation evaluate(const KnowledgeGraph& g, std::span<const NamedTriple> tests,
                    const Scorer& scorer, const EvalConfig& cfg, const TextMap& tm) {
  if (tests.empty()) throw DatasetError("empty test set");
  for (const NamedTriple& t : tests) {
    if (g.contains(t)) {
      throw DatasetError("test triple (" + t.head + ", " + t.relation + ", " + t.tail +
                         ") is part of the context graph");
    }
  }
  Evaluation ev;
  ev.results.resize(tests.size());
  std::vector<PhaseTimings> timings(tests.size());
  const unsigned threads = scorer.thread_safe() ? cfg.threads : 1;
  parallel_for(tests.size(), threads, [&](std::size_t i) {
    Rng rng = Rng::stream(cfg.seed, i);
    ev.results[i] = rank_candidates(g, tests[i], scorer, cfg, tm, rng, &timings[i]);
  });
  for (const PhaseTimings& t : timings) ev.timings += t;
  ev.metrics = compute_metrics(ev.results);
  return ev;
}

namespace {

std::string display_entity(const TextMap& tm, const std::string& id) {
  const std::string* s = tm.find_entity(id);
  return s ? *s : id;
}

std::string display_relation(const TextMap& tm, const std::string& id) {
  const std::string* s = tm.find_relation(id);
  return s ? *s : id;
}

std::string display_triple(const TextMap& tm, const NamedTriple& t) {
  return "(" + display_entity(tm, t.head) + ", " + display_relation(tm, t.relation) +
         ", " + display_entity(tm, t.tail) + ")";
}

}  // namespace

std::string explain(const RankingResult& result, const TextMap& tm) {
  if (!result.best_path || result.best_path->empty()) {
    return std::string(kNoPathExplanation);
  }
  std::string out = display_triple(tm, result.query) + " ⇐ ";
  for (std::size_t i = 0; i < result.best_path->size(); ++i) {
    if (i > 0) out += "; ";
    out += display_triple(tm, (*result.best_path)[i].triple);
  }
  char score[32];
  std::snprintf(score, sizeof score, "%.4g", result.best_path_score);
  out += " [";
  out += score;
  out += "]";
  return out;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson triple_json(const NamedTriple& t) { return ojson::array({t.head, t.relation, t.tail}); }

NamedTriple triple_from(const ojson& j) {
  return {j.at(0).get<std::string>(), j.at(1).get<std::string>(), j.at(2).get<std::string>()};
}

}  // namespace

std::string result_to_json(const RankingResult& r) {
  ojson j;
  j["query"] = triple_json(r.query);
  j["positive_score"] = r.positive_score;
  j["rank"] = r.rank;
  j["reciprocal_rank"] = r.reciprocal_rank;
  ojson negs = ojson::array();
  for (std::size_t i = 0; i < r.negatives.size(); ++i) {
    const auto& t = r.negatives[i];
    negs.push_back({t.head, t.relation, t.tail,
                    r.negative_slots.at(i) == CorruptedSlot::head ? "head" : "tail"});
  }
  j["negatives"] = std::move(negs);
  j["negative_scores"] = r.negative_scores;
  if (r.best_path) {
    ojson path = ojson::array();
    for (const NamedStep& s : *r.best_path) {
      path.push_back({s.triple.head, s.triple.relation, s.triple.tail,
                      direction_name(s.forward)});
    }
    j["best_path"] = std::move(path);
  } else {
    j["best_path"] = nullptr;
  }
  j["best_path_score"] = r.best_path_score;
  return j.dump();
}

RankingResult result_from_json(std::string_view line) {
  try {
    const auto j = ojson::parse(line);
    RankingResult r;
    r.query = triple_from(j.at("query"));
    r.positive_score = j.at("positive_score").get<double>();
    r.rank = j.at("rank").get<std::size_t>();
    r.reciprocal_rank = j.at("reciprocal_rank").get<double>();
    for (const auto& n : j.at("negatives")) {
      r.negatives.push_back(triple_from(n));
      r.negative_slots.push_back(n.at(3).get<std::string>() == "head" ? CorruptedSlot::head
                                                                       : CorruptedSlot::tail);
    }
    r.negative_scores = j.at("negative_scores").get<std::vector<double>>();
    if (!j.at("best_path").is_null()) {
      NamedPath p;
      for (const auto& s : j["best_path"]) {
        p.push_back({triple_from(s), s.at(3).get<std::string>() == "fwd"});
      }
      r.best_path = std::move(p);
    }
    r.best_path_score = j.at("best_path_score").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed result: ") + e.what());
  }
}

void write_results(std::ostream& out, std::span<const RankingResult> results) {
  for (const RankingResult& r : results) out << result_to_json(r) << '\n';
}

std::vector<RankingResult> read_results(std::istream& in) {
  std::vector<RankingResult> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(result_from_json(line));
  }
  return out;
}

}  // namespace kgpathrl
