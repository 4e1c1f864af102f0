#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/linearizer.hpp"
#include "kgpathrl/path_engine.hpp"
#include "kgpathrl/rng.hpp"
#include "kgpathrl/sampler.hpp"
#include "kgpathrl/scorers.hpp"

namespace kgpathrl {

// Max aggregation over a candidate's instance scores.
struct AggregationPolicy {
  double empty_path_score = 0.0;
};

// Largest score, or policy.empty_path_score for an empty list.
double aggregate(std::span<const double> scores, const AggregationPolicy& policy = {});

// 1 + #(negatives above) + #(negatives tied): ties count against the positive.
std::size_t pessimistic_rank(double positive, std::span<const double> negatives);

struct EvalConfig {
  Scheme scheme = Scheme::individual_paths;
  std::size_t negatives_per_query = 50;
  int max_len = 3;
  // Cap on paths per candidate at inference; 0 keeps every path.
  std::size_t inference_max_paths = 0;
  // Overrides the scorer's own empty-path score when set.
  std::optional<double> empty_path_score;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PhaseTimings {
  double paths_seconds = 0;
  double scoring_seconds = 0;
  double aggregation_seconds = 0;

  PhaseTimings& operator+=(const PhaseTimings& o) {
    paths_seconds += o.paths_seconds;
    scoring_seconds += o.scoring_seconds;
    aggregation_seconds += o.aggregation_seconds;
    return *this;
  }
};

struct RankingResult {
  NamedTriple query;
  double positive_score = 0;
  std::vector<NamedTriple> negatives;
  std::vector<CorruptedSlot> negative_slots;
  std::vector<double> negative_scores;
  std::size_t rank = 1;
  double reciprocal_rank = 1;
  // The positive's highest-scoring path, when it has one.
  std::optional<NamedPath> best_path;
  double best_path_score = 0;
};

struct Metrics {
  double hits_at_1 = 0;
  double mrr = 0;
  std::size_t n_queries = 0;
};

// Metrics from ranks, reduced in the given order.
Metrics compute_metrics(std::span<const std::size_t> ranks);
Metrics compute_metrics(std::span<const RankingResult> results);

// `hits@1=<f> mrr=<f> n=<int>` with shortest round-trip doubles.
std::string format_metrics(const Metrics& m);
Metrics parse_metrics(std::string_view line);

// Ranks `query` against up to cfg.negatives_per_query corruptions drawn from
// the whole vocabulary of g (head or tail by fair coin, none in g). Every
// candidate's paths are found with the candidate itself hidden, linearized,
// scored in one batch and max-aggregated. Entities unknown to g simply have
// no paths.
RankingResult rank_candidates(const KnowledgeGraph& g, const NamedTriple& query,
                              const Scorer& scorer, const EvalConfig& cfg,
                              const TextMap& tm, Rng& rng,
                              PhaseTimings* timings = nullptr);

struct Evaluation {
  Metrics metrics;
  std::vector<RankingResult> results;
  PhaseTimings timings;
};

// Query i uses Rng::stream(cfg.seed, i). Throws DatasetError on an empty test
// set or when a test triple is part of g.
Evaluation evaluate(const KnowledgeGraph& g, std::span<const NamedTriple> tests,
                    const Scorer& scorer, const EvalConfig& cfg, const TextMap& tm);

inline constexpr std::string_view kNoPathExplanation =
    "no reasoning path (score floor applied)";

// "(h, r, t) ⇐ (h, r1, e); (e, r2, t) [0.95]", using mapped display text
// where a mapping exists and raw ids otherwise.
std::string explain(const RankingResult& result, const TextMap& tm);

std::string result_to_json(const RankingResult& r);
RankingResult result_from_json(std::string_view line);
void write_results(std::ostream& out, std::span<const RankingResult> results);
std::vector<RankingResult> read_results(std::istream& in);

}  // namespace kgpathrl
