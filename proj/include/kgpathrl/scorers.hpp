#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/linearizer.hpp"

namespace kgpathrl {

// Scores instances with p(y = 1 | triple, context). Implementations return
// one probability in [0, 1] per instance, in input order.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::vector<double> score_batch(std::span<const Instance> instances) const = 0;

  // Score given to a candidate that produced no instance. Never above the
  // smallest score the scorer can emit.
  virtual double empty_path_score() const { return 0.0; }

  // Whether score_batch may be called from several threads at once.
  virtual bool thread_safe() const { return true; }
};

// 0.5 for everything. Treats a path-less candidate like any other, so every
// candidate ties.
class ConstantScorer final : public Scorer {
 public:
  explicit ConstantScorer(double value = 0.5);
  std::vector<double> score_batch(std::span<const Instance> instances) const override;
  double empty_path_score() const override { return value_; }

 private:
  double value_;
};

// Uniform [0, 1) scores that are a pure function of (seed, question,
// context), so batching and threading never change them.
class RandomScorer final : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::vector<double> score_batch(std::span<const Instance> instances) const override;

 private:
  std::uint64_t seed_;
};

struct RuleAtom {
  std::string relation;
  bool forward = true;
  auto operator<=>(const RuleAtom&) const = default;
};

// body => head over (relation, orientation) sequences; entity free.
struct PathRule {
  std::vector<RuleAtom> body;
  std::string head;
  std::size_t support = 0;     // pairs with a body path and the head triple
  std::size_t body_count = 0;  // pairs with a body path
  double confidence() const {
    return body_count == 0 ? 0.0
                           : static_cast<double>(support) /
                                 static_cast<double>(body_count);
  }
  bool operator==(const PathRule&) const = default;
};

// Rules grounded by the graph's own paths (target hidden, length <= k).
// Rules with support below min_support are dropped. Ordered by confidence,
// then support (both descending), then head and body.
std::vector<PathRule> mine_rules(const KnowledgeGraph& g, int k,
                                 std::size_t min_support = 2, unsigned threads = 1);

std::string rule_to_json(const PathRule& rule);
PathRule rule_from_json(std::string_view line);
void write_rules(std::ostream& out, std::span<const PathRule> rules);
std::vector<PathRule> read_rules(std::istream& in);

inline constexpr double kRuleScoreFloor = 0.01;

// Confidence of the rule matching an instance's path, clamped to
// [kRuleScoreFloor, 1 - kRuleScoreFloor]; the floor when nothing matches.
// Instances carrying several paths take the best one.
class RuleScorer final : public Scorer {
 public:
  explicit RuleScorer(std::vector<PathRule> rules);

  std::vector<double> score_batch(std::span<const Instance> instances) const override;

  // Throws ContractViolation when the instance carries no path.
  double score(const Instance& inst) const;
  double score_path(std::string_view head_relation, const NamedPath& path) const;

  const std::vector<PathRule>& rules() const { return rules_; }

 private:
  std::vector<PathRule> rules_;
  std::unordered_map<std::string, double> confidence_;
};

struct RemoteScorerOptions {
  std::size_t batch_size = 32;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  unsigned max_in_flight = 4;
  std::chrono::seconds timeout{120};
};

// Client for the scorer service: POST /score with
// {"instances":[{"question":..,"context":..}]}, expecting {"scores":[..]}.
// Chunks are retried as a whole with exponential backoff.
class RemoteScorer final : public Scorer {
 public:
  explicit RemoteScorer(std::string endpoint, RemoteScorerOptions options = {});

  std::vector<double> score_batch(std::span<const Instance> instances) const override;

  // GET /health answered {"status":"ok"}.
  bool healthy() const;
  std::size_t requests_sent() const { return requests_.load(); }

 private:
  std::vector<double> score_chunk(std::span<const Instance> chunk,
                                  std::size_t chunk_index, std::size_t offset) const;

  std::string endpoint_;
  RemoteScorerOptions options_;
  mutable std::atomic<std::size_t> requests_{0};
};

}  // namespace kgpathrl
