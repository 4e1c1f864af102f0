#include <gtest/gtest.h>

#include <sstream>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/scorers.hpp"
#include "support/fixtures.hpp"

namespace kgpathrl {
namespace {

Instance path_instance(const std::string& head_rel, std::vector<NamedPath> paths) {
  Instance inst;
  inst.meta.triple = {"x", head_rel, "y"};
  inst.meta.paths = std::move(paths);
  return inst;
}

NamedPath two_hop(const std::string& r1, bool f1, const std::string& r2, bool f2) {
  return {{{"x", r1, "z"}, f1}, {{"z", r2, "y"}, f2}};
}

TEST(RuleMinerTest, MatchesOracleCounts) {
  Rng gen(101);
  for (int trial = 0; trial < 12; ++trial) {
    const auto triples = testing::random_triples(gen, 9, 22, 2);
    const KnowledgeGraph g = KnowledgeGraph::from_triples(triples);
    const int k = 1 + static_cast<int>(gen.below(3));
    const auto oracle = testing::oracle_rule_counts(g, k);
    const auto rules = mine_rules(g, k, 1);

    std::size_t expected = 0;
    for (const auto& [key, s] : oracle.support) expected += s >= 1;
    ASSERT_EQ(rules.size(), expected);
    for (const PathRule& r : rules) {
      testing::OracleBody body;
      for (const RuleAtom& a : r.body) body.emplace_back(a.relation, a.forward);
      EXPECT_EQ(r.support, oracle.support.at({r.head, body}));
      EXPECT_EQ(r.body_count, oracle.body_count.at(body));
      EXPECT_LE(r.support, r.body_count);
    }
  }
}

TEST(RuleMinerTest, OrderedByConfidenceThenSupport) {
  Rng gen(5);
  const auto triples = testing::random_triples(gen, 30, 120, 3);
  const auto rules = mine_rules(KnowledgeGraph::from_triples(triples), 2, 1);
  ASSERT_GT(rules.size(), 2u);
  for (std::size_t i = 1; i < rules.size(); ++i) {
    const double a = rules[i - 1].confidence();
    const double b = rules[i].confidence();
    EXPECT_GE(a, b);
    if (a == b) EXPECT_GE(rules[i - 1].support, rules[i].support);
  }
}

TEST(RuleMinerTest, MinSupportFilters) {
  Rng gen(6);
  const auto triples = testing::random_triples(gen, 30, 120, 3);
  const KnowledgeGraph g = KnowledgeGraph::from_triples(triples);
  for (const PathRule& r : mine_rules(g, 2, 3)) EXPECT_GE(r.support, 3u);
  EXPECT_THROW(mine_rules(g, 0), InvalidQueryError);
}

TEST(RuleMinerTest, ThreadCountDoesNotChangeRules) {
  Rng gen(8);
  const auto triples = testing::random_triples(gen, 40, 160, 4);
  const KnowledgeGraph g = KnowledgeGraph::from_triples(triples);
  EXPECT_EQ(mine_rules(g, 3, 2, 1), mine_rules(g, 3, 2, 4));
}

TEST(RuleMinerTest, G0RuleForWorkAt) {
  const auto rules = mine_rules(testing::g0(), 3, 1);
  const PathRule want{{{"president_of", true}, {"capital_of", false}}, "work_at", 1, 1};
  EXPECT_NE(std::find(rules.begin(), rules.end(), want), rules.end());
}

TEST(RuleJsonTest, RoundTripAndValidation) {
  const PathRule r{{{"president_of", true}, {"capital_of", false}}, "work_at", 19, 20};
  const std::string line = rule_to_json(r);
  EXPECT_EQ(line,
            R"({"body":[["president_of","fwd"],["capital_of","bwd"]],"head":"work_at","support":19,"body_count":20})");
  EXPECT_EQ(rule_from_json(line), r);
  EXPECT_THROW(rule_from_json(R"({"body":[],"head":"h","support":1,"body_count":1})"),
               ProtocolError);
  EXPECT_THROW(rule_from_json(R"({"body":[["r","fwd"]],"head":"h","support":3,"body_count":2})"),
               ProtocolError);
  EXPECT_THROW(rule_from_json(R"({"body":[["r","up"]],"head":"h","support":1,"body_count":2})"),
               ProtocolError);
  std::stringstream buf;
  const std::vector<PathRule> rules{r, r};
  write_rules(buf, rules);
  EXPECT_EQ(read_rules(buf), rules);
}

TEST(RuleScorerTest, ConfidenceFloorAndClamp) {
  const RuleScorer scorer({
      {{{"president_of", true}, {"capital_of", false}}, "work_at", 19, 20},
      {{{"born_in", true}, {"located_in", true}}, "nationality", 20, 20},
  });
  EXPECT_DOUBLE_EQ(scorer.score(path_instance(
                       "work_at", {two_hop("president_of", true, "capital_of", false)})),
                   0.95);
  EXPECT_DOUBLE_EQ(scorer.score(path_instance(
                       "nationality", {two_hop("born_in", true, "located_in", true)})),
                   0.99);
  // Same body, wrong direction: no rule.
  EXPECT_DOUBLE_EQ(scorer.score(path_instance(
                       "work_at", {two_hop("president_of", true, "capital_of", true)})),
                   kRuleScoreFloor);
  // Same body, other head: no rule.
  EXPECT_DOUBLE_EQ(scorer.score(path_instance(
                       "nationality", {two_hop("president_of", true, "capital_of", false)})),
                   kRuleScoreFloor);
}

TEST(RuleScorerTest, MaxOverCarriedPaths) {
  const RuleScorer scorer({{{{"a", true}}, "h", 3, 4}, {{{"b", true}}, "h", 1, 4}});
  const NamedPath pa{{{"x", "a", "y"}, true}};
  const NamedPath pb{{{"x", "b", "y"}, true}};
  EXPECT_DOUBLE_EQ(scorer.score(path_instance("h", {pb, pa})), 0.75);
}

TEST(RuleScorerTest, InstanceWithoutPathIsRejected) {
  const RuleScorer scorer({});
  EXPECT_THROW(scorer.score(path_instance("h", {})), ContractViolation);
  EXPECT_EQ(scorer.empty_path_score(), 0.0);
}

TEST(SimpleScorersTest, ConstantAndRandom) {
  std::vector<Instance> batch(5);
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i].question = "q" + std::to_string(i);
  const ConstantScorer c;
  EXPECT_EQ(c.score_batch(batch), std::vector<double>(5, 0.5));
  EXPECT_EQ(c.empty_path_score(), 0.5);
  EXPECT_THROW(ConstantScorer(1.5), InvalidQueryError);

  const RandomScorer r(3);
  const auto all = r.score_batch(batch);
  ASSERT_EQ(all.size(), 5u);
  for (double s : all) {
    EXPECT_GE(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
  // Pure function of the instance: scoring one at a time agrees.
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(r.score_batch(std::span(&batch[i], 1))[0], all[i]);
  }
  EXPECT_NE(RandomScorer(4).score_batch(batch), all);
}

}  // namespace
}  // namespace kgpathrl
