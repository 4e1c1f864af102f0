#include <gtest/gtest.h>

#include <sstream>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/log.hpp"
#include "support/fixtures.hpp"

namespace kgpathrl {
namespace {

TEST(KgStoreTest, LoadsG0Counts) {
  std::istringstream in(
      "FDR\tpresident_of\tUSA\nDC\tcapital_of\tUSA\nFDR\twork_at\tDC\n"
      "Merkel\tchancellor_of\tGermany\nBerlin\tcapital_of\tGermany\n");
  LoadReport report;
  const KnowledgeGraph g = load_graph(in, &report);
  EXPECT_EQ(g.num_entities(), 6u);
  EXPECT_EQ(g.num_relations(), 4u);
  EXPECT_EQ(g.num_triples(), 5u);
  EXPECT_EQ(report.lines, 5u);
  EXPECT_EQ(report.duplicates, 0u);
  EXPECT_TRUE(g.contains(NamedTriple{"FDR", "work_at", "DC"}));
  EXPECT_FALSE(g.contains(NamedTriple{"DC", "work_at", "FDR"}));
}

TEST(KgStoreTest, MalformedLineReportsLineNumber) {
  std::istringstream in("a\tr\tb\n\na\tr\n");
  try {
    load_graph(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(KgStoreTest, EmptyFieldAndExtraFieldRejected) {
  std::istringstream empty_field("a\t\tb\n");
  EXPECT_THROW(parse_triples(empty_field), ParseError);
  std::istringstream four("a\tr\tb\tc\n");
  EXPECT_THROW(parse_triples(four), ParseError);
}

TEST(KgStoreTest, CarriageReturnsAndBlankLinesTolerated) {
  std::istringstream in("a\tr\tb\r\n\n\nb\tr\tc\r\n");
  const auto t = parse_triples(in);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].tail, "b");
  EXPECT_EQ(t[1].tail, "c");
}

TEST(KgStoreTest, EmptyInputThrows) {
  std::istringstream in("\n\n");
  EXPECT_THROW(load_graph(in), EmptyGraphError);
}

TEST(KgStoreTest, DuplicatesCountedAndWarned) {
  ScopedWarningCapture capture;
  std::istringstream in("a\tr\tb\na\tr\tb\na\tr\tb\nb\tr\ta\n");
  LoadReport report;
  const KnowledgeGraph g = load_graph(in, &report);
  EXPECT_EQ(g.num_triples(), 2u);
  EXPECT_EQ(report.duplicates, 2u);
  ASSERT_EQ(capture.messages().size(), 1u);
  EXPECT_NE(capture.messages()[0].find("2 duplicate"), std::string::npos);
}

TEST(KgStoreTest, LookupErrors) {
  const KnowledgeGraph g = testing::g0();
  EXPECT_THROW(g.entity("Obama"), LookupError);
  EXPECT_THROW(g.relation("born_in"), LookupError);
  EXPECT_FALSE(g.resolve({"FDR", "born_in", "USA"}).has_value());
  EXPECT_THROW(k_hop_neighbors(g, EntityId{99}, 1), LookupError);
  EXPECT_THROW(k_hop_neighbors(g, g.entity("FDR"), 0), InvalidQueryError);
}

TEST(KgStoreTest, AdjacencyMatchesTripleList) {
  Rng rng(11);
  const auto triples = testing::random_triples(rng, 15, 50, 4);
  const KnowledgeGraph g = KnowledgeGraph::from_triples(triples);
  std::size_t out_total = 0, in_total = 0;
  for (std::uint32_t e = 0; e < g.num_entities(); ++e) {
    const auto out = g.outgoing(EntityId{e});
    const auto in = g.incoming(EntityId{e});
    out_total += out.size();
    in_total += in.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Triple& t = g.triples()[out[i].triple];
      EXPECT_EQ(t.head, EntityId{e});
      EXPECT_EQ(t.tail, out[i].other);
      EXPECT_EQ(t.relation, out[i].relation);
      if (i > 0) {
        EXPECT_LE(std::pair(out[i - 1].relation, out[i - 1].other),
                  std::pair(out[i].relation, out[i].other));
      }
    }
    for (const Neighbor& n : in) {
      const Triple& t = g.triples()[n.triple];
      EXPECT_EQ(t.tail, EntityId{e});
      EXPECT_EQ(t.head, n.other);
    }
  }
  EXPECT_EQ(out_total, g.num_triples());
  EXPECT_EQ(in_total, g.num_triples());
}

TEST(KgStoreTest, KHopMatchesOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto triples = testing::random_triples(rng, 20, 25, 3);
    const KnowledgeGraph g = KnowledgeGraph::from_triples(triples);
    for (int k = 1; k <= 4; ++k) {
      const EntityId e{static_cast<std::uint32_t>(rng.below(g.num_entities()))};
      EXPECT_EQ(k_hop_neighbors(g, e, k), testing::oracle_k_hop(g, e, k));
    }
  }
}

TEST(KgStoreTest, KHopOnG0) {
  const KnowledgeGraph g = testing::g0();
  auto names = [&](const std::vector<EntityId>& ids) {
    std::set<std::string> out;
    for (EntityId e : ids) out.insert(g.name(e));
    return out;
  };
  EXPECT_EQ(names(k_hop_neighbors(g, g.entity("FDR"), 1)),
            (std::set<std::string>{"USA", "DC"}));
  EXPECT_EQ(names(k_hop_neighbors(g, g.entity("Merkel"), 3)),
            (std::set<std::string>{"Germany", "Berlin"}));
}

TEST(KgStoreTest, WriteThenReadRoundTrips) {
  const KnowledgeGraph g = testing::g0();
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream in(out.str());
  const KnowledgeGraph back = load_graph(in);
  ASSERT_EQ(back.num_triples(), g.num_triples());
  for (const Triple& t : g.triples()) EXPECT_TRUE(back.contains(g.named(t)));
}

TEST(TextMapTest, FallbackText) {
  EXPECT_EQ(fallback_text("/m/02mjmr"), "02mjmr");
  EXPECT_EQ(fallback_text("concept:athlete_plays_for_team"), "concept:athlete plays for team");
  EXPECT_EQ(fallback_text("/people/person/place_of_birth"), "place of birth");
  EXPECT_EQ(fallback_text("__hypernym"), "hypernym");
  EXPECT_EQ(fallback_text("dog.n.01"), "dog n 01");
  EXPECT_EQ(fallback_text("___"), "___");
}

TEST(TextMapTest, ExplicitMappingsWin) {
  TextMap tm;
  tm.set_entity("FDR", "Franklin  Roosevelt");
  tm.set_relation("work_at", "works at");
  EXPECT_EQ(tm.entity_text("FDR"), "Franklin Roosevelt");
  EXPECT_EQ(tm.entity_text("New_York"), "New York");
  EXPECT_EQ(tm.relation_text("work_at"), "works at");
  ASSERT_NE(tm.find_entity("FDR"), nullptr);
  EXPECT_EQ(tm.find_entity("USA"), nullptr);
}

}  // namespace
}  // namespace kgpathrl
