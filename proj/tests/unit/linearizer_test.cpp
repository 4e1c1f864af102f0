#include <gtest/gtest.h>

#include <sstream>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/linearizer.hpp"
#include "support/fixtures.hpp"

namespace kgpathrl {
namespace {

NamedPath fixture_path() {
  return {{{"FDR", "president_of", "USA"}, true}, {{"DC", "capital_of", "USA"}, false}};
}

TextMap fixture_text() {
  TextMap tm;
  tm.set_entity("FDR", "Franklin Roosevelt");
  tm.set_entity("DC", "Washington D.C.");
  return tm;
}

TEST(LinearizerTest, QuestionTemplate) {
  EXPECT_EQ(render_question({"FDR", "work_at", "DC"}, fixture_text()),
            "Question: Franklin Roosevelt work at what ? Is the correct answer "
            "Washington D.C. ?");
}

TEST(LinearizerTest, IndividualPathContext) {
  EXPECT_EQ(render_context(Scheme::individual_paths, {{fixture_path()}, {}}, fixture_text()),
            "Context: Franklin Roosevelt president of USA; Washington D.C. capital of USA;");
}

TEST(LinearizerTest, CombinedJoinsPathsWithBar) {
  const NamedPath direct{{{"FDR", "work_at", "DC"}, true}};
  EXPECT_EQ(render_context(Scheme::combined_paths, {{direct, fixture_path()}, {}}, TextMap{}),
            "Context: FDR work at DC; | FDR president of USA; DC capital of USA;");
}

TEST(LinearizerTest, EdgeListAndTripleOnly) {
  const std::vector<NamedTriple> edges{{"FDR", "president_of", "USA"},
                                       {"DC", "capital_of", "USA"}};
  EXPECT_EQ(render_context(Scheme::edge_list, {{}, edges}, TextMap{}),
            "Context: FDR president of USA; DC capital of USA;");
  EXPECT_EQ(render_context(Scheme::triple_only, {}, TextMap{}), "");
}

TEST(LinearizerTest, EmptyStructureIsAContractViolation) {
  EXPECT_THROW(render_context(Scheme::individual_paths, {}, TextMap{}), ContractViolation);
  EXPECT_THROW(render_context(Scheme::individual_paths, {{NamedPath{}}, {}}, TextMap{}),
               ContractViolation);
  EXPECT_THROW(render_context(Scheme::combined_paths, {}, TextMap{}), ContractViolation);
  EXPECT_THROW(render_context(Scheme::edge_list, {}, TextMap{}), ContractViolation);
  EXPECT_THROW(
      render_context(Scheme::individual_paths, {{fixture_path(), fixture_path()}, {}}, {}),
      ContractViolation);
}

TEST(LinearizerTest, SchemeNames) {
  for (Scheme s : {Scheme::individual_paths, Scheme::combined_paths, Scheme::edge_list,
                   Scheme::triple_only}) {
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_EQ(parse_scheme("combined_paths"), Scheme::combined_paths);
  EXPECT_THROW(parse_scheme("bag_of_words"), InvalidQueryError);
}

TEST(LinearizerTest, InstanceCountsPerScheme) {
  const NamedTriple t{"FDR", "work_at", "DC"};
  const std::vector<NamedPath> paths{fixture_path(), fixture_path()};
  EXPECT_EQ(make_instances(t, paths, {}, Scheme::individual_paths, {}, 1, 0).size(), 2u);
  EXPECT_EQ(make_instances(t, paths, {}, Scheme::combined_paths, {}, 1, 0).size(), 1u);
  EXPECT_EQ(make_instances(t, {}, {}, Scheme::combined_paths, {}, 1, 0).size(), 0u);
  EXPECT_EQ(make_instances(t, {}, {}, Scheme::triple_only, {}, 1, 0).size(), 1u);
}

TEST(LinearizerTest, CombinedNeverExceedsIndividual) {
  Rng gen(3);
  const auto triples = testing::random_triples(gen, 20, 70, 3);
  const KnowledgeGraph g = KnowledgeGraph::from_triples(triples);
  SamplingConfig cfg;
  const auto ex = build_training_set(g, cfg);
  const auto ind = emit_instances(g, ex, Scheme::individual_paths, {});
  const auto comb = emit_instances(g, ex, Scheme::combined_paths, {});
  EXPECT_EQ(comb.size(), ex.size());
  EXPECT_LE(comb.size(), ind.size());
}

TEST(LinearizerTest, JsonRoundTrip) {
  const NamedTriple t{"FDR", "work_at", "DC"};
  const std::vector<NamedPath> paths{fixture_path()};
  const std::vector<NamedTriple> edges{{"FDR", "president_of", "USA"}};
  for (Scheme s : {Scheme::individual_paths, Scheme::combined_paths, Scheme::edge_list,
                   Scheme::triple_only}) {
    for (const Instance& inst : make_instances(t, paths, edges, s, fixture_text(), 1, 4)) {
      const Instance back = instance_from_json(instance_to_json(inst));
      EXPECT_EQ(back.question, inst.question);
      EXPECT_EQ(back.context, inst.context);
      EXPECT_EQ(back.label, inst.label);
      EXPECT_EQ(back.meta.triple, inst.meta.triple);
      EXPECT_EQ(back.meta.paths, inst.meta.paths);
      EXPECT_EQ(back.meta.edges, inst.meta.edges);
      EXPECT_EQ(back.meta.example_id, 4u);
      EXPECT_EQ(back.meta.path_id, inst.meta.path_id);
    }
  }
}

TEST(LinearizerTest, JsonFieldOrder) {
  const auto inst = make_instances({"FDR", "work_at", "DC"}, {fixture_path()}, {},
                                   Scheme::individual_paths, {}, 1, 0)[0];
  const std::string line = instance_to_json(inst);
  EXPECT_LT(line.find("\"question\""), line.find("\"context\""));
  EXPECT_LT(line.find("\"context\""), line.find("\"label\""));
  EXPECT_LT(line.find("\"label\""), line.find("\"triple\""));
  EXPECT_LT(line.find("\"triple\""), line.find("\"path\""));
  EXPECT_EQ(line.find('\n'), std::string::npos);
}

TEST(LinearizerTest, UnlabeledInstanceOmitsLabel) {
  const auto inst = make_instances({"a", "r", "b"}, {}, {}, Scheme::triple_only, {},
                                   std::nullopt, 0)[0];
  EXPECT_EQ(instance_to_json(inst).find("label"), std::string::npos);
}

TEST(LinearizerTest, MalformedJsonIsAProtocolError) {
  EXPECT_THROW(instance_from_json("{"), ProtocolError);
  EXPECT_THROW(instance_from_json(R"({"question":"q"})"), ProtocolError);
  EXPECT_THROW(
      instance_from_json(
          R"({"question":"q","context":"c","triple":["a","r","b"],"path":[["a","r","b","up"]],"example_id":0})"),
      ProtocolError);
}

TEST(LinearizerTest, StreamRoundTrip) {
  const KnowledgeGraph g = testing::g0();
  SamplingConfig cfg;
  const auto ex = build_training_set(g, cfg);
  const auto inst = emit_instances(g, ex, Scheme::individual_paths, {});
  std::stringstream buf;
  write_instances(buf, inst);
  const auto back = read_instances(buf);
  ASSERT_EQ(back.size(), inst.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(instance_to_json(back[i]), instance_to_json(inst[i]));
  }
}

}  // namespace
}  // namespace kgpathrl
