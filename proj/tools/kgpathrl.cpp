// kgpathrl: command-line front end for dataset preparation, instance
// emission, rule mining, evaluation and explanation.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgpathrl/dataset_prep.hpp"
#include "kgpathrl/errors.hpp"
#include "kgpathrl/eval_harness.hpp"
#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/linearizer.hpp"
#include "kgpathrl/sampler.hpp"
#include "kgpathrl/scorers.hpp"

namespace fs = std::filesystem;
using namespace kgpathrl;

namespace {

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string entity_text;
  std::string relation_text;
};

struct PrepareArgs {
  std::string train, test, out = ".";
  std::optional<std::size_t> target_links, relations;
};

struct EmitArgs {
  std::string graph, out, scheme = "individual";
  int k = 3;
  int neighborhood_k = 3;
  std::size_t paths = 3;
  std::size_t negatives = 10;
  bool no_fallback = false;
};

struct MineArgs {
  std::string graph, out;
  int k = 3;
  std::size_t min_support = 2;
};

struct EvalArgs {
  std::string graph, test, train, rules, out, scorer = "rules", scheme = "individual";
  int k = 3;
  std::size_t negatives = 50;
  std::size_t max_paths = 0;
  std::size_t min_support = 2;
  std::size_t batch_size = 32;
  bool inductive = false;
  std::vector<std::string> queries;
  std::string results;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  return out;
}

// Writes through `fn` to the file, or to stdout when path is empty.
template <typename Fn>
void write_to(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  auto out = open_out(path);
  fn(out);
}

TextMap text_map(const Common& c) { return TextMap::load(c.entity_text, c.relation_text); }

std::vector<PathRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read rules file " + path);
  return read_rules(in);
}

// "h<TAB>r<TAB>t", or three whitespace-separated fields.
NamedTriple parse_query(const std::string& text) {
  if (text.find('\t') != std::string::npos) {
    std::istringstream in(text);
    auto parsed = parse_triples(in);
    if (parsed.size() == 1) return parsed.front();
  } else {
    std::istringstream in(text);
    NamedTriple t;
    std::string extra;
    if (in >> t.head >> t.relation >> t.tail && !(in >> extra)) return t;
  }
  throw InvalidQueryError("query must name exactly head, relation and tail: " + text);
}

std::unique_ptr<Scorer> make_scorer(const EvalArgs& a, const Common& c) {
  if (a.scorer == "constant") return std::make_unique<ConstantScorer>();
  if (a.scorer == "random") return std::make_unique<RandomScorer>(c.seed);
  if (a.scorer.rfind("remote:", 0) == 0) {
    RemoteScorerOptions opts;
    opts.batch_size = a.batch_size;
    return std::make_unique<RemoteScorer>(a.scorer.substr(7), opts);
  }
  if (a.scorer != "rules") throw InvalidQueryError("unknown scorer " + a.scorer);
  if (!a.rules.empty()) return std::make_unique<RuleScorer>(load_rules(a.rules));
  const std::string source = a.train.empty() ? a.graph : a.train;
  return std::make_unique<RuleScorer>(
      mine_rules(load_graph_file(source), a.k, a.min_support, c.threads));
}

EvalConfig eval_config(const EvalArgs& a, const Common& c) {
  EvalConfig cfg;
  cfg.scheme = parse_scheme(a.scheme);
  cfg.negatives_per_query = a.negatives;
  cfg.max_len = a.k;
  cfg.inference_max_paths = a.max_paths;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  return cfg;
}

void run_prepare(const PrepareArgs& a, const Common& c) {
  const KnowledgeGraph train = load_graph_file(a.train);
  if (a.target_links || a.relations) fs::create_directories(a.out);
  if (a.target_links) {
    const fs::path path = fs::path(a.out) / ("train-" + std::to_string(*a.target_links) + ".tsv");
    const KnowledgeGraph small = stratified_downsample(train, *a.target_links, c.seed);
    write_graph_file(path, small);
    std::cout << "wrote " << path.string() << " triples=" << small.num_triples()
              << " entities=" << small.num_entities()
              << " relations=" << small.num_relations() << '\n';
  }
  if (a.relations) {
    const fs::path path = fs::path(a.out) / ("train-rel" + std::to_string(*a.relations) + ".tsv");
    const KnowledgeGraph subset = sample_relation_subset(train, *a.relations, c.seed);
    write_graph_file(path, subset);
    std::cout << "wrote " << path.string() << " triples=" << subset.num_triples()
              << " entities=" << subset.num_entities()
              << " relations=" << subset.num_relations() << '\n';
  }
  if (!a.test.empty()) {
    const SplitReport report = verify_split(train, load_graph_file(a.test));
    const std::string text = format_report(report);
    std::cout << text;
    if (a.target_links || a.relations) {
      auto out = open_out(fs::path(a.out) / "split_report.txt");
      out << text;
    }
  } else if (!a.target_links && !a.relations) {
    std::cout << "triples=" << train.num_triples() << " entities=" << train.num_entities()
              << " relations=" << train.num_relations() << '\n';
  }
}

void run_emit(const EmitArgs& a, const Common& c) {
  const KnowledgeGraph g = load_graph_file(a.graph);
  SamplingConfig cfg;
  cfg.negatives = a.negatives;
  cfg.paths = a.paths;
  cfg.max_len = a.k;
  cfg.neighborhood_k = a.neighborhood_k;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  cfg.vocabulary_fallback = !a.no_fallback;
  const Scheme scheme = parse_scheme(a.scheme);
  cfg.with_subgraph = scheme == Scheme::edge_list;
  const auto examples = build_training_set(g, cfg);
  const auto instances = emit_instances(g, examples, scheme, text_map(c));
  write_to(a.out, [&](std::ostream& out) { write_instances(out, instances); });
  std::cerr << "examples=" << examples.size() << " instances=" << instances.size() << '\n';
}

void run_mine(const MineArgs& a, const Common& c) {
  const auto rules = mine_rules(load_graph_file(a.graph), a.k, a.min_support, c.threads);
  write_to(a.out, [&](std::ostream& out) { write_rules(out, rules); });
  std::cerr << "rules=" << rules.size() << '\n';
}

void check_inductive(const EvalArgs& a, const KnowledgeGraph& context) {
  if (!a.inductive) return;
  if (a.train.empty()) throw DatasetError("--inductive needs --train");
  const SplitReport r = verify_split(load_graph_file(a.train), context);
  if (r.shared_entities != 0) {
    throw DatasetError("inductive run refused: train and test graphs share " +
                       std::to_string(r.shared_entities) + " entities");
  }
}

void run_evaluate(const EvalArgs& a, const Common& c) {
  const KnowledgeGraph g = load_graph_file(a.graph);
  check_inductive(a, g);
  const auto tests = read_triples_file(a.test);
  const auto scorer = make_scorer(a, c);
  const Evaluation ev = evaluate(g, tests, *scorer, eval_config(a, c), text_map(c));
  std::cout << format_metrics(ev.metrics) << '\n';
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    write_results(out, ev.results);
  }
  char line[160];
  std::snprintf(line, sizeof line, "timing: paths=%.3fs scoring=%.3fs aggregation=%.3fs\n",
                ev.timings.paths_seconds, ev.timings.scoring_seconds,
                ev.timings.aggregation_seconds);
  std::cerr << line;
}

void run_explain(const EvalArgs& a, const Common& c) {
  const TextMap tm = text_map(c);
  std::vector<NamedTriple> wanted;
  for (const std::string& q : a.queries) wanted.push_back(parse_query(q));

  if (!a.results.empty()) {
    std::ifstream in(a.results);
    if (!in) throw DatasetError("cannot read results file " + a.results);
    for (const RankingResult& r : read_results(in)) {
      if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), r.query) == wanted.end()) {
        continue;
      }
      std::cout << explain(r, tm) << '\n';
    }
    return;
  }

  if (a.graph.empty()) throw InvalidQueryError("explain needs --results or --graph");
  if (!a.test.empty()) {
    const auto more = read_triples_file(a.test);
    wanted.insert(wanted.end(), more.begin(), more.end());
  }
  if (wanted.empty()) throw InvalidQueryError("explain needs --query or --test");
  const KnowledgeGraph g = load_graph_file(a.graph);
  const auto scorer = make_scorer(a, c);
  EvalConfig cfg = eval_config(a, c);
  cfg.negatives_per_query = 0;
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    Rng rng = Rng::stream(c.seed, i);
    std::cout << explain(rank_candidates(g, wanted[i], *scorer, cfg, tm, rng), tm) << '\n';
  }
}

void add_common(CLI::App* sub, Common& c, std::string& config) {
  sub->add_option("--config", config, "key=value file supplying any flag");
  sub->add_option("--seed", c.seed, "Random seed")->envname("KGPATHRL_SEED");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--entity-text", c.entity_text, "id<TAB>text entity names");
  sub->add_option("--relation-text", c.relation_text, "id<TAB>text relation names");
}

void add_eval_options(CLI::App* sub, EvalArgs& e) {
  sub->add_option("--scorer", e.scorer, "rules | constant | random | remote:<url>");
  sub->add_option("--rules", e.rules, "Rules JSONL from mine-rules");
  sub->add_option("--train", e.train, "Training graph (rule mining, inductive check)");
  sub->add_option("--scheme", e.scheme, "individual | combined | edge_list | triple_only");
  sub->add_option("--k", e.k, "Max path length")->check(CLI::PositiveNumber);
  sub->add_option("--negatives-per-query", e.negatives, "Negative candidates per query");
  sub->add_option("--max-paths", e.max_paths, "Paths kept per candidate (0 = all)");
  sub->add_option("--min-support", e.min_support, "Rule support threshold when mining");
  sub->add_option("--batch-size", e.batch_size, "Remote scorer batch size")
      ->check(CLI::PositiveNumber);
}

// Expands `--config FILE` into `--key=value` arguments placed right after the
// subcommand, so anything given on the command line wins (last value taken).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> injected;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      continue;
    }
    std::ifstream in(file);
    if (!in) throw DatasetError("cannot read config file " + file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "expected key=value", file);
      auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        const auto e = v.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      if (key.empty() || key == "config") throw ParseError(lineno, "bad key", file);
      injected.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
  }
  if (!injected.empty() && args.size() > 1) {
    args.insert(args.begin() + 2, injected.begin(), injected.end());
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-based knowledge graph link prediction toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  std::string config;
  PrepareArgs prep;
  EmitArgs emit;
  MineArgs mine;
  EvalArgs eval;
  EvalArgs expl;

  auto* p = app.add_subcommand("prepare", "Build dataset variants and split reports");
  add_common(p, common, config);
  p->add_option("--train", prep.train, "Training triples")->required();
  p->add_option("--test", prep.test, "Test triples for the split report");
  p->add_option("--out", prep.out, "Output directory");
  p->add_option("--target-links", prep.target_links, "Stratified downsample size");
  p->add_option("--relations", prep.relations, "Weighted relation subset size");

  auto* e = app.add_subcommand("emit", "Write training instances as JSONL");
  add_common(e, common, config);
  e->add_option("--graph", emit.graph, "Graph triples")->required();
  e->add_option("--scheme", emit.scheme, "individual | combined | edge_list | triple_only");
  e->add_option("--k", emit.k, "Max path length")->check(CLI::PositiveNumber);
  e->add_option("--paths-per-triple", emit.paths, "Paths per example")
      ->check(CLI::PositiveNumber);
  e->add_option("--negatives", emit.negatives, "Negatives per positive")
      ->check(CLI::PositiveNumber);
  e->add_option("--neighborhood-k", emit.neighborhood_k, "Hop bound of the corruption pool")
      ->check(CLI::PositiveNumber);
  e->add_flag("--no-fallback", emit.no_fallback,
              "Draw negatives only from the common neighborhood");
  e->add_option("--out", emit.out, "Output JSONL (stdout when omitted)");

  auto* m = app.add_subcommand("mine-rules", "Mine path rules");
  add_common(m, common, config);
  m->add_option("--graph", mine.graph, "Graph triples")->required();
  m->add_option("--k", mine.k, "Max rule body length")->check(CLI::PositiveNumber);
  m->add_option("--min-support", mine.min_support, "Minimum support");
  m->add_option("--out", mine.out, "Output JSONL (stdout when omitted)");

  auto* v = app.add_subcommand("evaluate", "Rank test triples against sampled negatives");
  add_common(v, common, config);
  add_eval_options(v, eval);
  v->add_option("--graph", eval.graph, "Context graph")->required();
  v->add_option("--test", eval.test, "Test triples")->required();
  v->add_option("--out", eval.out, "Results JSONL");
  v->add_flag("--inductive", eval.inductive, "Refuse to run unless train/test entities are disjoint");

  auto* x = app.add_subcommand("explain", "Print the best reasoning path per query");
  add_common(x, common, config);
  add_eval_options(x, expl);
  x->add_option("--graph", expl.graph, "Context graph");
  x->add_option("--test", expl.test, "Queries as triples");
  x->add_option("--query", expl.queries, "\"head relation tail\" (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  x->add_option("--results", expl.results, "Results JSONL from evaluate");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (*p) run_prepare(prep, common);
    if (*e) run_emit(emit, common);
    if (*m) run_mine(mine, common);
    if (*v) run_evaluate(eval, common);
    if (*x) run_explain(expl, common);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
