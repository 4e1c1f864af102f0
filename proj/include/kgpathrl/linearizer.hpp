#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgpathrl/kg_store.hpp"
#include "kgpathrl/path_engine.hpp"
#include "kgpathrl/sampler.hpp"

namespace kgpathrl {

enum class Scheme { individual_paths, combined_paths, edge_list, triple_only };

// "individual", "combined", "edge_list", "triple_only".
std::string_view scheme_name(Scheme s);
// Also accepts the long forms ("individual_paths", "combined_paths").
Scheme parse_scheme(std::string_view name);

// Where an instance came from. Exactly one of paths/edges is populated,
// depending on the scheme (neither for triple_only).
struct InstanceMeta {
  NamedTriple triple;
  std::vector<NamedPath> paths;
  std::vector<NamedTriple> edges;
  std::size_t example_id = 0;
  std::optional<std::size_t> path_id;  // individual_paths only
};

struct Instance {
  std::string question;
  std::string context;
  std::optional<int> label;
  InstanceMeta meta;
};

// Structural input for render_context: paths for the path schemes, edges for
// edge_list.
struct StructuralInput {
  std::vector<NamedPath> paths;
  std::vector<NamedTriple> edges;
};

// "Question: {head} {relation} what ? Is the correct answer {tail} ?"
std::string render_question(const NamedTriple& t, const TextMap& tm);

// "{head} {relation} {tail};" with display text.
std::string render_clause(const NamedTriple& t, const TextMap& tm);

// "Context: " + clauses. Throws ContractViolation on empty input for any
// scheme other than triple_only, which always renders "".
std::string render_context(Scheme scheme, const StructuralInput& input,
                           const TextMap& tm);

// individual_paths: one instance per (example, path); every other scheme: one
// per example. Edge-list context uses the example's stored subgraph, or the
// union of its paths' triples when none was stored.
std::vector<Instance> emit_instances(const KnowledgeGraph& g,
                                     std::span<const LabeledExample> examples,
                                     Scheme scheme, const TextMap& tm);

// Builds the instances for one candidate triple at inference time.
std::vector<Instance> make_instances(const NamedTriple& triple,
                                     const std::vector<NamedPath>& paths,
                                     const std::vector<NamedTriple>& edges,
                                     Scheme scheme, const TextMap& tm,
                                     std::optional<int> label,
                                     std::size_t example_id);

// Instance JSONL: question, context, label?, triple, then path (individual),
// paths (combined) or edges (edge_list), example_id, path_id?.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view line);
void write_instances(std::ostream& out, std::span<const Instance> instances);
std::vector<Instance> read_instances(std::istream& in);

}  // namespace kgpathrl
