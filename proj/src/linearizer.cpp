#include "kgpathrl/linearizer.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "kgpathrl/errors.hpp"

namespace kgpathrl {

using ojson = nlohmann::ordered_json;

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::individual_paths: return "individual";
    case Scheme::combined_paths: return "combined";
    case Scheme::edge_list: return "edge_list";
    case Scheme::triple_only: return "triple_only";
  }
  return "individual";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "individual" || name == "individual_paths") return Scheme::individual_paths;
  if (name == "combined" || name == "combined_paths") return Scheme::combined_paths;
  if (name == "edge_list" || name == "edge-list" || name == "subgraph") {
    return Scheme::edge_list;
  }
  if (name == "triple_only" || name == "triple-only") return Scheme::triple_only;
  throw InvalidQueryError("unknown linearization scheme '" + std::string(name) + "'");
}

std::string render_question(const NamedTriple& t, const TextMap& tm) {
  return "Question: " + tm.entity_text(t.head) + " " + tm.relation_text(t.relation) +
         " what ? Is the correct answer " + tm.entity_text(t.tail) + " ?";
}

std::string render_clause(const NamedTriple& t, const TextMap& tm) {
  return tm.entity_text(t.head) + " " + tm.relation_text(t.relation) + " " +
         tm.entity_text(t.tail) + ";";
}

namespace {

std::string render_path(const NamedPath& path, const TextMap& tm) {
  std::string out;
  for (const NamedStep& s : path) {
    if (!out.empty()) out += ' ';
    out += render_clause(s.triple, tm);
  }
  return out;
}

}  // namespace

std::string render_context(Scheme scheme, const StructuralInput& input,
                           const TextMap& tm) {
  if (scheme == Scheme::triple_only) return "";
  std::string body;
  if (scheme == Scheme::edge_list) {
    if (input.edges.empty()) {
      throw ContractViolation("edge-list context needs at least one edge");
    }
    for (const NamedTriple& t : input.edges) {
      if (!body.empty()) body += ' ';
      body += render_clause(t, tm);
    }
  } else {
    const bool any = std::any_of(input.paths.begin(), input.paths.end(),
                                 [](const NamedPath& p) { return !p.empty(); });
    if (!any) throw ContractViolation("path context needs a non-empty path");
    if (scheme == Scheme::individual_paths && input.paths.size() != 1) {
      throw ContractViolation("individual-path context takes exactly one path");
    }
    for (const NamedPath& p : input.paths) {
      if (!body.empty()) body += " | ";
      body += render_path(p, tm);
    }
  }
  return "Context: " + body;
}

std::vector<Instance> make_instances(const NamedTriple& triple,
                                     const std::vector<NamedPath>& paths,
                                     const std::vector<NamedTriple>& edges,
                                     Scheme scheme, const TextMap& tm,
                                     std::optional<int> label,
                                     std::size_t example_id) {
  std::vector<Instance> out;
  const std::string question = render_question(triple, tm);
  switch (scheme) {
    case Scheme::individual_paths:
      for (std::size_t i = 0; i < paths.size(); ++i) {
        Instance inst{question, render_context(scheme, {{paths[i]}, {}}, tm), label,
                      {triple, {paths[i]}, {}, example_id, i}};
        out.push_back(std::move(inst));
      }
      break;
    case Scheme::combined_paths:
      if (!paths.empty()) {
        out.push_back({question, render_context(scheme, {paths, {}}, tm), label,
                       {triple, paths, {}, example_id, std::nullopt}});
      }
      break;
    case Scheme::edge_list:
      if (!edges.empty()) {
        out.push_back({question, render_context(scheme, {{}, edges}, tm), label,
                       {triple, {}, edges, example_id, std::nullopt}});
      }
      break;
    case Scheme::triple_only:
      out.push_back({question, "", label, {triple, {}, {}, example_id, std::nullopt}});
      break;
  }
  return out;
}

namespace {

std::vector<NamedTriple> example_edges(const KnowledgeGraph& g,
                                       const LabeledExample& ex) {
  std::vector<Triple> ids = ex.subgraph;
  if (ids.empty()) {
    std::vector<std::pair<std::size_t, Triple>> order;
    std::unordered_set<Triple, TripleHash> seen;
    for (const ReasoningPath& p : ex.paths) {
      for (const PathStep& s : p.steps) {
        if (seen.insert(s.triple).second) order.emplace_back(p.length(), s.triple);
      }
    }
    std::sort(order.begin(), order.end());
    for (auto& [len, t] : order) ids.push_back(t);
  }
  std::vector<NamedTriple> out;
  out.reserve(ids.size());
  for (const Triple& t : ids) out.push_back(g.named(t));
  return out;
}

}  // namespace

std::vector<Instance> emit_instances(const KnowledgeGraph& g,
                                     std::span<const LabeledExample> examples,
                                     Scheme scheme, const TextMap& tm) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const LabeledExample& ex = examples[i];
    std::vector<NamedTriple> edges;
    if (scheme == Scheme::edge_list) edges = example_edges(g, ex);
    auto batch = make_instances(g.named(ex.triple), to_named(g, ex.paths), edges,
                                scheme, tm, ex.label, i);
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  return out;
}

namespace {

ojson triple_json(const NamedTriple& t) { return ojson::array({t.head, t.relation, t.tail}); }

ojson path_json(const NamedPath& p) {
  ojson arr = ojson::array();
  for (const NamedStep& s : p) {
    arr.push_back({s.triple.head, s.triple.relation, s.triple.tail,
                   direction_name(s.forward)});
  }
  return arr;
}

NamedTriple triple_from(const ojson& j) {
  if (!j.is_array() || j.size() != 3) throw ProtocolError("triple must be [h, r, t]");
  return {j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::string>()};
}

NamedPath path_from(const ojson& j) {
  NamedPath p;
  for (const ojson& s : j) {
    if (!s.is_array() || s.size() != 4) {
      throw ProtocolError("path step must be [h, r, t, dir]");
    }
    const std::string dir = s[3].get<std::string>();
    if (dir != "fwd" && dir != "bwd") throw ProtocolError("bad step direction " + dir);
    p.push_back({{s[0].get<std::string>(), s[1].get<std::string>(),
                  s[2].get<std::string>()},
                 dir == "fwd"});
  }
  return p;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  ojson j;
  j["question"] = inst.question;
  j["context"] = inst.context;
  if (inst.label) j["label"] = *inst.label;
  j["triple"] = triple_json(inst.meta.triple);
  if (inst.meta.path_id) {
    j["path"] = path_json(inst.meta.paths.at(0));
  } else if (!inst.meta.paths.empty()) {
    ojson all = ojson::array();
    for (const NamedPath& p : inst.meta.paths) all.push_back(path_json(p));
    j["paths"] = std::move(all);
  }
  if (!inst.meta.edges.empty()) {
    ojson edges = ojson::array();
    for (const NamedTriple& t : inst.meta.edges) edges.push_back(triple_json(t));
    j["edges"] = std::move(edges);
  }
  j["example_id"] = inst.meta.example_id;
  if (inst.meta.path_id) j["path_id"] = *inst.meta.path_id;
  return j.dump();
}

Instance instance_from_json(std::string_view line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("invalid instance JSON: ") + e.what());
  }
  try {
    Instance inst;
    inst.question = j.at("question").get<std::string>();
    inst.context = j.at("context").get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) inst.label = j["label"].get<int>();
    if (j.contains("triple")) inst.meta.triple = triple_from(j["triple"]);
    if (j.contains("path")) inst.meta.paths.push_back(path_from(j["path"]));
    if (j.contains("paths")) {
      for (const ojson& p : j["paths"]) inst.meta.paths.push_back(path_from(p));
    }
    if (j.contains("edges")) {
      for (const ojson& t : j["edges"]) inst.meta.edges.push_back(triple_from(t));
    }
    if (j.contains("example_id")) {
      inst.meta.example_id = j["example_id"].get<std::size_t>();
    }
    if (j.contains("path_id")) {
      inst.meta.path_id = j["path_id"].get<std::size_t>();
    } else if (j.contains("path")) {
      inst.meta.path_id = 0;
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed instance: ") + e.what());
  }
}

void write_instances(std::ostream& out, std::span<const Instance> instances) {
  for (const Instance& inst : instances) out << instance_to_json(inst) << '\n';
}

std::vector<Instance> read_instances(std::istream& in) {
  std::vector<Instance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(instance_from_json(line));
  }
  return out;
}

}  // namespace kgpathrl
