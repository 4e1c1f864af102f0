#include "kgpathrl/scorers.hpp"

#include <algorithm>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/rng.hpp"

namespace kgpathrl {
namespace {

std::string rule_key(std::string_view head, const std::vector<RuleAtom>& body) {
  std::string key(head);
  for (const RuleAtom& a : body) {
    key += '\x1f';
    key += a.relation;
    key += a.forward ? '>' : '<';
  }
  return key;
}

std::string rule_key(std::string_view head, const NamedPath& path) {
  std::string key(head);
  for (const NamedStep& s : path) {
    key += '\x1f';
    key += s.triple.relation;
    key += s.forward ? '>' : '<';
  }
  return key;
}

}  // namespace

ConstantScorer::ConstantScorer(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidQueryError("constant score must lie in [0, 1]");
  }
}

std::vector<double> ConstantScorer::score_batch(std::span<const Instance> instances) const {
  return std::vector<double>(instances.size(), value_);
}

std::vector<double> RandomScorer::score_batch(std::span<const Instance> instances) const {
  std::vector<double> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) {
    std::uint64_t h = fnv1a(inst.question);
    h = fnv1a("\n", h);
    h = fnv1a(inst.context, h);
    const std::uint64_t x = mix64(h ^ mix64(seed_));
    out.push_back(static_cast<double>(x >> 11) * 0x1.0p-53);
  }
  return out;
}

RuleScorer::RuleScorer(std::vector<PathRule> rules) : rules_(std::move(rules)) {
  for (const PathRule& r : rules_) {
    confidence_.emplace(rule_key(r.head, r.body), r.confidence());
  }
}

double RuleScorer::score_path(std::string_view head_relation, const NamedPath& path) const {
  auto it = confidence_.find(rule_key(head_relation, path));
  const double c = it == confidence_.end() ? kRuleScoreFloor : it->second;
  return std::clamp(c, kRuleScoreFloor, 1.0 - kRuleScoreFloor);
}

double RuleScorer::score(const Instance& inst) const {
  const bool has_path = std::any_of(inst.meta.paths.begin(), inst.meta.paths.end(),
                                    [](const NamedPath& p) { return !p.empty(); });
  if (!has_path) throw ContractViolation("rule scorer needs path metadata on the instance");
  double best = 0.0;
  for (const NamedPath& p : inst.meta.paths) {
    if (!p.empty()) best = std::max(best, score_path(inst.meta.triple.relation, p));
  }
  return best;
}

std::vector<double> RuleScorer::score_batch(std::span<const Instance> instances) const {
  std::vector<double> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back(score(inst));
  return out;
}

}  // namespace kgpathrl
