#pragma once

#include <span>
#include <vector>

#include "ruleagg/model.hpp"

namespace ruleagg {

struct PrunedRule {
  AssociationRule rule;
  AssociationRule pruned_by;
};

struct RuleSet {
  RuleMode mode = RuleMode::kCharacteristic;
  std::vector<AssociationRule> rules;
  MiningConfig provenance;
  std::vector<PrunedRule> pruned;  // audit trail

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
};

// Keeps the rules whose shape matches `mode`: a lone class item in the
// antecedent (characteristic) or in the consequent (discriminative).
std::vector<AssociationRule> filter_orientation(std::span<const AssociationRule> rules, RuleMode mode,
                                                const FeatureSchema& schema);

// Drops a rule when a retained rule for the same class has a proper subset of
// its conditions and at least its confidence. Rules are visited by increasing
// condition count, so the result is a fixpoint. Output sorted by
// rule_display_less.
RuleSet prune_subsumed(std::span<const AssociationRule> rules, RuleMode mode);

// Filter-then-prune, the final step of rule extraction.
RuleSet filter_rules(std::span<const AssociationRule> rules, RuleMode mode, const FeatureSchema& schema);

}  // namespace ruleagg
