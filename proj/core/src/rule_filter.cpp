#include "ruleagg/rule_filter.hpp"

#include <algorithm>
#include <numeric>

#include "ruleagg/error.hpp"

namespace ruleagg {

namespace {

bool has_shape(const AssociationRule& r, RuleMode mode, const FeatureSchema& schema) {
  const auto& cls = mode == RuleMode::kCharacteristic ? r.antecedent : r.consequent;
  const auto& cond = mode == RuleMode::kCharacteristic ? r.consequent : r.antecedent;
  if (cls.size() != 1 || !schema.is_class_item(cls.front()) || cond.empty()) return false;
  return std::none_of(cond.begin(), cond.end(), [&](ItemId id) { return schema.is_class_item(id); });
}

}  // namespace

std::vector<AssociationRule> filter_orientation(std::span<const AssociationRule> rules, RuleMode mode,
                                                const FeatureSchema& schema) {
  std::vector<AssociationRule> out;
  for (const auto& r : rules) {
    if (has_shape(r, mode, schema)) {
      AssociationRule copy = r;
      copy.mode = mode;
      out.push_back(std::move(copy));
    }
  }
  return out;
}

RuleSet prune_subsumed(std::span<const AssociationRule> rules, RuleMode mode) {
  for (const auto& r : rules) {
    if (r.mode != mode) throw Error(ErrorKind::kInvalidBatch, "prune_subsumed requires rules of a single mode");
  }
  std::vector<std::size_t> order(rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = rules[a];
    const auto& rb = rules[b];
    if (ra.conditions().size() != rb.conditions().size()) return ra.conditions().size() < rb.conditions().size();
    return rule_display_less(ra, rb);
  });

  RuleSet out;
  out.mode = mode;
  for (std::size_t idx : order) {
    const auto& candidate = rules[idx];
    const AssociationRule* dominator = nullptr;
    for (const auto& kept : out.rules) {
      if (kept.class_item() == candidate.class_item() && is_proper_subset(kept.conditions(), candidate.conditions()) &&
          compare_confidence(kept, candidate) >= 0) {
        dominator = &kept;
        break;
      }
    }
    if (dominator != nullptr) {
      out.pruned.push_back({candidate, *dominator});
    } else {
      out.rules.push_back(candidate);
    }
  }
  std::sort(out.rules.begin(), out.rules.end(), rule_display_less);
  std::sort(out.pruned.begin(), out.pruned.end(),
            [](const PrunedRule& a, const PrunedRule& b) { return rule_display_less(a.rule, b.rule); });
  return out;
}

RuleSet filter_rules(std::span<const AssociationRule> rules, RuleMode mode, const FeatureSchema& schema) {
  const auto oriented = filter_orientation(rules, mode, schema);
  return prune_subsumed(oriented, mode);
}

}  // namespace ruleagg
