#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ruleagg/model.hpp"

namespace ruleagg {

struct FrequentItemset {
  ItemSet items;
  std::size_t support_count = 0;

  friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
};

// Level-wise Apriori (join + subset prune) with exact support counts over the
// transaction multiset. Result is ordered by size, then lexicographically.
std::vector<FrequentItemset> frequent_itemsets(std::span<const ItemSet> transactions, std::size_t min_support,
                                               std::optional<std::size_t> max_size = std::nullopt);

std::vector<FrequentItemset> frequent_itemsets(std::span<const ExplanationItemset> transactions,
                                               std::size_t min_support,
                                               std::optional<std::size_t> max_size = std::nullopt);

// One rule of the requested orientation for every frequent itemset holding
// exactly one class item and at least one condition:
//   characteristic: class → conditions, conf = sup(itemset) / sup(class)
//   discriminative: conditions → class, conf = sup(itemset) / sup(conditions)
// Rules with confidence below `min_confidence` are dropped. Sorted by
// rule_display_less.
std::vector<AssociationRule> derive_rules(std::span<const FrequentItemset> frequents, double min_confidence,
                                          RuleMode mode, const std::function<bool(ItemId)>& is_class_item);

std::vector<AssociationRule> derive_rules(std::span<const FrequentItemset> frequents, double min_confidence,
                                          RuleMode mode, const FeatureSchema& schema);

}  // namespace ruleagg
