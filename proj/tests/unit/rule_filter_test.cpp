#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "ruleagg/rule_filter.hpp"

using namespace ruleagg;
using namespace fixtures;

namespace {

AssociationRule chr(ItemId cls, ItemSet conds, std::size_t sup, std::size_t ante) {
  return AssociationRule::from_counts(RuleMode::kCharacteristic, {cls}, std::move(conds), sup, ante);
}

AssociationRule dis(ItemId cls, ItemSet conds, std::size_t sup, std::size_t ante) {
  return AssociationRule::from_counts(RuleMode::kDiscriminative, std::move(conds), {cls}, sup, ante);
}

// O(n^2) scan for a same-class pair whose smaller condition set has at least
// the confidence of the larger one.
bool has_subsumed_pair(const std::vector<AssociationRule>& rules) {
  for (const auto& r : rules) {
    for (const auto& q : rules) {
      if (r.class_item() == q.class_item() && is_proper_subset(r.conditions(), q.conditions()) &&
          compare_confidence(r, q) >= 0) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST_SUITE("rule_filter") {
  const auto s = abc_schema();
  const ItemId P = pos(s), N = neg(s);
  const ItemId a = s.parse_item("a=1"), b = s.parse_item("b=1"), c = s.parse_item("c=1");

  TEST_CASE("orientation filter keeps one rule shape") {
    const std::vector<AssociationRule> mixed{chr(P, {a}, 9, 10), dis(P, {a}, 9, 9), chr(N, {b}, 5, 6)};
    const auto kept = filter_orientation(mixed, RuleMode::kCharacteristic, s);
    REQUIRE(kept.size() == 2);
    for (const auto& r : kept) CHECK(r.mode == RuleMode::kCharacteristic);
    const std::vector<AssociationRule> all_chr{chr(P, {a}, 9, 10), chr(N, {b}, 5, 6)};
    CHECK(filter_orientation(all_chr, RuleMode::kDiscriminative, s).empty());
  }

  TEST_CASE("superset with lower confidence is removed") {
    const std::vector<AssociationRule> rules{chr(P, {a}, 99, 100), chr(P, make_item_set({a, b}), 95, 100)};
    const auto out = prune_subsumed(rules, RuleMode::kCharacteristic);
    REQUIRE(out.rules.size() == 1);
    CHECK(out.rules[0].conditions() == ItemSet{a});
    REQUIRE(out.pruned.size() == 1);
    CHECK(out.pruned[0].rule.conditions() == make_item_set({a, b}));
    CHECK(out.pruned[0].pruned_by == rules[0]);
  }

  TEST_CASE("superset with higher confidence is kept") {
    const std::vector<AssociationRule> rules{chr(P, {a}, 90, 100), chr(P, make_item_set({a, b}), 95, 100)};
    CHECK(prune_subsumed(rules, RuleMode::kCharacteristic).rules.size() == 2);
  }

  TEST_CASE("pruning applies within a class only") {
    const std::vector<AssociationRule> rules{chr(P, {a}, 99, 100), chr(N, make_item_set({a, b}), 95, 100)};
    CHECK(prune_subsumed(rules, RuleMode::kCharacteristic).rules.size() == 2);
  }

  TEST_CASE("equal confidence removes the superset") {
    const std::vector<AssociationRule> rules{dis(P, make_item_set({a, c}), 4, 4), dis(P, {a}, 8, 8)};
    const auto out = prune_subsumed(rules, RuleMode::kDiscriminative);
    REQUIRE(out.rules.size() == 1);
    CHECK(out.rules[0].conditions() == ItemSet{a});
  }

  TEST_CASE("pruning is idempotent and leaves no subsumed pair") {
    std::mt19937_64 rng(5);
    std::vector<ItemId> conds_pool;
    for (ItemId id = 2; id < s.item_count(); ++id) conds_pool.push_back(id);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<AssociationRule> rules;
      for (int k = 0; k < 25; ++k) {
        std::vector<ItemId> cs;
        for (ItemId id : conds_pool) {
          if (rng() % 4 == 0) cs.push_back(id);
        }
        if (cs.empty()) cs.push_back(conds_pool[rng() % conds_pool.size()]);
        const std::size_t ante = 5 + rng() % 20;
        rules.push_back(chr(rng() % 2 ? P : N, make_item_set(cs), 1 + rng() % ante, ante));
      }
      const auto once = prune_subsumed(rules, RuleMode::kCharacteristic);
      CHECK_FALSE(has_subsumed_pair(once.rules));
      CHECK(once.rules.size() + once.pruned.size() <= rules.size());
      const auto twice = prune_subsumed(once.rules, RuleMode::kCharacteristic);
      CHECK(twice.rules == once.rules);
      CHECK(twice.pruned.empty());
      for (std::size_t i = 1; i < once.rules.size(); ++i) {
        CHECK_FALSE(rule_display_less(once.rules[i], once.rules[i - 1]));
      }
    }
  }

  TEST_CASE("filter_rules composes orientation and pruning") {
    const std::vector<AssociationRule> rules{chr(P, {a}, 99, 100), chr(P, make_item_set({a, b}), 95, 100),
                                             dis(P, {a}, 9, 9)};
    const auto out = filter_rules(rules, RuleMode::kCharacteristic, s);
    CHECK(out.mode == RuleMode::kCharacteristic);
    REQUIRE(out.rules.size() == 1);
    CHECK(out.rules[0] == rules[0]);
  }
}
