#pragma once

// Two-rule naive Bayes fixture: 20 dev instances, 10 pos with a=1 and 10 neg
// with a=0, all with c=1. Rule 0 (pos → a=1) separates the classes; rule 1
// (pos → c=1) matches everyone and carries no information.

#include <string>

#include "ruleagg/evaluator.hpp"
#include "ruleagg/rule_filter.hpp"

namespace nb_fixture {

using namespace ruleagg;

struct Fixture {
  FeatureSchema schema;
  RuleSet ruleset;
  std::vector<EncodedInstance> dev;
  BlackBoxPredictions predictions;
};

inline Fixture make() {
  Fixture f;
  f.schema = FeatureSchema({{"a", CategoricalSpec{{"0", "1"}}}, {"c", CategoricalSpec{{"0", "1"}}}}, {"neg", "pos"}, "pos");
  const auto& s = f.schema;
  const ItemId pos = s.class_item(1);
  const ItemId a1 = s.parse_item("a=1"), a0 = s.parse_item("a=0"), c1 = s.parse_item("c=1");
  f.ruleset.mode = RuleMode::kCharacteristic;
  f.ruleset.rules = {AssociationRule::from_counts(RuleMode::kCharacteristic, {pos}, {a1}, 10, 10),
                     AssociationRule::from_counts(RuleMode::kCharacteristic, {pos}, {c1}, 10, 10)};
  for (int i = 0; i < 20; ++i) {
    const bool is_pos = i < 10;
    const std::string id = "d" + std::to_string(i);
    f.dev.push_back({id, make_item_set({is_pos ? a1 : a0, c1})});
    f.predictions.by_id[id] = {is_pos ? 1 : 0, std::nullopt};
  }
  return f;
}

}  // namespace nb_fixture
