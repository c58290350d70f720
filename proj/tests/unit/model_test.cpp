#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "ruleagg/error.hpp"
#include "ruleagg/render.hpp"

using namespace ruleagg;
using namespace fixtures;

namespace {

FeatureSchema credit_schema() {
  return FeatureSchema({categorical("credit_history", {"critical/other existing credit", "no credits/all paid"}),
                        categorical("purpose", {"new car", "used car"})},
                       {"bad", "good"}, "good");
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an ruleagg::Error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("item sets are sorted and duplicate free") {
    CHECK(make_item_set({5, 1, 3, 1}) == ItemSet{1, 3, 5});
    CHECK(is_subset({}, {1, 2}));
    CHECK(is_subset({1, 2}, {1, 2}));
    CHECK_FALSE(is_proper_subset({1, 2}, {1, 2}));
    CHECK(is_proper_subset({2}, {1, 2}));
    CHECK_FALSE(is_subset({3}, {1, 2}));
  }

  TEST_CASE("vocabulary puts class items first, then features by name and value") {
    const auto s = credit_schema();
    REQUIRE(s.item_count() == 6);
    CHECK(s.render(0) == "bad");
    CHECK(s.render(1) == "good");
    CHECK(s.render(2) == "credit_history=critical/other existing credit");
    CHECK(s.render(5) == "purpose=used car");
    CHECK(s.is_class_item(1));
    CHECK_FALSE(s.is_class_item(2));
    CHECK(s.label_of(s.class_item(1)) == 1);
    CHECK(s.positive_index() == 1);
    CHECK(s.parse_item("purpose=new car") == 4);
    CHECK(kind_of([&] { s.parse_item("purpose=boat"); }) == ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("positive label defaults to the second class") {
    FeatureSchema s({categorical("a", {"x"})}, {"no", "yes"});
    CHECK(s.class_label(s.positive_index()).name == "yes");
    FeatureSchema t({categorical("a", {"x"})}, {"no", "yes"}, "no");
    CHECK(t.positive_index() == 0);
  }

  TEST_CASE("schema construction errors") {
    CHECK(kind_of([] { FeatureSchema({categorical("a", {"x"})}, {"a", "b", "c"}); }) ==
          ErrorKind::kUnsupportedTask);
    CHECK(kind_of([] { FeatureSchema({categorical("a", {"x"}), categorical("a", {"y"})}, {"n", "p"}); }) ==
          ErrorKind::kSchemaMismatch);
    CHECK(kind_of([] { FeatureSchema({categorical("a", {"x", "x"})}, {"n", "p"}); }) == ErrorKind::kSchemaMismatch);
    CHECK(kind_of([] { FeatureSchema({categorical("a", {})}, {"n", "p"}); }) == ErrorKind::kSchemaMismatch);
    CHECK(kind_of([] { FeatureSchema({categorical("instance_id", {"x"})}, {"n", "p"}); }) ==
          ErrorKind::kSchemaMismatch);
    CHECK(kind_of([] { FeatureSchema({categorical("a", {"x"})}, {"n", "n"}); }) == ErrorKind::kSchemaMismatch);
    CHECK(kind_of([] { FeatureSchema({categorical("a", {"x"})}, {"n", "p"}, "q"); }) == ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("unfitted schema has no vocabulary") {
    FeatureSchema s({continuous("x")}, {"n", "p"});
    CHECK_FALSE(s.is_fitted());
    CHECK(kind_of([&] { s.item_count(); }) == ErrorKind::kSchemaMismatch);
    const auto fitted = s.with_edges({std::vector<double>{2, 4, 6, 8}});
    CHECK(fitted.is_fitted());
    CHECK(fitted.item_count() == 7);
    CHECK(fitted.render(fitted.condition_item(0, 0)) == "x∈(-inf,2)");
    CHECK(fitted.render(fitted.condition_item(0, 1)) == "x∈[2,4)");
    CHECK(fitted.render(fitted.condition_item(0, 4)) == "x∈[8,+inf)");
  }

  TEST_CASE("instance validation") {
    const auto s = abc_schema();
    CHECK_NOTHROW(validate_instance(s, instance("i", {std::size_t{0}, std::size_t{2}, std::size_t{1}})));
    CHECK(kind_of([&] { validate_instance(s, instance("i", {std::size_t{0}, std::size_t{3}, std::size_t{1}})); }) ==
          ErrorKind::kUnknownCategory);
    CHECK(kind_of([&] { validate_instance(s, instance("i", {std::size_t{0}})); }) == ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("missing prediction is an integrity error") {
    BlackBoxPredictions p;
    p.by_id["a"] = {1, 0.7};
    CHECK(p.require("a").label == 1);
    CHECK(p.find("b") == nullptr);
    CHECK(kind_of([&] { p.require("b"); }) == ErrorKind::kIntegrity);
  }

  TEST_CASE("canonical render of a characteristic rule") {
    const auto s = credit_schema();
    const auto r = AssociationRule::from_counts(RuleMode::kCharacteristic, {s.class_item(1)},
                                                items(s, {"credit_history=critical/other existing credit"}), 12, 12);
    CHECK(r.confidence == 1.0);
    const auto text = canonical_render(r, s);
    CHECK(text == "good → credit_history=critical/other existing credit (conf=1.000, sup=12, ante=12)");
    CHECK(text.rfind("good → credit_history=critical/other existing credit (conf=1.000, ", 0) == 0);
    CHECK(canonical_render(r, s) == text);
  }

  TEST_CASE("discriminative render joins conditions in item order") {
    const auto s = credit_schema();
    const auto r = AssociationRule::from_counts(
        RuleMode::kDiscriminative, items(s, {"purpose=used car", "credit_history=no credits/all paid"}),
        {s.class_item(0)}, 3, 4);
    CHECK(canonical_render(r, s) ==
          "credit_history=no credits/all paid ∧ purpose=used car → bad (conf=0.750, sup=3, ante=4)");
  }

  TEST_CASE("rule with empty consequent is rejected") {
    const auto s = credit_schema();
    const auto r = AssociationRule::from_counts(RuleMode::kCharacteristic, {s.class_item(1)}, {}, 5, 5);
    CHECK(kind_of([&] { canonical_render(r, s); }) == ErrorKind::kSchemaMismatch);
    CHECK(kind_of([&] { validate_rule(r, s); }) == ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("rule with the wrong orientation is rejected") {
    const auto s = credit_schema();
    const auto r = AssociationRule::from_counts(RuleMode::kDiscriminative, {s.class_item(1)},
                                                items(s, {"purpose=new car"}), 5, 5);
    CHECK(kind_of([&] { validate_rule(r, s); }) == ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("render and parse round trip on random rules") {
    const auto s = abc_schema();
    std::mt19937_64 rng(7);
    const std::size_t n_items = s.item_count();
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<ItemId> conds;
      for (ItemId id = 2; id < n_items; ++id) {
        if (rng() % 3 == 0) conds.push_back(id);
      }
      if (conds.empty()) conds.push_back(2 + static_cast<ItemId>(rng() % (n_items - 2)));
      const auto mode = rng() % 2 ? RuleMode::kCharacteristic : RuleMode::kDiscriminative;
      const ItemSet cls{s.class_item(static_cast<int>(rng() % 2))};
      const std::size_t ante = 1 + rng() % 50;
      const std::size_t sup = 1 + rng() % ante;
      const auto r = mode == RuleMode::kCharacteristic
                         ? AssociationRule::from_counts(mode, cls, make_item_set(conds), sup, ante)
                         : AssociationRule::from_counts(mode, make_item_set(conds), cls, sup, ante);
      const auto text = canonical_render(r, s);
      CHECK(parse_rule(text, s) == r);
      CHECK(canonical_render(parse_rule(text, s), s) == text);
    }
  }

  TEST_CASE("confidence comparison is exact on counts") {
    const auto a = AssociationRule::from_counts(RuleMode::kDiscriminative, {2}, {1}, 1, 3);
    const auto b = AssociationRule::from_counts(RuleMode::kDiscriminative, {3}, {1}, 2, 6);
    const auto c = AssociationRule::from_counts(RuleMode::kDiscriminative, {4}, {1}, 3, 10);
    CHECK(compare_confidence(a, b) == 0);
    CHECK(compare_confidence(a, c) > 0);
    CHECK(compare_confidence(c, a) < 0);
    CHECK(rule_display_less(b, a));  // equal confidence, larger support first
  }

  TEST_CASE("mining config defaults and validation") {
    MiningConfig m;
    CHECK(m.resolved_min_support(ExplanationKind::kScore, 100) == 10);
    CHECK(m.resolved_min_support(ExplanationKind::kRule, 100) == 4);
    CHECK(m.resolved_min_confidence() == 0.9);
    m.mode = RuleMode::kDiscriminative;
    CHECK(m.resolved_min_confidence() == 1.0);
    m.min_support_fraction = 0.05;
    CHECK(m.resolved_min_support(ExplanationKind::kScore, 101) == 6);
    m.min_confidence = 1.5;
    CHECK(kind_of([&] { m.validate(); }) == ErrorKind::kInvalidArgument);
    CHECK(parse_rule_mode("discriminative") == RuleMode::kDiscriminative);
    CHECK(kind_of([] { parse_rule_mode("both"); }) == ErrorKind::kInvalidArgument);
  }
}
