#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "ruleagg/error.hpp"
#include "ruleagg/io.hpp"
#include "ruleagg/pipeline.hpp"
#include "ruleagg/rule_filter.hpp"

using namespace ruleagg;
using namespace fixtures;

namespace {

FeatureSchema mixed_schema() {
  return FeatureSchema({categorical("purpose", {"new car", "used car, cheap"}), continuous("age", std::vector<double>{20, 30, 40, 50})},
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

TEST_SUITE("io") {
  TEST_CASE("schema JSON round trip") {
    const auto s = mixed_schema();
    const auto text = schema_to_json(s);
    const auto back = parse_schema(text);
    CHECK(schema_to_json(back) == text);
    CHECK(back.item_count() == s.item_count());
    const auto j = nlohmann::json::parse(text);
    CHECK(j["positive"] == "good");
    CHECK(j["features"][1]["edges"].size() == 4);
  }

  TEST_CASE("unfitted continuous schema parses without edges") {
    const auto s = parse_schema(R"({"features":[{"name":"x","kind":"continuous"}],"classes":["n","p"]})");
    CHECK_FALSE(s.is_fitted());
    CHECK(kind_of([] { parse_schema(R"({"features":[{"name":"x","kind":"ordinal"}],"classes":["n","p"]})"); }) ==
          ErrorKind::kSchemaMismatch);
    CHECK(kind_of([] { parse_schema("{not json"); }) == ErrorKind::kParse);
  }

  TEST_CASE("CSV with quoting, any column order and a label column") {
    const auto s = mixed_schema();
    const std::string csv =
        "age,instance_id,purpose,label\r\n"
        "33.5,i1,\"used car, cheap\",good\r\n"
        "19,i2,new car,bad\n";
    const auto d = parse_dataset_csv(csv, s, Split::kTest, "label");
    REQUIRE(d.size() == 2);
    CHECK(d.instances[0].id == "i1");
    CHECK(std::get<std::size_t>(d.instances[0].values[0]) == 1);
    CHECK(std::get<double>(d.instances[0].values[1]) == 33.5);
    CHECK(d.instances[1].label == 0);
    CHECK(parse_dataset_csv(dataset_to_csv(d, s, "label"), s, Split::kTest, "label").instances[0].values ==
          d.instances[0].values);
  }

  TEST_CASE("CSV errors name the problem") {
    const auto s = mixed_schema();
    try {
      parse_dataset_csv("instance_id,purpose\ni1,new car\n", s, Split::kTrain);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kSchemaMismatch);
      CHECK(std::string(e.what()).find("'age'") != std::string::npos);
    }
    try {
      parse_dataset_csv("instance_id,purpose,age\ni1,boat,3\n", s, Split::kTrain);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnknownCategory);
      CHECK(std::string(e.what()).find("boat") != std::string::npos);
    }
    CHECK(kind_of([&] { parse_dataset_csv("instance_id,purpose,age\ni1,new car,abc\n", s, Split::kTrain); }) ==
          ErrorKind::kSchemaMismatch);
    CHECK(kind_of([&] { parse_dataset_csv("instance_id,purpose,age\ni1,new car\n", s, Split::kTrain); }) ==
          ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("predictions JSONL round trip") {
    const auto s = mixed_schema();
    const auto p = parse_predictions("{\"instance_id\":\"a\",\"label\":\"good\",\"score\":0.75}\n"
                                     "{\"instance_id\":\"b\",\"label\":\"bad\"}\n",
                                     s);
    CHECK(p.require("a") == Prediction{1, 0.75});
    CHECK(p.require("b") == Prediction{0, std::nullopt});
    CHECK(parse_predictions(predictions_to_jsonl(p, s), s).by_id == p.by_id);
    CHECK(kind_of([&] { parse_predictions("{\"instance_id\":\"a\",\"label\":\"meh\"}\n", s); }) ==
          ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("explanations JSONL round trip") {
    const auto s = mixed_schema();
    const std::string text =
        "{\"instance_id\":\"a\",\"kind\":\"score\",\"label\":\"good\",\"scores\":{\"purpose=new car\":0.25,\"age∈[20,30)\":-0.5}}\n"
        "{\"instance_id\":\"b\",\"kind\":\"rule\",\"label\":\"bad\",\"conditions\":[\"age∈[50,+inf)\"]}\n";
    const auto ex = parse_explanations(text, s);
    REQUIRE(ex.size() == 2);
    CHECK(ex[0].kind() == ExplanationKind::kScore);
    CHECK(ex[1].kind() == ExplanationKind::kRule);
    CHECK(std::get<RuleForm>(ex[1].form).conditions == items(s, {"age∈[50,+inf)"}));
    CHECK(explanations_to_jsonl(parse_explanations(explanations_to_jsonl(ex, s), s), s) ==
          explanations_to_jsonl(ex, s));
    CHECK(kind_of([&] {
            parse_explanations("{\"instance_id\":\"a\",\"kind\":\"rule\",\"label\":\"bad\",\"conditions\":[\"x=1\"]}\n", s);
          }) == ErrorKind::kSchemaMismatch);
  }

  TEST_CASE("transactions JSONL round trip") {
    const auto s = mixed_schema();
    const std::vector<ExplanationItemset> ts{{"a", s.class_item(1), items(s, {"purpose=new car", "age∈(-inf,20)"})}};
    const auto text = transactions_to_jsonl(ts, s);
    CHECK(parse_transactions(text, s) == ts);
  }

  TEST_CASE("rule dump keeps pruned entries apart") {
    const auto s = mixed_schema();
    const ItemId good = s.class_item(1);
    const auto keep = AssociationRule::from_counts(RuleMode::kCharacteristic, {good}, items(s, {"purpose=new car"}), 9, 10);
    const auto drop = AssociationRule::from_counts(RuleMode::kCharacteristic, {good},
                                                   items(s, {"purpose=new car", "age∈[20,30)"}), 8, 10);
    const std::vector<AssociationRule> rules{keep, drop};
    const auto rs = prune_subsumed(rules, RuleMode::kCharacteristic);
    const auto dump = parse_rules(ruleset_to_json(rs, s), s);
    CHECK(dump.rules == rs.rules);
    REQUIRE(dump.pruned.size() == 1);
    CHECK(dump.pruned[0].rule == drop);
    CHECK(dump.pruned[0].pruned_by == keep);
    CHECK(parse_rules(rules_to_json(rules, s), s).rules == rules);
  }

  TEST_CASE("report JSON fields") {
    FidelityReport r;
    r.accuracy = 0.75;
    r.auc = 0.5;
    r.f1 = 2.0 / 3.0;
    r.coverage = 1.0;
    r.n_rules = 3;
    r.confusion = {1, 0, 1, 2};
    r.warnings.push_back("w");
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["accuracy"] == 0.75);
    CHECK(j["n_rules"] == 3);
    CHECK(j["confusion"]["tn"] == 2);
    CHECK(j["warnings"][0] == "w");
  }

  TEST_CASE("pipeline config round trip and relative paths") {
    PipelineConfig c;
    c.schema = "/data/schema.json";
    c.train = "/data/train.csv";
    c.mining.mode = RuleMode::kDiscriminative;
    c.mining.min_support = 7;
    c.confidence_grid = {0.8, 0.9};
    c.seed = 42;
    c.use_reference_models = true;
    c.reference.max_depth = 4;
    CHECK(parse_config(config_to_json(c)) == c);
    const auto rel = parse_config(R"({"schema":"s.json","output_dir":"out"})", "/base");
    CHECK(rel.schema == std::filesystem::path("/base/s.json"));
    CHECK(rel.output_dir == std::filesystem::path("/base/out"));
    CHECK(kind_of([] { parse_config(R"({"mining":{"mode":"both"}})"); }) == ErrorKind::kInvalidArgument);
  }
}
