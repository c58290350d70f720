#pragma once

// File formats: schema JSON, instance CSV, predictions / explanations /
// transactions JSON Lines, rule dumps and fidelity reports.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ruleagg/evaluator.hpp"
#include "ruleagg/itemsets.hpp"
#include "ruleagg/model.hpp"
#include "ruleagg/rule_filter.hpp"

namespace ruleagg {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// {"features":[{"name":..,"kind":"categorical","values":[..]} |
//              {"name":..,"kind":"continuous","edges":[..]}],
//  "classes":["neg","pos"],"positive":"pos"}
FeatureSchema parse_schema(std::string_view json);
std::string schema_to_json(const FeatureSchema& schema);

// Header row with an `instance_id` column plus one column per schema feature.
// `label_column`, when given and present, fills Instance::label.
Dataset parse_dataset_csv(std::string_view csv, const FeatureSchema& schema, Split split,
                          std::optional<std::string> label_column = std::nullopt);
std::string dataset_to_csv(const Dataset& data, const FeatureSchema& schema,
                           std::optional<std::string> label_column = std::nullopt);

// {"instance_id":..,"label":"pos","score":0.87}
BlackBoxPredictions parse_predictions(std::string_view jsonl, const FeatureSchema& schema);
std::string predictions_to_jsonl(const BlackBoxPredictions& predictions, const FeatureSchema& schema);

// {"instance_id":..,"kind":"rule","label":..,"conditions":["f=v",..]} or
// {"instance_id":..,"kind":"score","label":..,"scores":{"f=v":0.31,..}}
std::vector<LocalExplanation> parse_explanations(std::string_view jsonl, const FeatureSchema& schema);
std::string explanations_to_jsonl(std::span<const LocalExplanation> explanations, const FeatureSchema& schema);

// {"instance_id":..,"class":"pos","items":["f=v",..]}
std::vector<ExplanationItemset> parse_transactions(std::string_view jsonl, const FeatureSchema& schema);
std::string transactions_to_jsonl(std::span<const ExplanationItemset> transactions, const FeatureSchema& schema);

// JSON array of {"mode":..,"antecedent":[..],"consequent":[..],"support":n,
// "antecedent_support":n,"confidence":x}; pruned entries add "pruned_by".
std::string rules_to_json(std::span<const AssociationRule> rules, const FeatureSchema& schema);
std::string ruleset_to_json(const RuleSet& ruleset, const FeatureSchema& schema);

struct RuleDump {
  std::vector<AssociationRule> rules;  // entries without "pruned_by"
  std::vector<PrunedRule> pruned;
};
RuleDump parse_rules(std::string_view json, const FeatureSchema& schema);

std::string report_to_json(const FidelityReport& report);

}  // namespace ruleagg
