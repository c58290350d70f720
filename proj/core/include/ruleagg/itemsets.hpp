#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "ruleagg/model.hpp"
#include "ruleagg/preprocess.hpp"

namespace ruleagg {

struct RuleForm {
  ItemSet conditions;
};

// Signed scores; a positive score supports the schema's positive label.
struct ScoreForm {
  std::vector<std::pair<ItemId, double>> scores;
};

struct LocalExplanation {
  std::string instance_id;
  std::variant<RuleForm, ScoreForm> form;
  int predicted_label = 0;

  ExplanationKind kind() const {
    return std::holds_alternative<RuleForm>(form) ? ExplanationKind::kRule : ExplanationKind::kScore;
  }
};

struct ItemizeStats {
  std::size_t dropped_empty = 0;      // explanations that produced no transaction
  std::size_t filtered_items = 0;     // score items at or below the threshold
  std::size_t opposite_class_items = 0;
};

// Active items by instance id; used to detect one-hot items whose bit is 0.
using EncodedIndex = std::unordered_map<std::string, EncodedInstance>;

std::vector<ExplanationItemset> itemsets_from_rule_form(std::span<const LocalExplanation> explanations,
                                                        const BlackBoxPredictions& predictions,
                                                        const FeatureSchema& schema,
                                                        ItemizeStats* stats = nullptr);

std::vector<ExplanationItemset> itemsets_from_score_form(std::span<const LocalExplanation> explanations,
                                                         const BlackBoxPredictions& predictions,
                                                         const FeatureSchema& schema, double threshold,
                                                         const EncodedIndex* instances = nullptr,
                                                         std::optional<std::size_t> top_k = std::nullopt,
                                                         ItemizeStats* stats = nullptr);

struct ItemizeResult {
  std::vector<ExplanationItemset> itemsets;
  std::optional<ExplanationKind> kind;  // empty for an empty batch
  ItemizeStats stats;
};

// Dispatches on the explanation kind. `data` (may be empty) supplies the
// instances behind score explanations for the opposite-class rule. Output is
// sorted by instance id, then class item.
ItemizeResult generate_explanation_itemsets(const Dataset& data, std::span<const LocalExplanation> explanations,
                                            const BlackBoxPredictions& predictions, const FeatureSchema& schema,
                                            const MiningConfig& config);

}  // namespace ruleagg
