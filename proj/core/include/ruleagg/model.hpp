#pragma once

// Shared vocabulary of the pipeline: schema, items, transactions, rules,
// black-box predictions and mining configuration.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace ruleagg {

using ItemId = std::uint32_t;

// Sorted ascending and duplicate free. Item ids are assigned in the item total
// order, so a sorted ItemSet is also in canonical display order.
using ItemSet = std::vector<ItemId>;

ItemSet make_item_set(std::vector<ItemId> items);
bool is_subset(const ItemSet& sub, const ItemSet& super);
bool is_proper_subset(const ItemSet& sub, const ItemSet& super);

enum class RuleMode { kCharacteristic, kDiscriminative };

std::string_view to_string(RuleMode mode);
RuleMode parse_rule_mode(std::string_view text);

enum class ExplanationKind { kRule, kScore };

struct ClassLabel {
  std::string name;
  int index = 0;  // 0 or 1

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

struct CategoricalSpec {
  std::vector<std::string> values;
};

// `edges` holds the interior cut points once fitted. An empty vector means a
// single bin (constant feature on the training split).
struct ContinuousSpec {
  std::optional<std::vector<double>> edges;
};

struct FeatureSpec {
  std::string name;
  std::variant<CategoricalSpec, ContinuousSpec> kind;

  bool is_categorical() const { return std::holds_alternative<CategoricalSpec>(kind); }
  bool is_fitted() const;
  // Number of distinct items this feature contributes (values or bins).
  std::size_t cardinality() const;
  const std::vector<std::string>& categories() const;
  const std::vector<double>& edges() const;
};

struct Item {
  enum class Kind : std::uint8_t { kClass, kCondition };

  Kind kind = Kind::kCondition;
  std::uint32_t feature = 0;  // unused for class items
  std::uint32_t value = 0;    // category index, bin index, or class index

  friend bool operator==(const Item&, const Item&) = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;

  // `positive` defaults to the second class label.
  FeatureSchema(std::vector<FeatureSpec> features, std::vector<std::string> classes,
                std::optional<std::string> positive = std::nullopt);

  const std::vector<FeatureSpec>& features() const { return features_; }
  std::size_t feature_count() const { return features_.size(); }
  const FeatureSpec& feature(std::size_t index) const { return features_.at(index); }
  std::optional<std::size_t> feature_index(std::string_view name) const;

  const ClassLabel& class_label(int index) const { return classes_.at(static_cast<std::size_t>(index)); }
  const std::vector<ClassLabel>& class_labels() const { return classes_; }
  int positive_index() const { return positive_; }
  int negative_index() const { return 1 - positive_; }
  std::optional<int> label_index(std::string_view name) const;
  int require_label(std::string_view name) const;

  // All continuous features have bin edges; the item vocabulary exists.
  bool is_fitted() const { return fitted_; }

  // Copy of this schema with the given continuous edges installed.
  FeatureSchema with_edges(const std::vector<std::optional<std::vector<double>>>& edges) const;

  // --- item vocabulary (requires a fitted schema) ---
  std::size_t item_count() const;
  const Item& item(ItemId id) const;
  const std::string& render(ItemId id) const;
  std::optional<ItemId> find_item(std::string_view rendered) const;
  ItemId parse_item(std::string_view rendered) const;  // throws kSchemaMismatch
  ItemId class_item(int label_index) const;
  ItemId condition_item(std::size_t feature, std::size_t value) const;
  bool is_class_item(ItemId id) const;
  int label_of(ItemId class_item_id) const;
  std::vector<std::string> render_all(const ItemSet& items) const;

  // Human-readable form of a continuous bin.
  static std::string render_bin(const FeatureSpec& spec, std::size_t bin);

 private:
  void build_vocabulary();
  void require_fitted() const;

  std::vector<FeatureSpec> features_;
  std::vector<ClassLabel> classes_;
  int positive_ = 1;
  bool fitted_ = false;

  std::vector<Item> items_;
  std::vector<std::string> rendered_;
  std::unordered_map<std::string, ItemId> by_name_;
  // condition_ids_[feature][value] -> ItemId
  std::vector<std::vector<ItemId>> condition_ids_;
  ItemId class_ids_[2] = {0, 0};
};

// A raw feature value: a category index for categorical features or a finite
// real for continuous ones.
using RawValue = std::variant<std::size_t, double>;

struct Instance {
  std::string id;
  std::vector<RawValue> values;
  std::optional<int> label;  // ground truth, only needed to train the reference black box
};

enum class Split { kTrain, kDev, kTest };

std::string_view to_string(Split split);

struct Dataset {
  Split split = Split::kTrain;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

void validate_instance(const FeatureSchema& schema, const Instance& instance);

struct Prediction {
  int label = 0;
  std::optional<double> score;  // probability of the positive label

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Black-box output per instance id.
struct BlackBoxPredictions {
  std::map<std::string, Prediction> by_id;

  const Prediction* find(std::string_view id) const;
  const Prediction& require(const std::string& id) const;  // throws kIntegrity
  std::size_t size() const { return by_id.size(); }
};

// One local explanation as a transaction: exactly one class item plus a
// non-empty set of condition items.
struct ExplanationItemset {
  std::string instance_id;
  ItemId class_item = 0;
  ItemSet conditions;

  ItemSet transaction() const;

  friend bool operator==(const ExplanationItemset&, const ExplanationItemset&) = default;
};

struct AssociationRule {
  ItemSet antecedent;
  ItemSet consequent;
  std::size_t support_count = 0;       // transactions containing antecedent and consequent
  std::size_t antecedent_support = 0;  // transactions containing the antecedent
  double confidence = 0.0;
  RuleMode mode = RuleMode::kCharacteristic;

  // Builds a rule whose confidence is the exact count ratio.
  static AssociationRule from_counts(RuleMode mode, ItemSet antecedent, ItemSet consequent,
                                     std::size_t support, std::size_t antecedent_support);

  ItemId class_item() const;
  const ItemSet& conditions() const;

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

// Checks the orientation invariants of `mode` against the schema.
void validate_rule(const AssociationRule& rule, const FeatureSchema& schema);

// Negative, zero or positive as conf(a) <, ==, > conf(b). Exact
// cross-multiplication on counts when both rules carry them.
int compare_confidence(const AssociationRule& a, const AssociationRule& b);

// Orders by confidence desc (exact, on counts when available), support desc,
// then the canonical item order of antecedent and consequent.
bool rule_display_less(const AssociationRule& a, const AssociationRule& b);

struct MiningConfig {
  std::optional<std::size_t> min_support;        // absolute transaction count
  std::optional<double> min_support_fraction;    // overrides min_support when set
  std::optional<double> min_confidence;
  RuleMode mode = RuleMode::kCharacteristic;
  std::optional<std::size_t> max_itemset_size = 5;
  double score_threshold = 0.01;
  std::optional<std::size_t> top_k;              // optional per-explanation cap on score items

  static constexpr std::size_t kDefaultScoreSupport = 10;
  static constexpr std::size_t kDefaultRuleSupport = 4;
  static constexpr double kDefaultCharacteristicConfidence = 0.9;
  static constexpr double kDefaultDiscriminativeConfidence = 1.0;

  std::size_t resolved_min_support(ExplanationKind kind, std::size_t n_transactions) const;
  double resolved_min_confidence() const;
  void validate() const;

  friend bool operator==(const MiningConfig&, const MiningConfig&) = default;
};

}  // namespace ruleagg
