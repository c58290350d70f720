#include "ruleagg/itemsets.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ruleagg/error.hpp"

namespace ruleagg {

namespace {

void check_label(const LocalExplanation& e, const BlackBoxPredictions& predictions, const FeatureSchema& schema) {
  const auto& p = predictions.require(e.instance_id);
  if (p.label != e.predicted_label) {
    throw Error(ErrorKind::kIntegrity, "explanation for '" + e.instance_id + "' carries label '" +
                                           schema.class_label(e.predicted_label).name +
                                           "' but the black box predicted '" + schema.class_label(p.label).name + "'");
  }
}

void sort_output(std::vector<ExplanationItemset>& out) {
  std::stable_sort(out.begin(), out.end(), [](const ExplanationItemset& a, const ExplanationItemset& b) {
    return std::tie(a.instance_id, a.class_item) < std::tie(b.instance_id, b.class_item);
  });
}

}  // namespace

std::vector<ExplanationItemset> itemsets_from_rule_form(std::span<const LocalExplanation> explanations,
                                                        const BlackBoxPredictions& predictions,
                                                        const FeatureSchema& schema, ItemizeStats* stats) {
  std::vector<ExplanationItemset> out;
  out.reserve(explanations.size());
  for (const auto& e : explanations) {
    const auto* rule = std::get_if<RuleForm>(&e.form);
    if (rule == nullptr) throw Error(ErrorKind::kInvalidBatch, "score explanation in a rule-form batch");
    check_label(e, predictions, schema);
    if (rule->conditions.empty()) {
      if (stats != nullptr) ++stats->dropped_empty;
      continue;
    }
    for (ItemId id : rule->conditions) {
      if (schema.is_class_item(id)) {
        throw Error(ErrorKind::kSchemaMismatch, "class item among the conditions of '" + e.instance_id + "'");
      }
    }
    out.push_back({e.instance_id, schema.class_item(e.predicted_label), make_item_set(rule->conditions)});
  }
  sort_output(out);
  return out;
}

std::vector<ExplanationItemset> itemsets_from_score_form(std::span<const LocalExplanation> explanations,
                                                         const BlackBoxPredictions& predictions,
                                                         const FeatureSchema& schema, double threshold,
                                                         const EncodedIndex* instances,
                                                         std::optional<std::size_t> top_k, ItemizeStats* stats) {
  if (schema.class_labels().size() != 2) {
    throw Error(ErrorKind::kUnsupportedTask, "score explanations require a binary task");
  }
  if (!(threshold >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "score threshold must be >= 0");

  const int pos = schema.positive_index();
  const int neg = schema.negative_index();
  std::vector<ExplanationItemset> out;
  for (const auto& e : explanations) {
    const auto* score = std::get_if<ScoreForm>(&e.form);
    if (score == nullptr) throw Error(ErrorKind::kInvalidBatch, "rule explanation in a score-form batch");
    check_label(e, predictions, schema);

    std::vector<std::pair<ItemId, double>> kept;
    for (const auto& [id, s] : score->scores) {
      if (!std::isfinite(s)) throw Error(ErrorKind::kSchemaMismatch, "non-finite score in '" + e.instance_id + "'");
      if (schema.is_class_item(id)) {
        throw Error(ErrorKind::kSchemaMismatch, "class item scored in '" + e.instance_id + "'");
      }
      if (std::abs(s) > threshold) {
        kept.emplace_back(id, s);
      } else if (stats != nullptr) {
        ++stats->filtered_items;
      }
    }
    if (top_k && kept.size() > *top_k) {
      std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.second) != std::abs(b.second)) return std::abs(a.second) > std::abs(b.second);
        return a.first < b.first;
      });
      kept.resize(*top_k);
    }

    const EncodedInstance* encoded = nullptr;
    if (instances != nullptr) {
      auto it = instances->find(e.instance_id);
      if (it != instances->end()) encoded = &it->second;
    }

    std::vector<ItemId> per_class[2];
    for (const auto& [id, s] : kept) {
      int target = s > 0 ? pos : neg;
      // A one-hot item whose bit is 0 was credited for its absence, so its
      // presence argues for the other class.
      const Item& item = schema.item(id);
      if (encoded != nullptr && schema.feature(item.feature).is_categorical() &&
          !std::binary_search(encoded->active_items.begin(), encoded->active_items.end(), id)) {
        target = 1 - target;
        if (stats != nullptr) ++stats->opposite_class_items;
      }
      per_class[target].push_back(id);
    }
    bool emitted = false;
    for (int c : {neg, pos}) {
      if (per_class[c].empty()) continue;
      out.push_back({e.instance_id, schema.class_item(c), make_item_set(std::move(per_class[c]))});
      emitted = true;
    }
    if (!emitted && stats != nullptr) ++stats->dropped_empty;
  }
  sort_output(out);
  return out;
}

ItemizeResult generate_explanation_itemsets(const Dataset& data, std::span<const LocalExplanation> explanations,
                                            const BlackBoxPredictions& predictions, const FeatureSchema& schema,
                                            const MiningConfig& config) {
  ItemizeResult result;
  if (explanations.empty()) return result;

  const ExplanationKind kind = explanations.front().kind();
  for (const auto& e : explanations) {
    if (e.kind() != kind) throw Error(ErrorKind::kInvalidBatch, "explanation batch mixes rule and score forms");
  }
  result.kind = kind;
  if (kind == ExplanationKind::kRule) {
    result.itemsets = itemsets_from_rule_form(explanations, predictions, schema, &result.stats);
  } else {
    EncodedIndex index;
    for (const auto& inst : data.instances) index.emplace(inst.id, encode(inst, schema));
    result.itemsets = itemsets_from_score_form(explanations, predictions, schema, config.score_threshold,
                                               data.empty() ? nullptr : &index, config.top_k, &result.stats);
  }
  return result;
}

}  // namespace ruleagg
