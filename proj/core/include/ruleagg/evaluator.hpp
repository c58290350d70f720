#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruleagg/miner.hpp"
#include "ruleagg/model.hpp"
#include "ruleagg/preprocess.hpp"
#include "ruleagg/rule_filter.hpp"

namespace ruleagg {

// Naive Bayes over binary rule-match indicators, fit on the black box's labels.
// Every probability carries add-one (Laplace) smoothing with denominator +2.
struct RuleClassifier {
  RuleSet ruleset;
  std::vector<ItemSet> condition_sides;  // what an instance must contain to match rule r
  std::array<double, 2> priors{};
  std::vector<std::array<double, 2>> match_likelihood;  // P(match_r | class)
  int fallback_label = 0;  // majority black-box label on the fitting split
  int positive_label = 1;

  std::size_t rule_count() const { return condition_sides.size(); }
};

RuleClassifier fit(const RuleSet& ruleset, std::span<const EncodedInstance> dev,
                   const BlackBoxPredictions& dev_predictions, const FeatureSchema& schema);

RuleClassifier fit(const RuleSet& ruleset, const Dataset& dev, const BlackBoxPredictions& dev_predictions,
                   const FeatureSchema& schema);

struct RulePrediction {
  int label = 0;
  double score = 0.5;  // posterior of the positive label
  bool covered = false;
};

// Posterior computed in log space; an exact tie resolves to fallback_label.
RulePrediction predict(const RuleClassifier& clf, const EncodedInstance& instance);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct FidelityReport {
  double accuracy = 0.0;
  double auc = 0.5;
  double f1 = 0.0;
  double coverage = 0.0;
  std::size_t n_rules = 0;
  Confusion confusion;
  std::vector<std::string> warnings;
};

// Mann-Whitney statistic with ties counted one half. nullopt when one class
// is absent.
std::optional<double> auc_rank(std::span<const double> scores, std::span<const int> is_positive);

// 2tp / (2tp + fp + fn); 0 when there are no positives on either side.
double f1_score(const Confusion& c);

FidelityReport fidelity(const RuleClassifier& clf, std::span<const EncodedInstance> test,
                        const BlackBoxPredictions& test_predictions);

FidelityReport fidelity(const RuleClassifier& clf, const Dataset& test, const BlackBoxPredictions& test_predictions,
                        const FeatureSchema& schema);

// Fraction of instances matched by the condition side of at least one rule.
double coverage(std::span<const ItemSet> condition_sides, std::span<const EncodedInstance> instances);

struct TuningPoint {
  double min_confidence = 0.0;
  std::size_t n_rules = 0;
  std::optional<double> dev_auc;  // empty when no rule survives
};

struct TuningResult {
  double chosen_confidence = 0.0;
  RuleSet ruleset;
  std::vector<TuningPoint> grid;
};

// Derives, filters and prunes rules at each grid confidence, scores each rule
// set by AUC on the dev split, and keeps the best. Ties go to the higher
// threshold.
TuningResult tune_confidence(std::span<const FrequentItemset> frequents, std::span<const double> grid, RuleMode mode,
                             const FeatureSchema& schema, std::span<const EncodedInstance> dev,
                             const BlackBoxPredictions& dev_predictions);

}  // namespace ruleagg
