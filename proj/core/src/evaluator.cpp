#include "ruleagg/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ruleagg/error.hpp"

namespace ruleagg {

RuleClassifier fit(const RuleSet& ruleset, std::span<const EncodedInstance> dev,
                   const BlackBoxPredictions& dev_predictions, const FeatureSchema& schema) {
  if (ruleset.empty()) throw Error(ErrorKind::kCannotFit, "cannot fit a rule classifier on an empty rule set");
  if (dev.empty()) throw Error(ErrorKind::kCannotFit, "cannot fit a rule classifier on an empty dev split");

  RuleClassifier clf;
  clf.ruleset = ruleset;
  clf.positive_label = schema.positive_index();
  for (const auto& r : ruleset.rules) clf.condition_sides.push_back(r.conditions());

  std::array<std::size_t, 2> class_count{0, 0};
  std::vector<std::array<std::size_t, 2>> match_count(clf.condition_sides.size(), {0, 0});
  for (const auto& inst : dev) {
    const int c = dev_predictions.require(inst.instance_id).label;
    ++class_count[static_cast<std::size_t>(c)];
    for (std::size_t r = 0; r < clf.condition_sides.size(); ++r) {
      if (matches(inst, clf.condition_sides[r])) ++match_count[r][static_cast<std::size_t>(c)];
    }
  }

  const double n = static_cast<double>(dev.size());
  for (std::size_t c = 0; c < 2; ++c) clf.priors[c] = (static_cast<double>(class_count[c]) + 1.0) / (n + 2.0);
  clf.match_likelihood.resize(clf.condition_sides.size());
  for (std::size_t r = 0; r < clf.condition_sides.size(); ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      clf.match_likelihood[r][c] =
          (static_cast<double>(match_count[r][c]) + 1.0) / (static_cast<double>(class_count[c]) + 2.0);
    }
  }
  // Majority black-box label; a tied count falls to the positive label.
  const auto pos = static_cast<std::size_t>(clf.positive_label);
  clf.fallback_label = class_count[pos] >= class_count[1 - pos] ? clf.positive_label : 1 - clf.positive_label;
  return clf;
}

RuleClassifier fit(const RuleSet& ruleset, const Dataset& dev, const BlackBoxPredictions& dev_predictions,
                   const FeatureSchema& schema) {
  const auto encoded = encode_all(dev, schema);
  return fit(ruleset, encoded, dev_predictions, schema);
}

RulePrediction predict(const RuleClassifier& clf, const EncodedInstance& instance) {
  std::array<double, 2> log_post{std::log(clf.priors[0]), std::log(clf.priors[1])};
  RulePrediction out;
  for (std::size_t r = 0; r < clf.condition_sides.size(); ++r) {
    const bool m = matches(instance, clf.condition_sides[r]);
    out.covered = out.covered || m;
    for (std::size_t c = 0; c < 2; ++c) {
      const double p = clf.match_likelihood[r][c];
      log_post[c] += std::log(m ? p : 1.0 - p);
    }
  }
  const auto pos = static_cast<std::size_t>(clf.positive_label);
  const auto neg = 1 - pos;
  // P(pos) = 1 / (1 + exp(log_neg - log_pos))
  out.score = 1.0 / (1.0 + std::exp(log_post[neg] - log_post[pos]));
  if (log_post[pos] > log_post[neg]) {
    out.label = clf.positive_label;
  } else if (log_post[pos] < log_post[neg]) {
    out.label = 1 - clf.positive_label;
  } else {
    out.label = clf.fallback_label;
  }
  return out;
}

std::optional<double> auc_rank(std::span<const double> scores, std::span<const int> is_positive) {
  if (scores.size() != is_positive.size()) throw Error(ErrorKind::kInvalidArgument, "score/label length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]] != 0) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double f1_score(const Confusion& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double coverage(std::span<const ItemSet> condition_sides, std::span<const EncodedInstance> instances) {
  if (instances.empty()) return 0.0;
  std::size_t covered = 0;
  for (const auto& inst : instances) {
    if (std::any_of(condition_sides.begin(), condition_sides.end(),
                    [&](const ItemSet& cond) { return matches(inst, cond); })) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(instances.size());
}

FidelityReport fidelity(const RuleClassifier& clf, std::span<const EncodedInstance> test,
                        const BlackBoxPredictions& test_predictions) {
  FidelityReport report;
  report.n_rules = clf.rule_count();
  if (test.empty()) {
    report.warnings.push_back("empty test split");
    return report;
  }
  std::vector<double> scores;
  std::vector<int> truth;
  std::size_t covered = 0;
  std::size_t agree = 0;
  for (const auto& inst : test) {
    const int bb = test_predictions.require(inst.instance_id).label;
    const auto p = predict(clf, inst);
    const bool bb_pos = bb == clf.positive_label;
    const bool rule_pos = p.label == clf.positive_label;
    if (bb_pos && rule_pos) ++report.confusion.tp;
    if (!bb_pos && rule_pos) ++report.confusion.fp;
    if (bb_pos && !rule_pos) ++report.confusion.fn;
    if (!bb_pos && !rule_pos) ++report.confusion.tn;
    agree += p.label == bb ? 1 : 0;
    covered += p.covered ? 1 : 0;
    scores.push_back(p.score);
    truth.push_back(bb_pos ? 1 : 0);
  }
  const double n = static_cast<double>(test.size());
  report.accuracy = static_cast<double>(agree) / n;
  report.coverage = static_cast<double>(covered) / n;
  report.f1 = f1_score(report.confusion);
  if (auto auc = auc_rank(scores, truth)) {
    report.auc = *auc;
  } else {
    report.auc = 0.5;
    report.warnings.push_back("auc undefined: black-box predictions on the test split are all one class");
  }
  return report;
}

FidelityReport fidelity(const RuleClassifier& clf, const Dataset& test, const BlackBoxPredictions& test_predictions,
                        const FeatureSchema& schema) {
  const auto encoded = encode_all(test, schema);
  return fidelity(clf, encoded, test_predictions);
}

TuningResult tune_confidence(std::span<const FrequentItemset> frequents, std::span<const double> grid, RuleMode mode,
                             const FeatureSchema& schema, std::span<const EncodedInstance> dev,
                             const BlackBoxPredictions& dev_predictions) {
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "confidence grid is empty");
  std::vector<double> thresholds(grid.begin(), grid.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  TuningResult best;
  std::optional<double> best_auc;
  for (double c : thresholds) {
    if (!(c > 0.0 && c <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "grid confidence outside (0,1]");
    const auto rules = derive_rules(frequents, c, mode, schema);
    RuleSet rs = filter_rules(rules, mode, schema);
    TuningPoint point{c, rs.size(), std::nullopt};
    if (!rs.empty()) {
      const auto clf = fit(rs, dev, dev_predictions, schema);
      const auto report = fidelity(clf, dev, dev_predictions);
      point.dev_auc = report.auc;
      // Ascending sweep, so >= prefers the higher threshold on ties.
      if (!best_auc || report.auc >= *best_auc) {
        best_auc = report.auc;
        best.chosen_confidence = c;
        best.ruleset = std::move(rs);
      }
    }
    best.grid.push_back(point);
  }
  if (!best_auc) throw Error(ErrorKind::kCannotFit, "no confidence in the grid yields a non-empty rule set");
  return best;
}

}  // namespace ruleagg
