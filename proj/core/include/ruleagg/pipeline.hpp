#pragma once

// End-to-end driver: explanations + black-box predictions -> transactions ->
// frequent itemsets -> rules -> filtered rule set -> fidelity report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruleagg/error.hpp"
#include "ruleagg/evaluator.hpp"
#include "ruleagg/itemsets.hpp"
#include "ruleagg/model.hpp"
#include "ruleagg/reference_models.hpp"
#include "ruleagg/rule_filter.hpp"

namespace ruleagg {

inline constexpr std::string_view kToolVersion = "0.1.0";

// An Error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct ReferenceModelConfig {
  std::size_t max_depth = 6;
  std::size_t min_leaf = 5;
  std::size_t n_samples = 50;

  friend bool operator==(const ReferenceModelConfig&, const ReferenceModelConfig&) = default;
};

struct PipelineConfig {
  std::filesystem::path schema;
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path test;
  std::filesystem::path predictions;
  std::filesystem::path explanations;
  std::filesystem::path output_dir;
  std::string label_column = "label";
  std::size_t n_bins = 5;
  MiningConfig mining;
  std::vector<double> confidence_grid;
  std::uint64_t seed = 0;
  bool use_reference_models = false;
  ReferenceModelConfig reference;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Relative paths in the document resolve against `base_dir`.
PipelineConfig parse_config(std::string_view json, const std::filesystem::path& base_dir = {});
std::string config_to_json(const PipelineConfig& config);

// In-memory inputs of one run. The schema must be fitted.
struct PipelineInputs {
  FeatureSchema schema;
  Dataset train;
  Dataset dev;
  Dataset test;
  BlackBoxPredictions predictions;  // covers dev and test
  std::vector<LocalExplanation> explanations;
  std::optional<DecisionTree> tree;
};

struct RunResult {
  ExplanationKind kind = ExplanationKind::kScore;
  ItemizeStats itemize_stats;
  std::vector<ExplanationItemset> transactions;
  std::size_t distinct_transactions = 0;
  std::size_t min_support = 0;
  double min_confidence = 0.0;
  std::size_t n_frequent = 0;
  std::size_t n_mined_rules = 0;
  std::optional<TuningResult> tuning;
  RuleSet ruleset;
  FidelityReport report;
};

// Trains the reference tree on `train` (ground-truth labels), predicts dev and
// test, and explains dev by occlusion.
PipelineInputs reference_inputs(FeatureSchema schema, Dataset train, Dataset dev, Dataset test,
                                const ReferenceModelConfig& reference, std::uint64_t seed);

RunResult run_pipeline(const PipelineInputs& inputs, const MiningConfig& mining, std::span<const double> grid);

// File-based run: loads inputs, executes the pipeline and writes rules.json,
// report.json, transactions.jsonl and manifest.json (plus the synthesized
// predictions, explanations and tree when reference models are used).
RunResult run(const PipelineConfig& config);

}  // namespace ruleagg
