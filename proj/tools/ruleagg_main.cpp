// ruleagg: aggregate local explanations of a black-box classifier into
// general association rules and measure their fidelity.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "ruleagg/error.hpp"
#include "ruleagg/evaluator.hpp"
#include "ruleagg/io.hpp"
#include "ruleagg/itemsets.hpp"
#include "ruleagg/miner.hpp"
#include "ruleagg/pipeline.hpp"
#include "ruleagg/preprocess.hpp"
#include "ruleagg/rule_filter.hpp"
#include "ruleagg/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ruleagg;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStage = 3;

bool g_json_errors = false;

int report_error(std::string_view stage, std::string_view kind, const std::string& message, int code) {
  if (g_json_errors) {
    nlohmann::ordered_json j;
    j["error"] = message;
    j["stage"] = std::string(stage);
    j["kind"] = std::string(kind);
    j["exit_code"] = code;
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "ruleagg: " << (stage.empty() ? "" : std::string(stage) + ": ") << message << "\n";
  }
  return code;
}

template <typename Fn>
int guarded(std::string_view stage, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const StageError& e) {
    return report_error(e.stage(), to_string(e.kind()), e.what(), e.is_input_error() ? kExitInput : kExitStage);
  } catch (const Error& e) {
    return report_error(stage, to_string(e.kind()), e.what(), e.is_input_error() ? kExitInput : kExitStage);
  } catch (const std::exception& e) {
    return report_error(stage, "internal", e.what(), kExitStage);
  }
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    write_file(out, content);
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidArgument, "bad confidence grid entry '" + tok + "'");
    }
  }
  return grid;
}

ExplanationKind parse_kind(const std::string& s) {
  if (s == "score") return ExplanationKind::kScore;
  if (s == "rule") return ExplanationKind::kRule;
  throw Error(ErrorKind::kInvalidArgument, "explanation kind must be score or rule");
}

struct MiningFlags {
  std::optional<std::size_t> min_support;
  std::optional<double> min_support_fraction;
  std::optional<double> min_confidence;
  std::optional<std::string> mode;
  std::optional<std::size_t> max_size;
  std::optional<double> score_threshold;
  std::optional<std::size_t> top_k;

  void apply(MiningConfig& m) const {
    if (mode) m.mode = parse_rule_mode(*mode);
    if (min_support) m.min_support = min_support;
    if (min_support_fraction) m.min_support_fraction = min_support_fraction;
    if (min_confidence) m.min_confidence = min_confidence;
    if (max_size) m.max_itemset_size = *max_size == 0 ? std::nullopt : max_size;
    if (score_threshold) m.score_threshold = *score_threshold;
    if (top_k) m.top_k = top_k;
  }
};

void add_mining_flags(CLI::App* cmd, MiningFlags& f) {
  cmd->add_option("--min-support", f.min_support, "Minimum support as an absolute transaction count");
  cmd->add_option("--min-support-fraction", f.min_support_fraction, "Minimum support as a fraction (overrides count)");
  cmd->add_option("--min-confidence", f.min_confidence, "Minimum rule confidence in (0,1]");
  cmd->add_option("--mode", f.mode, "Rule orientation")->check(CLI::IsMember({"characteristic", "discriminative"}));
  cmd->add_option("--max-size", f.max_size, "Maximum itemset size, class item included (0 = unlimited)");
  cmd->add_option("--score-threshold", f.score_threshold, "Drop score items with |score| <= threshold");
  cmd->add_option("--top-k", f.top_k, "Keep at most k score items per explanation");
}

FeatureSchema load_schema(const std::string& path) { return parse_schema(read_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregate local explanations into general association rules"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.add_flag("--json-errors", g_json_errors, "Print errors as JSON on stderr");
  app.require_subcommand(1);

  // preprocess
  std::string pp_schema, pp_train, pp_out;
  std::size_t pp_bins = kDefaultBinCount;
  auto* preprocess = app.add_subcommand("preprocess", "Fit equal-width bins on the train split and write the schema");
  preprocess->add_option("--schema", pp_schema, "Schema JSON")->required();
  preprocess->add_option("--train", pp_train, "Train CSV")->required();
  preprocess->add_option("--out", pp_out, "Output schema (default: overwrite --schema)");
  preprocess->add_option("--bins", pp_bins, "Bins per continuous feature")->check(CLI::PositiveNumber);

  // itemize
  std::string it_schema, it_expl, it_pred, it_data, it_out;
  MiningFlags it_flags;
  auto* itemize = app.add_subcommand("itemize", "Turn local explanations into explanation itemsets");
  itemize->add_option("--schema", it_schema, "Fitted schema JSON")->required();
  itemize->add_option("--explanations", it_expl, "Explanations JSONL")->required();
  itemize->add_option("--predictions", it_pred, "Black-box predictions JSONL")->required();
  itemize->add_option("--data", it_data, "CSV of the explained instances (enables the opposite-class rule)");
  itemize->add_option("--out", it_out, "Transactions JSONL (default: stdout)");
  itemize->add_option("--score-threshold", it_flags.score_threshold, "Drop score items with |score| <= threshold");
  itemize->add_option("--top-k", it_flags.top_k, "Keep at most k score items per explanation");

  // mine
  std::string mn_schema, mn_trans, mn_out, mn_kind = "score";
  MiningFlags mn_flags;
  auto* mine = app.add_subcommand("mine", "Apriori mining and rule derivation");
  mine->add_option("--schema", mn_schema, "Fitted schema JSON")->required();
  mine->add_option("--transactions", mn_trans, "Transactions JSONL")->required();
  mine->add_option("--explanation-kind", mn_kind, "Source explanation kind (selects the default min support)")
      ->check(CLI::IsMember({"score", "rule"}));
  mine->add_option("--out", mn_out, "Rule dump JSON (default: stdout)");
  add_mining_flags(mine, mn_flags);

  // filter
  std::string fl_schema, fl_rules, fl_out, fl_mode = "characteristic";
  auto* filter = app.add_subcommand("filter", "Keep one rule orientation and prune subsumed rules");
  filter->add_option("--schema", fl_schema, "Fitted schema JSON")->required();
  filter->add_option("--rules", fl_rules, "Rule dump JSON")->required();
  filter->add_option("--mode", fl_mode, "Rule orientation")->check(CLI::IsMember({"characteristic", "discriminative"}));
  filter->add_option("--out", fl_out, "Filtered rule dump JSON (default: stdout)");

  // evaluate
  std::string ev_schema, ev_rules, ev_dev, ev_test, ev_pred, ev_out;
  auto* evaluate = app.add_subcommand("evaluate", "Fit the naive Bayes rule classifier on dev and report test fidelity");
  evaluate->add_option("--schema", ev_schema, "Fitted schema JSON")->required();
  evaluate->add_option("--rules", ev_rules, "Rule dump JSON")->required();
  evaluate->add_option("--dev", ev_dev, "Dev CSV")->required();
  evaluate->add_option("--test", ev_test, "Test CSV")->required();
  evaluate->add_option("--predictions", ev_pred, "Black-box predictions JSONL for dev and test")->required();
  evaluate->add_option("--out", ev_out, "Report JSON (default: stdout)");

  // run
  std::string rn_config, rn_schema, rn_train, rn_dev, rn_test, rn_pred, rn_expl, rn_out, rn_grid, rn_label;
  std::optional<std::uint64_t> rn_seed;
  std::optional<std::size_t> rn_depth, rn_leaf, rn_samples;
  bool rn_reference = false;
  MiningFlags rn_flags;
  auto* run_cmd = app.add_subcommand("run", "Full pipeline: itemize, mine, filter, tune and evaluate");
  run_cmd->add_option("--config", rn_config, "Pipeline config JSON (flags override it)");
  run_cmd->add_option("--schema", rn_schema, "Schema JSON");
  run_cmd->add_option("--train", rn_train, "Train CSV");
  run_cmd->add_option("--dev", rn_dev, "Dev CSV");
  run_cmd->add_option("--test", rn_test, "Test CSV");
  run_cmd->add_option("--predictions", rn_pred, "Black-box predictions JSONL");
  run_cmd->add_option("--explanations", rn_expl, "Explanations JSONL");
  run_cmd->add_option("--out", rn_out, "Output directory");
  run_cmd->add_option("--label-column", rn_label, "Ground-truth column used to train the reference tree");
  run_cmd->add_option("--confidence-grid", rn_grid, "Comma-separated confidences tuned on dev AUC");
  run_cmd->add_option("--seed", rn_seed, "Seed for all randomness");
  run_cmd->add_flag("--use-reference-models", rn_reference, "Synthesize predictions and explanations with the reference tree");
  run_cmd->add_option("--max-depth", rn_depth, "Reference tree depth");
  run_cmd->add_option("--min-leaf", rn_leaf, "Reference tree minimum leaf size");
  run_cmd->add_option("--occlusion-samples", rn_samples, "Occlusion samples per feature");
  add_mining_flags(run_cmd, rn_flags);

  // synth
  std::string sy_kind = "mofn", sy_out;
  std::size_t sy_n = 2000;
  std::uint64_t sy_seed = 0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic binary task (schema + train/dev/test CSVs)");
  synth->add_option("--kind", sy_kind, "Concept")->check(CLI::IsMember({"mofn", "single-rule"}));
  synth->add_option("--n", sy_n, "Number of instances");
  synth->add_option("--seed", sy_seed, "Seed");
  synth->add_option("--out", sy_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    if (g_json_errors) return report_error("cli", "invalid-argument", e.what(), kExitInput);
    app.exit(e);
    return kExitInput;
  }

  if (*preprocess) {
    return guarded("preprocess", [&] {
      const auto schema = load_schema(pp_schema);
      const auto train = parse_dataset_csv(read_file(pp_train), schema, Split::kTrain);
      std::vector<std::string> warnings;
      const auto fitted = fit_bins(schema, train, pp_bins, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      write_file(pp_out.empty() ? pp_schema : pp_out, schema_to_json(fitted));
    });
  }
  if (*itemize) {
    return guarded("itemize", [&] {
      const auto schema = load_schema(it_schema);
      const auto explanations = parse_explanations(read_file(it_expl), schema);
      const auto predictions = parse_predictions(read_file(it_pred), schema);
      Dataset data;
      if (!it_data.empty()) data = parse_dataset_csv(read_file(it_data), schema, Split::kDev);
      MiningConfig cfg;
      it_flags.apply(cfg);
      cfg.validate();
      const auto result = generate_explanation_itemsets(data, explanations, predictions, schema, cfg);
      std::cerr << "itemize: " << result.itemsets.size() << " transactions, " << result.stats.dropped_empty
                << " explanations dropped\n";
      emit(it_out, transactions_to_jsonl(result.itemsets, schema));
    });
  }
  if (*mine) {
    return guarded("mine", [&] {
      const auto schema = load_schema(mn_schema);
      const auto transactions = parse_transactions(read_file(mn_trans), schema);
      MiningConfig cfg;
      mn_flags.apply(cfg);
      cfg.validate();
      const auto min_support = cfg.resolved_min_support(parse_kind(mn_kind), transactions.size());
      const auto frequents =
          frequent_itemsets(std::span<const ExplanationItemset>(transactions), min_support, cfg.max_itemset_size);
      const auto rules = derive_rules(frequents, cfg.resolved_min_confidence(), cfg.mode, schema);
      std::cerr << "mine: " << frequents.size() << " frequent itemsets, " << rules.size() << " rules (min support "
                << min_support << ")\n";
      emit(mn_out, rules_to_json(rules, schema));
    });
  }
  if (*filter) {
    return guarded("filter", [&] {
      const auto schema = load_schema(fl_schema);
      const auto dump = parse_rules(read_file(fl_rules), schema);
      const auto ruleset = filter_rules(dump.rules, parse_rule_mode(fl_mode), schema);
      emit(fl_out, ruleset_to_json(ruleset, schema));
    });
  }
  if (*evaluate) {
    return guarded("evaluate", [&] {
      const auto schema = load_schema(ev_schema);
      const auto dump = parse_rules(read_file(ev_rules), schema);
      if (dump.rules.empty()) throw Error(ErrorKind::kCannotFit, "rule dump holds no rules");
      RuleSet ruleset;
      ruleset.mode = dump.rules.front().mode;
      ruleset.rules = dump.rules;
      const auto dev = parse_dataset_csv(read_file(ev_dev), schema, Split::kDev);
      const auto test = parse_dataset_csv(read_file(ev_test), schema, Split::kTest);
      const auto predictions = parse_predictions(read_file(ev_pred), schema);
      const auto clf = fit(ruleset, dev, predictions, schema);
      emit(ev_out, report_to_json(fidelity(clf, test, predictions, schema)));
    });
  }
  if (*run_cmd) {
    return guarded("config", [&] {
      PipelineConfig cfg;
      if (!rn_config.empty()) cfg = parse_config(read_file(rn_config), fs::path(rn_config).parent_path());
      if (!rn_schema.empty()) cfg.schema = rn_schema;
      if (!rn_train.empty()) cfg.train = rn_train;
      if (!rn_dev.empty()) cfg.dev = rn_dev;
      if (!rn_test.empty()) cfg.test = rn_test;
      if (!rn_pred.empty()) cfg.predictions = rn_pred;
      if (!rn_expl.empty()) cfg.explanations = rn_expl;
      if (!rn_out.empty()) cfg.output_dir = rn_out;
      if (!rn_label.empty()) cfg.label_column = rn_label;
      if (!rn_grid.empty()) cfg.confidence_grid = parse_grid(rn_grid);
      if (rn_seed) cfg.seed = *rn_seed;
      if (rn_reference) cfg.use_reference_models = true;
      if (rn_depth) cfg.reference.max_depth = *rn_depth;
      if (rn_leaf) cfg.reference.min_leaf = *rn_leaf;
      if (rn_samples) cfg.reference.n_samples = *rn_samples;
      rn_flags.apply(cfg.mining);
      const auto result = run(cfg);
      std::printf("%zu rules (%s, min support %zu, min confidence %.3f); test auc %.4f accuracy %.4f f1 %.4f coverage %.4f\n",
                  result.ruleset.size(), std::string(to_string(result.ruleset.mode)).c_str(), result.min_support,
                  result.min_confidence, result.report.auc, result.report.accuracy, result.report.f1,
                  result.report.coverage);
    });
  }
  if (*synth) {
    return guarded("synth", [&] {
      SyntheticTask task;
      if (sy_kind == "mofn") {
        MofnParams p;
        p.n_instances = sy_n;
        p.seed = sy_seed;
        task = make_mofn(p);
      } else {
        task = make_single_rule(sy_n, sy_seed);
      }
      const fs::path out = sy_out;
      write_file(out / "schema.json", schema_to_json(task.schema));
      write_file(out / "train.csv", dataset_to_csv(task.train, task.schema, "label"));
      write_file(out / "dev.csv", dataset_to_csv(task.dev, task.schema, "label"));
      write_file(out / "test.csv", dataset_to_csv(task.test, task.schema, "label"));
    });
  }
  return 0;
}
