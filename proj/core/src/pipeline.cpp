#include "ruleagg/pipeline.hpp"

#include <cstdio>
#include <json.hpp>
#include <set>

#include "ruleagg/io.hpp"
#include "ruleagg/miner.hpp"
#include "ruleagg/preprocess.hpp"
#include "ruleagg/random.hpp"

namespace ruleagg {

using Json = nlohmann::ordered_json;

namespace {

template <typename Fn>
auto in_stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::string hex_hash(std::string_view content) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(content)));
  return buf;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::filesystem::path resolve(const Json& doc, const char* key, const std::filesystem::path& base) {
  if (!doc.contains(key) || doc.at(key).is_null()) return {};
  std::filesystem::path p = doc.at(key).get<std::string>();
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

void require_file(const std::filesystem::path& p, std::string_view what) {
  if (p.empty()) throw Error(ErrorKind::kInvalidArgument, "missing required path: " + std::string(what));
  if (!std::filesystem::exists(p)) {
    throw Error(ErrorKind::kIo, std::string(what) + " '" + p.string() + "' does not exist");
  }
}

}  // namespace

PipelineConfig parse_config(std::string_view json, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid config: ") + e.what());
  }
  PipelineConfig c;
  try {
    c.schema = resolve(doc, "schema", base_dir);
    c.train = resolve(doc, "train", base_dir);
    c.dev = resolve(doc, "dev", base_dir);
    c.test = resolve(doc, "test", base_dir);
    c.predictions = resolve(doc, "predictions", base_dir);
    c.explanations = resolve(doc, "explanations", base_dir);
    c.output_dir = resolve(doc, "output_dir", base_dir);
    c.label_column = doc.value("label_column", c.label_column);
    c.n_bins = doc.value("n_bins", c.n_bins);
    c.seed = doc.value("seed", c.seed);
    c.use_reference_models = doc.value("use_reference_models", c.use_reference_models);
    if (doc.contains("confidence_grid")) c.confidence_grid = doc.at("confidence_grid").get<std::vector<double>>();
    if (doc.contains("mining")) {
      const auto& m = doc.at("mining");
      if (m.contains("mode")) c.mining.mode = parse_rule_mode(m.at("mode").get<std::string>());
      c.mining.min_support = optional_from<std::size_t>(m, "min_support");
      c.mining.min_support_fraction = optional_from<double>(m, "min_support_fraction");
      c.mining.min_confidence = optional_from<double>(m, "min_confidence");
      if (m.contains("max_itemset_size")) c.mining.max_itemset_size = optional_from<std::size_t>(m, "max_itemset_size");
      c.mining.score_threshold = m.value("score_threshold", c.mining.score_threshold);
      c.mining.top_k = optional_from<std::size_t>(m, "top_k");
    }
    if (doc.contains("reference")) {
      const auto& r = doc.at("reference");
      c.reference.max_depth = r.value("max_depth", c.reference.max_depth);
      c.reference.min_leaf = r.value("min_leaf", c.reference.min_leaf);
      c.reference.n_samples = r.value("n_samples", c.reference.n_samples);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid config: ") + e.what());
  }
  c.mining.validate();
  return c;
}

std::string config_to_json(const PipelineConfig& c) {
  Json doc;
  doc["schema"] = c.schema.string();
  doc["train"] = c.train.string();
  doc["dev"] = c.dev.string();
  doc["test"] = c.test.string();
  doc["predictions"] = c.predictions.string();
  doc["explanations"] = c.explanations.string();
  doc["output_dir"] = c.output_dir.string();
  doc["label_column"] = c.label_column;
  doc["n_bins"] = c.n_bins;
  doc["seed"] = c.seed;
  doc["use_reference_models"] = c.use_reference_models;
  doc["confidence_grid"] = c.confidence_grid;
  doc["mining"] = {{"mode", std::string(to_string(c.mining.mode))},
                   {"min_support", optional_json(c.mining.min_support)},
                   {"min_support_fraction", optional_json(c.mining.min_support_fraction)},
                   {"min_confidence", optional_json(c.mining.min_confidence)},
                   {"max_itemset_size", optional_json(c.mining.max_itemset_size)},
                   {"score_threshold", c.mining.score_threshold},
                   {"top_k", optional_json(c.mining.top_k)}};
  doc["reference"] = {{"max_depth", c.reference.max_depth},
                      {"min_leaf", c.reference.min_leaf},
                      {"n_samples", c.reference.n_samples}};
  return doc.dump(2) + "\n";
}

PipelineInputs reference_inputs(FeatureSchema schema, Dataset train, Dataset dev, Dataset test,
                                const ReferenceModelConfig& reference, std::uint64_t seed) {
  PipelineInputs in;
  in.tree = in_stage("reference-models", [&] {
    return train_tree(train, schema, TreeParams{reference.max_depth, reference.min_leaf, seed});
  });
  in_stage("reference-models", [&] {
    in.predictions = predict_all(*in.tree, dev, schema);
    for (auto& [id, p] : predict_all(*in.tree, test, schema).by_id) {
      if (!in.predictions.by_id.emplace(id, p).second) {
        throw Error(ErrorKind::kIntegrity, "instance '" + id + "' appears in both dev and test");
      }
    }
    in.explanations = explain_all(*in.tree, dev, train, schema, OcclusionParams{reference.n_samples, seed});
  });
  in.schema = std::move(schema);
  in.train = std::move(train);
  in.dev = std::move(dev);
  in.test = std::move(test);
  return in;
}

RunResult run_pipeline(const PipelineInputs& in, const MiningConfig& mining, std::span<const double> grid) {
  mining.validate();
  const FeatureSchema& schema = in.schema;
  RunResult result;

  auto itemized = in_stage("itemize", [&] {
    auto r = generate_explanation_itemsets(in.dev, in.explanations, in.predictions, schema, mining);
    if (r.itemsets.empty()) throw Error(ErrorKind::kCannotFit, "no explanation produced a transaction");
    return r;
  });
  result.kind = *itemized.kind;
  result.itemize_stats = itemized.stats;
  result.transactions = std::move(itemized.itemsets);
  {
    std::set<ItemSet> distinct;
    for (const auto& t : result.transactions) distinct.insert(t.transaction());
    result.distinct_transactions = distinct.size();
  }

  result.min_support = mining.resolved_min_support(result.kind, result.transactions.size());
  const auto frequents = in_stage("mine", [&] {
    return frequent_itemsets(std::span<const ExplanationItemset>(result.transactions), result.min_support,
                             mining.max_itemset_size);
  });
  result.n_frequent = frequents.size();

  const auto dev_encoded = in_stage("evaluate", [&] { return encode_all(in.dev, schema); });
  if (!grid.empty()) {
    result.tuning = in_stage("tune", [&] {
      return tune_confidence(frequents, grid, mining.mode, schema, dev_encoded, in.predictions);
    });
    result.min_confidence = result.tuning->chosen_confidence;
    result.ruleset = result.tuning->ruleset;
    result.n_mined_rules = derive_rules(frequents, result.min_confidence, mining.mode, schema).size();
  } else {
    result.min_confidence = mining.resolved_min_confidence();
    const auto rules = in_stage("mine", [&] { return derive_rules(frequents, result.min_confidence, mining.mode, schema); });
    result.n_mined_rules = rules.size();
    result.ruleset = in_stage("filter", [&] { return filter_rules(rules, mining.mode, schema); });
  }
  result.ruleset.provenance = mining;
  result.ruleset.provenance.min_support = result.min_support;
  result.ruleset.provenance.min_support_fraction.reset();
  result.ruleset.provenance.min_confidence = result.min_confidence;

  result.report = in_stage("evaluate", [&] {
    const auto clf = fit(result.ruleset, dev_encoded, in.predictions, schema);
    const auto test_encoded = encode_all(in.test, schema);
    return fidelity(clf, test_encoded, in.predictions);
  });
  return result;
}

RunResult run(const PipelineConfig& config) {
  in_stage("config", [&] {
    config.mining.validate();
    require_file(config.schema, "schema");
    require_file(config.dev, "dev split");
    require_file(config.test, "test split");
    if (config.use_reference_models) {
      require_file(config.train, "train split");
    } else {
      require_file(config.predictions, "predictions");
      require_file(config.explanations, "explanations");
    }
    if (config.output_dir.empty()) throw Error(ErrorKind::kInvalidArgument, "missing required path: output_dir");
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create output dir '" + config.output_dir.string() + "'");
  });

  Json inputs_manifest = Json::object();
  auto load = [&](const std::filesystem::path& p, const char* key) {
    std::string content = read_file(p);
    inputs_manifest[key] = {{"path", p.string()}, {"fnv1a64", hex_hash(content)}};
    return content;
  };

  FeatureSchema schema;
  Dataset train;
  Dataset dev;
  Dataset test;
  std::vector<std::string> warnings;
  const std::optional<std::string> label_col = config.label_column;
  in_stage("preprocess", [&] {
    schema = parse_schema(load(config.schema, "schema"));
    if (!config.train.empty() && std::filesystem::exists(config.train)) {
      train = parse_dataset_csv(load(config.train, "train"), schema, Split::kTrain, label_col);
    }
    if (!schema.is_fitted()) {
      if (train.empty()) throw Error(ErrorKind::kSchemaMismatch, "schema is not fitted and no train split was given");
      schema = fit_bins(schema, train, config.n_bins, &warnings);
    }
    dev = parse_dataset_csv(load(config.dev, "dev"), schema, Split::kDev, label_col);
    test = parse_dataset_csv(load(config.test, "test"), schema, Split::kTest, label_col);
  });

  PipelineInputs in;
  if (config.use_reference_models) {
    in = reference_inputs(schema, std::move(train), std::move(dev), std::move(test), config.reference, config.seed);
  } else {
    in_stage("itemize", [&] {
      in.predictions = parse_predictions(load(config.predictions, "predictions"), schema);
      in.explanations = parse_explanations(load(config.explanations, "explanations"), schema);
    });
    in.schema = schema;
    in.train = std::move(train);
    in.dev = std::move(dev);
    in.test = std::move(test);
  }

  RunResult result = run_pipeline(in, config.mining, config.confidence_grid);

  return in_stage("write", [&] {
    const auto& out = config.output_dir;
    const std::string rules_text = ruleset_to_json(result.ruleset, in.schema);
    const std::string report_text = report_to_json(result.report);
    write_file(out / "schema.json", schema_to_json(in.schema));
    write_file(out / "transactions.jsonl", transactions_to_jsonl(result.transactions, in.schema));
    write_file(out / "rules.json", rules_text);
    write_file(out / "report.json", report_text);
    if (in.tree) {
      write_file(out / "tree.json", tree_to_json(*in.tree, in.schema));
      write_file(out / "predictions.jsonl", predictions_to_jsonl(in.predictions, in.schema));
      write_file(out / "explanations.jsonl", explanations_to_jsonl(in.explanations, in.schema));
    }

    Json manifest;
    manifest["tool"] = "ruleagg";
    manifest["version"] = std::string(kToolVersion);
    manifest["seed"] = config.seed;
    manifest["config"] = Json::parse(config_to_json(config));
    manifest["inputs"] = inputs_manifest;
    manifest["explanation_kind"] = result.kind == ExplanationKind::kScore ? "score" : "rule";
    manifest["n_transactions"] = result.transactions.size();
    manifest["distinct_transactions"] = result.distinct_transactions;
    manifest["min_support"] = result.min_support;
    manifest["min_confidence"] = result.min_confidence;
    manifest["n_frequent_itemsets"] = result.n_frequent;
    manifest["n_mined_rules"] = result.n_mined_rules;
    manifest["n_rules"] = result.ruleset.size();
    if (result.tuning) {
      Json grid = Json::array();
      for (const auto& p : result.tuning->grid) {
        grid.push_back({{"min_confidence", p.min_confidence}, {"n_rules", p.n_rules}, {"dev_auc", optional_json(p.dev_auc)}});
      }
      manifest["tuning"] = std::move(grid);
    }
    if (!warnings.empty()) manifest["warnings"] = warnings;
    manifest["outputs"] = {{"rules.json", hex_hash(rules_text)}, {"report.json", hex_hash(report_text)}};
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    return result;
  });
}

}  // namespace ruleagg
