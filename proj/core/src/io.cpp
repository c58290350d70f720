#include "ruleagg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ruleagg/error.hpp"
#include "ruleagg/render.hpp"

namespace ruleagg {

using Json = nlohmann::ordered_json;

namespace {

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParse, "invalid " + std::string(what) + ": " + e.what());
  }
}

template <typename Fn>
void for_each_jsonl(std::string_view text, std::string_view what, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      fn(Json::parse(line));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kParse, std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<std::string> render_items(const ItemSet& items, const FeatureSchema& schema) {
  return schema.render_all(items);
}

ItemSet parse_items(const Json& arr, const FeatureSchema& schema) {
  std::vector<ItemId> ids;
  for (const auto& v : arr) ids.push_back(schema.parse_item(v.get<std::string>()));
  return make_item_set(std::move(ids));
}

// RFC 4180 records: quoted fields may contain separators, quotes ("") and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {}

  // Returns false at end of input. `line` is the physical line the record starts on.
  bool next(std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) return false;
    line = line_;
    std::string field;
    bool quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field += '"';
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        ++line_;
        break;
      } else {
        field += c;
      }
    }
    if (quoted) throw Error(ErrorKind::kParse, "csv line " + std::to_string(line) + ": unterminated quote");
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, end);
}

Json rule_json(const AssociationRule& r, const FeatureSchema& schema) {
  Json j;
  j["mode"] = std::string(to_string(r.mode));
  j["antecedent"] = render_items(r.antecedent, schema);
  j["consequent"] = render_items(r.consequent, schema);
  j["support"] = r.support_count;
  j["antecedent_support"] = r.antecedent_support;
  j["confidence"] = r.confidence;
  return j;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

// --- schema ---

FeatureSchema parse_schema(std::string_view json) {
  const Json doc = parse_json(json, "schema");
  try {
    std::vector<FeatureSpec> features;
    for (const auto& jf : doc.at("features")) {
      FeatureSpec spec;
      spec.name = jf.at("name").get<std::string>();
      const auto kind = jf.at("kind").get<std::string>();
      if (kind == "categorical") {
        spec.kind = CategoricalSpec{jf.at("values").get<std::vector<std::string>>()};
      } else if (kind == "continuous") {
        ContinuousSpec cont;
        if (jf.contains("edges")) cont.edges = jf.at("edges").get<std::vector<double>>();
        spec.kind = std::move(cont);
      } else {
        throw Error(ErrorKind::kSchemaMismatch, "feature '" + spec.name + "' has unknown kind '" + kind + "'");
      }
      features.push_back(std::move(spec));
    }
    auto classes = doc.at("classes").get<std::vector<std::string>>();
    std::optional<std::string> positive;
    if (doc.contains("positive")) positive = doc.at("positive").get<std::string>();
    return FeatureSchema(std::move(features), std::move(classes), positive);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("invalid schema: ") + e.what());
  }
}

std::string schema_to_json(const FeatureSchema& schema) {
  Json doc;
  auto& features = doc["features"] = Json::array();
  bool any_continuous = false;
  for (const auto& f : schema.features()) {
    Json jf;
    jf["name"] = f.name;
    if (f.is_categorical()) {
      jf["kind"] = "categorical";
      jf["values"] = f.categories();
    } else {
      any_continuous = true;
      jf["kind"] = "continuous";
      if (f.is_fitted()) jf["edges"] = f.edges();
    }
    features.push_back(std::move(jf));
  }
  doc["classes"] = {schema.class_label(0).name, schema.class_label(1).name};
  doc["positive"] = schema.class_label(schema.positive_index()).name;
  if (any_continuous) {
    doc["binning"] = {{"method", "equal-width"},
                      {"interval", "[lo,hi); first bin open below, last bin closed above; out-of-range values clamp"}};
  }
  return doc.dump(2) + "\n";
}

// --- CSV ---

Dataset parse_dataset_csv(std::string_view csv, const FeatureSchema& schema, Split split,
                          std::optional<std::string> label_column) {
  CsvReader reader(csv);
  std::vector<std::string> header;
  std::size_t line = 0;
  if (!reader.next(header, line)) throw Error(ErrorKind::kSchemaMismatch, "csv is empty; expected a header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  auto column_of = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column_of("instance_id");
  if (!id_col) throw Error(ErrorKind::kSchemaMismatch, "csv header is missing column 'instance_id'");
  std::vector<std::size_t> feature_cols;
  for (const auto& f : schema.features()) {
    const auto col = column_of(f.name);
    if (!col) throw Error(ErrorKind::kSchemaMismatch, "csv header is missing column '" + f.name + "'");
    feature_cols.push_back(*col);
  }
  std::optional<std::size_t> label_col;
  if (label_column) label_col = column_of(*label_column);

  Dataset data;
  data.split = split;
  std::vector<std::string> fields;
  while (reader.next(fields, line)) {
    auto where = [&] { return "csv line " + std::to_string(line) + ": "; };
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kSchemaMismatch, where() + "expected " + std::to_string(header.size()) + " fields, got " +
                                                  std::to_string(fields.size()));
    }
    Instance inst;
    inst.id = fields[*id_col];
    if (inst.id.empty()) throw Error(ErrorKind::kSchemaMismatch, where() + "empty instance_id");
    for (std::size_t f = 0; f < schema.feature_count(); ++f) {
      const auto& spec = schema.feature(f);
      const std::string& raw = fields[feature_cols[f]];
      if (spec.is_categorical()) {
        const auto& values = spec.categories();
        const auto it = std::find(values.begin(), values.end(), raw);
        if (it == values.end()) {
          throw Error(ErrorKind::kUnknownCategory,
                      where() + "unknown category '" + raw + "' for feature '" + spec.name + "'");
        }
        inst.values.emplace_back(static_cast<std::size_t>(it - values.begin()));
      } else {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), x);
        if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(x)) {
          throw Error(ErrorKind::kSchemaMismatch,
                      where() + "value '" + raw + "' of feature '" + spec.name + "' is not a finite number");
        }
        inst.values.emplace_back(x);
      }
    }
    if (label_col) {
      const auto idx = schema.label_index(fields[*label_col]);
      if (!idx) throw Error(ErrorKind::kSchemaMismatch, where() + "unknown class label '" + fields[*label_col] + "'");
      inst.label = *idx;
    }
    data.instances.push_back(std::move(inst));
  }
  return data;
}

std::string dataset_to_csv(const Dataset& data, const FeatureSchema& schema, std::optional<std::string> label_column) {
  std::string out = "instance_id";
  for (const auto& f : schema.features()) out += "," + csv_escape(f.name);
  if (label_column) out += "," + csv_escape(*label_column);
  out += "\n";
  for (const auto& inst : data.instances) {
    out += csv_escape(inst.id);
    for (std::size_t f = 0; f < schema.feature_count(); ++f) {
      const auto& spec = schema.feature(f);
      out += ",";
      if (spec.is_categorical()) {
        out += csv_escape(spec.categories()[std::get<std::size_t>(inst.values[f])]);
      } else {
        out += format_double(std::get<double>(inst.values[f]));
      }
    }
    if (label_column) out += "," + (inst.label ? csv_escape(schema.class_label(*inst.label).name) : std::string());
    out += "\n";
  }
  return out;
}

// --- predictions ---

BlackBoxPredictions parse_predictions(std::string_view jsonl, const FeatureSchema& schema) {
  BlackBoxPredictions out;
  for_each_jsonl(jsonl, "predictions", [&](const Json& j) {
    const auto id = j.at("instance_id").get<std::string>();
    Prediction p{schema.require_label(j.at("label").get<std::string>()), std::nullopt};
    if (j.contains("score") && !j.at("score").is_null()) p.score = j.at("score").get<double>();
    if (!out.by_id.emplace(id, p).second) throw Error(ErrorKind::kIntegrity, "duplicate prediction for '" + id + "'");
  });
  return out;
}

std::string predictions_to_jsonl(const BlackBoxPredictions& predictions, const FeatureSchema& schema) {
  std::string out;
  for (const auto& [id, p] : predictions.by_id) {
    Json j;
    j["instance_id"] = id;
    j["label"] = schema.class_label(p.label).name;
    if (p.score) j["score"] = *p.score;
    out += j.dump() + "\n";
  }
  return out;
}

// --- explanations ---

std::vector<LocalExplanation> parse_explanations(std::string_view jsonl, const FeatureSchema& schema) {
  std::vector<LocalExplanation> out;
  for_each_jsonl(jsonl, "explanations", [&](const Json& j) {
    LocalExplanation e;
    e.instance_id = j.at("instance_id").get<std::string>();
    e.predicted_label = schema.require_label(j.at("label").get<std::string>());
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "rule") {
      e.form = RuleForm{parse_items(j.at("conditions"), schema)};
    } else if (kind == "score") {
      ScoreForm sf;
      for (const auto& [name, value] : j.at("scores").items()) {
        sf.scores.emplace_back(schema.parse_item(name), value.get<double>());
      }
      e.form = std::move(sf);
    } else {
      throw Error(ErrorKind::kParse, "unknown explanation kind '" + kind + "'");
    }
    out.push_back(std::move(e));
  });
  return out;
}

std::string explanations_to_jsonl(std::span<const LocalExplanation> explanations, const FeatureSchema& schema) {
  std::string out;
  for (const auto& e : explanations) {
    Json j;
    j["instance_id"] = e.instance_id;
    if (const auto* rule = std::get_if<RuleForm>(&e.form)) {
      j["kind"] = "rule";
      j["label"] = schema.class_label(e.predicted_label).name;
      j["conditions"] = render_items(rule->conditions, schema);
    } else {
      j["kind"] = "score";
      j["label"] = schema.class_label(e.predicted_label).name;
      Json scores = Json::object();
      for (const auto& [id, s] : std::get<ScoreForm>(e.form).scores) scores[schema.render(id)] = s;
      j["scores"] = std::move(scores);
    }
    out += j.dump() + "\n";
  }
  return out;
}

// --- transactions ---

std::vector<ExplanationItemset> parse_transactions(std::string_view jsonl, const FeatureSchema& schema) {
  std::vector<ExplanationItemset> out;
  for_each_jsonl(jsonl, "transactions", [&](const Json& j) {
    ExplanationItemset t;
    t.instance_id = j.at("instance_id").get<std::string>();
    t.class_item = schema.class_item(schema.require_label(j.at("class").get<std::string>()));
    t.conditions = parse_items(j.at("items"), schema);
    if (t.conditions.empty()) throw Error(ErrorKind::kSchemaMismatch, "transaction without condition items");
    for (ItemId id : t.conditions) {
      if (schema.is_class_item(id)) throw Error(ErrorKind::kSchemaMismatch, "class item among transaction items");
    }
    out.push_back(std::move(t));
  });
  return out;
}

std::string transactions_to_jsonl(std::span<const ExplanationItemset> transactions, const FeatureSchema& schema) {
  std::string out;
  for (const auto& t : transactions) {
    Json j;
    j["instance_id"] = t.instance_id;
    j["class"] = schema.render(t.class_item);
    j["items"] = render_items(t.conditions, schema);
    out += j.dump() + "\n";
  }
  return out;
}

// --- rules ---

std::string rules_to_json(std::span<const AssociationRule> rules, const FeatureSchema& schema) {
  Json arr = Json::array();
  for (const auto& r : rules) arr.push_back(rule_json(r, schema));
  return arr.dump(2) + "\n";
}

std::string ruleset_to_json(const RuleSet& ruleset, const FeatureSchema& schema) {
  Json arr = Json::array();
  for (const auto& r : ruleset.rules) arr.push_back(rule_json(r, schema));
  for (const auto& p : ruleset.pruned) {
    Json j = rule_json(p.rule, schema);
    j["pruned_by"] = canonical_render(p.pruned_by, schema);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

RuleDump parse_rules(std::string_view json, const FeatureSchema& schema) {
  const Json doc = parse_json(json, "rule dump");
  if (!doc.is_array()) throw Error(ErrorKind::kParse, "rule dump must be a JSON array");
  RuleDump out;
  try {
    for (const auto& j : doc) {
      const RuleMode mode = parse_rule_mode(j.at("mode").get<std::string>());
      ItemSet antecedent = parse_items(j.at("antecedent"), schema);
      ItemSet consequent = parse_items(j.at("consequent"), schema);
      const auto support = j.at("support").get<std::size_t>();
      const auto ante = j.value("antecedent_support", std::size_t{0});
      AssociationRule r;
      if (ante > 0) {
        r = AssociationRule::from_counts(mode, std::move(antecedent), std::move(consequent), support, ante);
      } else {
        r.mode = mode;
        r.antecedent = std::move(antecedent);
        r.consequent = std::move(consequent);
        r.support_count = support;
        r.confidence = j.at("confidence").get<double>();
      }
      validate_rule(r, schema);
      if (j.contains("pruned_by")) {
        out.pruned.push_back({std::move(r), parse_rule(j.at("pruned_by").get<std::string>(), schema)});
      } else {
        out.rules.push_back(std::move(r));
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid rule dump: ") + e.what());
  }
  return out;
}

std::string report_to_json(const FidelityReport& report) {
  Json doc;
  doc["accuracy"] = report.accuracy;
  doc["auc"] = report.auc;
  doc["f1"] = report.f1;
  doc["coverage"] = report.coverage;
  doc["n_rules"] = report.n_rules;
  doc["confusion"] = {{"tp", report.confusion.tp},
                      {"fp", report.confusion.fp},
                      {"fn", report.confusion.fn},
                      {"tn", report.confusion.tn}};
  if (!report.warnings.empty()) doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

}  // namespace ruleagg
