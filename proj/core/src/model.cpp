#include "ruleagg/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "ruleagg/error.hpp"

namespace ruleagg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchemaMismatch: return "schema-mismatch";
    case ErrorKind::kUnknownCategory: return "unknown-category";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kUnsupportedTask: return "unsupported-task";
    case ErrorKind::kInvalidBatch: return "invalid-batch";
    case ErrorKind::kCannotFit: return "cannot-fit";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

ItemSet make_item_set(std::vector<ItemId> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

bool is_subset(const ItemSet& sub, const ItemSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool is_proper_subset(const ItemSet& sub, const ItemSet& super) {
  return sub.size() < super.size() && is_subset(sub, super);
}

std::string_view to_string(RuleMode mode) {
  return mode == RuleMode::kCharacteristic ? "characteristic" : "discriminative";
}

RuleMode parse_rule_mode(std::string_view text) {
  if (text == "characteristic") return RuleMode::kCharacteristic;
  if (text == "discriminative") return RuleMode::kDiscriminative;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown rule mode '" + std::string(text) + "' (expected characteristic|discriminative)");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

// --- FeatureSpec ---

bool FeatureSpec::is_fitted() const {
  if (const auto* c = std::get_if<ContinuousSpec>(&kind)) return c->edges.has_value();
  return true;
}

std::size_t FeatureSpec::cardinality() const {
  if (const auto* cat = std::get_if<CategoricalSpec>(&kind)) return cat->values.size();
  const auto& cont = std::get<ContinuousSpec>(kind);
  return cont.edges ? cont.edges->size() + 1 : 0;
}

const std::vector<std::string>& FeatureSpec::categories() const {
  const auto* cat = std::get_if<CategoricalSpec>(&kind);
  if (cat == nullptr) throw Error(ErrorKind::kSchemaMismatch, "feature '" + name + "' is not categorical");
  return cat->values;
}

const std::vector<double>& FeatureSpec::edges() const {
  const auto* cont = std::get_if<ContinuousSpec>(&kind);
  if (cont == nullptr || !cont->edges) {
    throw Error(ErrorKind::kSchemaMismatch, "feature '" + name + "' has no fitted bin edges");
  }
  return *cont->edges;
}

// --- FeatureSchema ---

namespace {

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, end);
}

std::string value_rendering(const FeatureSpec& spec, std::size_t value) {
  if (spec.is_categorical()) return spec.categories()[value];
  return FeatureSchema::render_bin(spec, value);
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features, std::vector<std::string> classes,
                             std::optional<std::string> positive)
    : features_(std::move(features)) {
  if (classes.size() != 2) {
    throw Error(ErrorKind::kUnsupportedTask,
                "only binary tasks are supported; schema declares " + std::to_string(classes.size()) +
                    " class labels");
  }
  if (classes[0] == classes[1]) throw Error(ErrorKind::kSchemaMismatch, "class labels must be distinct");
  for (int i = 0; i < 2; ++i) classes_.push_back({classes[static_cast<std::size_t>(i)], i});
  if (positive) {
    auto idx = label_index(*positive);
    if (!idx) throw Error(ErrorKind::kSchemaMismatch, "positive label '" + *positive + "' is not a class");
    positive_ = *idx;
  }

  std::set<std::string, std::less<>> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw Error(ErrorKind::kSchemaMismatch, "feature with empty name");
    if (!names.insert(f.name).second) throw Error(ErrorKind::kSchemaMismatch, "duplicate feature '" + f.name + "'");
    if (f.name == "instance_id") throw Error(ErrorKind::kSchemaMismatch, "feature name 'instance_id' is reserved");
    if (const auto* cat = std::get_if<CategoricalSpec>(&f.kind)) {
      if (cat->values.empty()) throw Error(ErrorKind::kSchemaMismatch, "categorical feature '" + f.name + "' has no values");
      std::set<std::string> seen(cat->values.begin(), cat->values.end());
      if (seen.size() != cat->values.size()) {
        throw Error(ErrorKind::kSchemaMismatch, "categorical feature '" + f.name + "' has duplicate values");
      }
    } else {
      const auto& edges = std::get<ContinuousSpec>(f.kind).edges;
      if (edges) {
        for (std::size_t i = 0; i < edges->size(); ++i) {
          if (!std::isfinite((*edges)[i]) || (i > 0 && !((*edges)[i - 1] < (*edges)[i]))) {
            throw Error(ErrorKind::kSchemaMismatch,
                        "bin edges of '" + f.name + "' must be finite and strictly increasing");
          }
        }
      }
    }
  }
  fitted_ = std::all_of(features_.begin(), features_.end(), [](const FeatureSpec& f) { return f.is_fitted(); });
  if (fitted_) build_vocabulary();
}

std::optional<std::size_t> FeatureSchema::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<int> FeatureSchema::label_index(std::string_view name) const {
  for (const auto& c : classes_) {
    if (c.name == name) return c.index;
  }
  return std::nullopt;
}

int FeatureSchema::require_label(std::string_view name) const {
  auto idx = label_index(name);
  if (!idx) throw Error(ErrorKind::kSchemaMismatch, "unknown class label '" + std::string(name) + "'");
  return *idx;
}

FeatureSchema FeatureSchema::with_edges(const std::vector<std::optional<std::vector<double>>>& edges) const {
  if (edges.size() != features_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "edge list does not match feature count");
  }
  auto features = features_;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (auto* cont = std::get_if<ContinuousSpec>(&features[i].kind)) {
      if (edges[i]) cont->edges = edges[i];
    }
  }
  return FeatureSchema(std::move(features), {classes_[0].name, classes_[1].name}, classes_[static_cast<std::size_t>(positive_)].name);
}

std::string FeatureSchema::render_bin(const FeatureSpec& spec, std::size_t bin) {
  const auto& e = spec.edges();
  const double lo = bin == 0 ? -INFINITY : e[bin - 1];
  const double hi = bin >= e.size() ? INFINITY : e[bin];
  return (bin == 0 ? "(" : "[") + format_number(lo) + "," + format_number(hi) + ")";
}

void FeatureSchema::build_vocabulary() {
  struct Entry {
    Item item;
    std::string feature_name;
    std::string value;
  };
  std::vector<Entry> entries;
  for (const auto& c : classes_) {
    entries.push_back({{Item::Kind::kClass, 0, static_cast<std::uint32_t>(c.index)}, "", c.name});
  }
  for (std::size_t f = 0; f < features_.size(); ++f) {
    for (std::size_t v = 0; v < features_[f].cardinality(); ++v) {
      entries.push_back({{Item::Kind::kCondition, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(v)},
                         features_[f].name, value_rendering(features_[f], v)});
    }
  }
  // Total order: class items first, then lexicographic on (feature name, value rendering).
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.item.kind, a.feature_name, a.value) < std::tie(b.item.kind, b.feature_name, b.value);
  });

  condition_ids_.assign(features_.size(), {});
  for (std::size_t f = 0; f < features_.size(); ++f) condition_ids_[f].resize(features_[f].cardinality());

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto id = static_cast<ItemId>(i);
    const auto& e = entries[i];
    std::string text;
    if (e.item.kind == Item::Kind::kClass) {
      text = e.value;
      class_ids_[e.item.value] = id;
    } else {
      const bool cat = features_[e.item.feature].is_categorical();
      text = e.feature_name + (cat ? "=" : "∈") + e.value;
      condition_ids_[e.item.feature][e.item.value] = id;
    }
    if (!by_name_.emplace(text, id).second) {
      throw Error(ErrorKind::kSchemaMismatch, "ambiguous item rendering '" + text + "'");
    }
    items_.push_back(e.item);
    rendered_.push_back(std::move(text));
  }
}

void FeatureSchema::require_fitted() const {
  if (!fitted_) {
    throw Error(ErrorKind::kSchemaMismatch, "schema has continuous features without bin edges; run preprocess first");
  }
}

std::size_t FeatureSchema::item_count() const {
  require_fitted();
  return items_.size();
}

const Item& FeatureSchema::item(ItemId id) const {
  require_fitted();
  if (id >= items_.size()) throw Error(ErrorKind::kSchemaMismatch, "item id " + std::to_string(id) + " out of range");
  return items_[id];
}

const std::string& FeatureSchema::render(ItemId id) const {
  item(id);
  return rendered_[id];
}

std::optional<ItemId> FeatureSchema::find_item(std::string_view rendered) const {
  require_fitted();
  auto it = by_name_.find(std::string(rendered));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

ItemId FeatureSchema::parse_item(std::string_view rendered) const {
  auto id = find_item(rendered);
  if (!id) throw Error(ErrorKind::kSchemaMismatch, "unknown item '" + std::string(rendered) + "'");
  return *id;
}

ItemId FeatureSchema::class_item(int label_index) const {
  require_fitted();
  if (label_index < 0 || label_index > 1) throw Error(ErrorKind::kSchemaMismatch, "class index out of range");
  return class_ids_[label_index];
}

ItemId FeatureSchema::condition_item(std::size_t feature, std::size_t value) const {
  require_fitted();
  return condition_ids_.at(feature).at(value);
}

bool FeatureSchema::is_class_item(ItemId id) const { return item(id).kind == Item::Kind::kClass; }

int FeatureSchema::label_of(ItemId class_item_id) const {
  const auto& it = item(class_item_id);
  if (it.kind != Item::Kind::kClass) {
    throw Error(ErrorKind::kSchemaMismatch, "item '" + rendered_[class_item_id] + "' is not a class item");
  }
  return static_cast<int>(it.value);
}

std::vector<std::string> FeatureSchema::render_all(const ItemSet& items) const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (ItemId id : items) out.push_back(render(id));
  return out;
}

void validate_instance(const FeatureSchema& schema, const Instance& instance) {
  if (instance.values.size() != schema.feature_count()) {
    throw Error(ErrorKind::kSchemaMismatch, "instance '" + instance.id + "' has " +
                                                std::to_string(instance.values.size()) + " values, schema has " +
                                                std::to_string(schema.feature_count()) + " features");
  }
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const auto& spec = schema.feature(f);
    const auto& v = instance.values[f];
    if (spec.is_categorical()) {
      const auto* idx = std::get_if<std::size_t>(&v);
      if (idx == nullptr || *idx >= spec.categories().size()) {
        throw Error(ErrorKind::kUnknownCategory, "instance '" + instance.id + "': invalid value for '" + spec.name + "'");
      }
    } else {
      const auto* x = std::get_if<double>(&v);
      if (x == nullptr || !std::isfinite(*x)) {
        throw Error(ErrorKind::kSchemaMismatch, "instance '" + instance.id + "': non-finite value for '" + spec.name + "'");
      }
    }
  }
  if (instance.label && (*instance.label < 0 || *instance.label > 1)) {
    throw Error(ErrorKind::kSchemaMismatch, "instance '" + instance.id + "': label out of range");
  }
}

// --- predictions ---

const Prediction* BlackBoxPredictions::find(std::string_view id) const {
  auto it = by_id.find(std::string(id));
  return it == by_id.end() ? nullptr : &it->second;
}

const Prediction& BlackBoxPredictions::require(const std::string& id) const {
  const auto* p = find(id);
  if (p == nullptr) throw Error(ErrorKind::kIntegrity, "no black-box prediction for instance '" + id + "'");
  return *p;
}

// --- transactions and rules ---

ItemSet ExplanationItemset::transaction() const {
  ItemSet t = conditions;
  t.insert(std::upper_bound(t.begin(), t.end(), class_item), class_item);
  return t;
}

AssociationRule AssociationRule::from_counts(RuleMode mode, ItemSet antecedent, ItemSet consequent,
                                             std::size_t support, std::size_t antecedent_support) {
  AssociationRule r;
  r.mode = mode;
  r.antecedent = std::move(antecedent);
  r.consequent = std::move(consequent);
  r.support_count = support;
  r.antecedent_support = antecedent_support;
  r.confidence = antecedent_support == 0 ? 0.0
                                         : static_cast<double>(support) / static_cast<double>(antecedent_support);
  return r;
}

ItemId AssociationRule::class_item() const {
  const auto& side = mode == RuleMode::kCharacteristic ? antecedent : consequent;
  if (side.size() != 1) throw Error(ErrorKind::kSchemaMismatch, "rule does not carry a single class item");
  return side.front();
}

const ItemSet& AssociationRule::conditions() const {
  return mode == RuleMode::kCharacteristic ? consequent : antecedent;
}

void validate_rule(const AssociationRule& rule, const FeatureSchema& schema) {
  const auto& cls = rule.mode == RuleMode::kCharacteristic ? rule.antecedent : rule.consequent;
  const auto& cond = rule.conditions();
  if (cls.size() != 1 || !schema.is_class_item(cls.front())) {
    throw Error(ErrorKind::kSchemaMismatch,
                std::string(to_string(rule.mode)) + " rule must have a single class item on its " +
                    (rule.mode == RuleMode::kCharacteristic ? "antecedent" : "consequent") + " side");
  }
  if (cond.empty()) throw Error(ErrorKind::kSchemaMismatch, "rule has an empty condition side");
  for (ItemId id : cond) {
    if (schema.is_class_item(id)) throw Error(ErrorKind::kSchemaMismatch, "class item on the condition side of a rule");
  }
  if (!std::is_sorted(cond.begin(), cond.end()) || std::adjacent_find(cond.begin(), cond.end()) != cond.end()) {
    throw Error(ErrorKind::kSchemaMismatch, "rule conditions are not a canonical item set");
  }
  if (!(rule.confidence >= 0.0 && rule.confidence <= 1.0)) {
    throw Error(ErrorKind::kSchemaMismatch, "rule confidence outside [0,1]");
  }
}

__extension__ using Wide = unsigned __int128;

int compare_confidence(const AssociationRule& a, const AssociationRule& b) {
  if (a.antecedent_support > 0 && b.antecedent_support > 0) {
    const auto lhs = static_cast<Wide>(a.support_count) * b.antecedent_support;
    const auto rhs = static_cast<Wide>(b.support_count) * a.antecedent_support;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  return a.confidence < b.confidence ? -1 : (a.confidence > b.confidence ? 1 : 0);
}

bool rule_display_less(const AssociationRule& a, const AssociationRule& b) {
  if (int c = compare_confidence(a, b); c != 0) return c > 0;
  if (a.support_count != b.support_count) return a.support_count > b.support_count;
  return std::tie(a.antecedent, a.consequent, a.mode) < std::tie(b.antecedent, b.consequent, b.mode);
}

// --- config ---

std::size_t MiningConfig::resolved_min_support(ExplanationKind kind, std::size_t n_transactions) const {
  if (min_support_fraction) {
    const double raw = std::ceil(*min_support_fraction * static_cast<double>(n_transactions));
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
  }
  if (min_support) return *min_support;
  return kind == ExplanationKind::kScore ? kDefaultScoreSupport : kDefaultRuleSupport;
}

double MiningConfig::resolved_min_confidence() const {
  if (min_confidence) return *min_confidence;
  return mode == RuleMode::kDiscriminative ? kDefaultDiscriminativeConfidence : kDefaultCharacteristicConfidence;
}

void MiningConfig::validate() const {
  if (min_support && *min_support < 1) throw Error(ErrorKind::kInvalidArgument, "min_support must be >= 1");
  if (min_support_fraction && !(*min_support_fraction > 0.0 && *min_support_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "min_support_fraction must be in (0,1]");
  }
  if (min_confidence && !(*min_confidence > 0.0 && *min_confidence <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "min_confidence must be in (0,1]");
  }
  if (max_itemset_size && *max_itemset_size < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_itemset_size must be >= 1");
  }
  if (!(score_threshold >= 0.0) || !std::isfinite(score_threshold)) {
    throw Error(ErrorKind::kInvalidArgument, "score_threshold must be a finite value >= 0");
  }
}

}  // namespace ruleagg
