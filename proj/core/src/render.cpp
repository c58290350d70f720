#include "ruleagg/render.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

#include "ruleagg/error.hpp"

namespace ruleagg {

namespace {

constexpr std::string_view kArrow = " → ";
constexpr std::string_view kAnd = " ∧ ";

std::string join(const ItemSet& items, const FeatureSchema& schema) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += kAnd;
    out += schema.render(items[i]);
  }
  return out;
}

ItemSet split_items(std::string_view text, const FeatureSchema& schema) {
  std::vector<ItemId> ids;
  while (true) {
    const auto pos = text.find(kAnd);
    ids.push_back(schema.parse_item(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + kAnd.size());
  }
  return make_item_set(std::move(ids));
}

template <typename T>
T parse_number(std::string_view field, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kParse, "bad " + std::string(field) + " value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string canonical_render(const AssociationRule& rule, const FeatureSchema& schema) {
  validate_rule(rule, schema);
  char stats[96];
  std::snprintf(stats, sizeof(stats), " (conf=%.3f, sup=%zu", rule.confidence, rule.support_count);
  std::string out = join(rule.antecedent, schema) + std::string(kArrow) + join(rule.consequent, schema) + stats;
  if (rule.antecedent_support > 0) out += ", ante=" + std::to_string(rule.antecedent_support);
  out += ")";
  return out;
}

AssociationRule parse_rule(std::string_view text, const FeatureSchema& schema) {
  const auto stats_pos = text.rfind(" (conf=");
  const auto arrow = text.find(kArrow);
  if (stats_pos == std::string_view::npos || arrow == std::string_view::npos || arrow > stats_pos ||
      text.back() != ')') {
    throw Error(ErrorKind::kParse, "not a rendered rule: '" + std::string(text) + "'");
  }
  const auto lhs = text.substr(0, arrow);
  const auto rhs = text.substr(arrow + kArrow.size(), stats_pos - arrow - kArrow.size());

  std::string_view stats = text.substr(stats_pos + 2, text.size() - stats_pos - 3);
  double conf = 0.0;
  std::size_t sup = 0;
  std::size_t ante = 0;
  while (!stats.empty()) {
    const auto comma = stats.find(", ");
    const auto field = stats.substr(0, comma);
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::kParse, "bad rule statistics in '" + std::string(text) + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "conf") {
      conf = parse_number<double>(key, value);
    } else if (key == "sup") {
      sup = parse_number<std::size_t>(key, value);
    } else if (key == "ante") {
      ante = parse_number<std::size_t>(key, value);
    } else {
      throw Error(ErrorKind::kParse, "unknown rule statistic '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    stats.remove_prefix(comma + 2);
  }

  ItemSet antecedent = split_items(lhs, schema);
  ItemSet consequent = split_items(rhs, schema);
  const bool class_first = antecedent.size() == 1 && schema.is_class_item(antecedent.front());
  const RuleMode mode = class_first ? RuleMode::kCharacteristic : RuleMode::kDiscriminative;

  AssociationRule rule;
  if (ante > 0) {
    rule = AssociationRule::from_counts(mode, std::move(antecedent), std::move(consequent), sup, ante);
  } else {
    rule.mode = mode;
    rule.antecedent = std::move(antecedent);
    rule.consequent = std::move(consequent);
    rule.support_count = sup;
    rule.confidence = conf;
  }
  validate_rule(rule, schema);
  return rule;
}

}  // namespace ruleagg
