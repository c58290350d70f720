#pragma once

#include <string>
#include <vector>

#include "ruleagg/model.hpp"
#include "ruleagg/preprocess.hpp"

namespace fixtures {

using namespace ruleagg;

inline FeatureSpec categorical(std::string name, std::vector<std::string> values) {
  return {std::move(name), CategoricalSpec{std::move(values)}};
}

inline FeatureSpec continuous(std::string name, std::optional<std::vector<double>> edges = std::nullopt) {
  return {std::move(name), ContinuousSpec{std::move(edges)}};
}

// a ∈ {0,1,2}, b ∈ {0,1,2}, c ∈ {0,1}; classes neg / pos.
inline FeatureSchema abc_schema() {
  return FeatureSchema({categorical("a", {"0", "1", "2"}), categorical("b", {"0", "1", "2"}),
                        categorical("c", {"0", "1"})},
                       {"neg", "pos"}, "pos");
}

inline ItemSet items(const FeatureSchema& schema, std::initializer_list<const char*> rendered) {
  std::vector<ItemId> ids;
  for (const char* r : rendered) ids.push_back(schema.parse_item(r));
  return make_item_set(std::move(ids));
}

inline Instance instance(std::string id, std::vector<RawValue> values, std::optional<int> label = std::nullopt) {
  return {std::move(id), std::move(values), label};
}

inline ItemId pos(const FeatureSchema& s) { return s.class_item(s.positive_index()); }
inline ItemId neg(const FeatureSchema& s) { return s.class_item(s.negative_index()); }

}  // namespace fixtures
