#pragma once

#include <string>
#include <vector>

#include "ruleagg/model.hpp"

namespace ruleagg {

inline constexpr std::size_t kDefaultBinCount = 5;

// The set of items active for one instance: exactly one item per feature.
struct EncodedInstance {
  std::string instance_id;
  ItemSet active_items;
};

// Equal-width bin edges for every continuous feature, computed from `train`
// only. A feature that is constant on train degrades to a single bin and a
// message is appended to `warnings` when given.
FeatureSchema fit_bins(const FeatureSchema& schema, const Dataset& train, std::size_t n_bins = kDefaultBinCount,
                       std::vector<std::string>* warnings = nullptr);

// Bins are [lo, hi); the first bin is open below and the last closed above, so
// out-of-range values clamp to the extreme bins.
std::size_t bin_index(const std::vector<double>& edges, double x);

EncodedInstance encode(const Instance& instance, const FeatureSchema& schema);
std::vector<EncodedInstance> encode_all(const Dataset& data, const FeatureSchema& schema);

// conditions ⊆ active items.
bool matches(const EncodedInstance& encoded, const ItemSet& conditions);

}  // namespace ruleagg
