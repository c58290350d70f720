#include "ruleagg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ruleagg/error.hpp"

namespace ruleagg {

FeatureSchema fit_bins(const FeatureSchema& schema, const Dataset& train, std::size_t n_bins,
                       std::vector<std::string>* warnings) {
  if (train.empty()) throw Error(ErrorKind::kCannotFit, "cannot fit bins on an empty training split");
  if (n_bins < 1) throw Error(ErrorKind::kInvalidArgument, "bin count must be >= 1");

  std::vector<std::optional<std::vector<double>>> edges(schema.feature_count());
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    if (schema.feature(f).is_categorical()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& inst : train.instances) {
      if (inst.values.size() != schema.feature_count()) validate_instance(schema, inst);
      const auto* x = std::get_if<double>(&inst.values[f]);
      if (x == nullptr || !std::isfinite(*x)) {
        throw Error(ErrorKind::kSchemaMismatch,
                    "instance '" + inst.id + "': non-finite value for '" + schema.feature(f).name + "'");
      }
      lo = std::min(lo, *x);
      hi = std::max(hi, *x);
    }
    std::vector<double> cuts;
    if (lo == hi) {
      if (warnings != nullptr) {
        warnings->push_back("feature '" + schema.feature(f).name + "' is constant on train; using a single bin");
      }
    } else {
      const double width = hi - lo;
      for (std::size_t i = 1; i < n_bins; ++i) {
        cuts.push_back(lo + width * static_cast<double>(i) / static_cast<double>(n_bins));
      }
      // Adjacent cuts can collapse for extremely narrow ranges.
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }
    edges[f] = std::move(cuts);
  }
  return schema.with_edges(edges);
}

std::size_t bin_index(const std::vector<double>& edges, double x) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

EncodedInstance encode(const Instance& instance, const FeatureSchema& schema) {
  validate_instance(schema, instance);
  EncodedInstance out;
  out.instance_id = instance.id;
  out.active_items.reserve(schema.feature_count());
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const auto& spec = schema.feature(f);
    const std::size_t value = spec.is_categorical() ? std::get<std::size_t>(instance.values[f])
                                                    : bin_index(spec.edges(), std::get<double>(instance.values[f]));
    out.active_items.push_back(schema.condition_item(f, value));
  }
  std::sort(out.active_items.begin(), out.active_items.end());
  return out;
}

std::vector<EncodedInstance> encode_all(const Dataset& data, const FeatureSchema& schema) {
  std::vector<EncodedInstance> out;
  out.reserve(data.size());
  for (const auto& inst : data.instances) out.push_back(encode(inst, schema));
  return out;
}

bool matches(const EncodedInstance& encoded, const ItemSet& conditions) {
  return is_subset(conditions, encoded.active_items);
}

}  // namespace ruleagg
