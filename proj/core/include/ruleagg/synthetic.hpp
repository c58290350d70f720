#pragma once

#include <cstdint>

#include "ruleagg/model.hpp"

namespace ruleagg {

// A generated binary task split into train/dev/test. Instances carry their
// ground-truth label.
struct SyntheticTask {
  FeatureSchema schema;
  Dataset train;
  Dataset dev;
  Dataset test;
};

struct SplitFractions {
  double train = 0.6;
  double dev = 0.2;  // test receives the remainder
};

// m-of-n concept: `n_features` uniform binary features x0.., labelled "pos"
// when at least `m` of the first `n_relevant` are 1. The default is the
// classic 3-of-7 over 10 features.
struct MofnParams {
  std::size_t n_instances = 2000;
  std::size_t m = 3;
  std::size_t n_relevant = 7;
  std::size_t n_features = 10;
  std::uint64_t seed = 0;
  SplitFractions split;
};

SyntheticTask make_mofn(const MofnParams& params);

// Single-rule concept: binary features a, b, c and pos ⇔ a=1.
SyntheticTask make_single_rule(std::size_t n_instances, std::uint64_t seed, SplitFractions split = {});

}  // namespace ruleagg
