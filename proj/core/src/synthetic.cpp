#include "ruleagg/synthetic.hpp"

#include <cstdio>
#include <functional>
#include <string>

#include "ruleagg/error.hpp"
#include "ruleagg/random.hpp"

namespace ruleagg {

namespace {

std::string instance_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "i%06zu", i);
  return buf;
}

SyntheticTask generate(std::vector<std::string> names, std::size_t n, std::uint64_t seed, SplitFractions split,
                       const std::function<bool(const std::vector<std::size_t>&)>& is_positive) {
  if (!(split.train > 0 && split.dev > 0 && split.train + split.dev < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "split fractions must be positive and leave room for test");
  }
  std::vector<FeatureSpec> features;
  for (auto& name : names) features.push_back({std::move(name), CategoricalSpec{{"0", "1"}}});
  SyntheticTask task{FeatureSchema(std::move(features), {"neg", "pos"}, "pos"), {Split::kTrain, {}},
                     {Split::kDev, {}}, {Split::kTest, {}}};

  Rng rng(splitmix64(seed));
  const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * split.train);
  const auto n_dev = static_cast<std::size_t>(static_cast<double>(n) * split.dev);
  const int pos = task.schema.positive_index();
  for (std::size_t i = 0; i < n; ++i) {
    Instance inst;
    inst.id = instance_name(i);
    std::vector<std::size_t> bits(task.schema.feature_count());
    for (auto& b : bits) {
      b = static_cast<std::size_t>(rng() >> 63);
      inst.values.emplace_back(b);
    }
    inst.label = is_positive(bits) ? pos : 1 - pos;
    Dataset& target = i < n_train ? task.train : (i < n_train + n_dev ? task.dev : task.test);
    target.instances.push_back(std::move(inst));
  }
  return task;
}

}  // namespace

SyntheticTask make_mofn(const MofnParams& p) {
  if (p.n_relevant > p.n_features || p.m > p.n_relevant || p.m == 0) {
    throw Error(ErrorKind::kInvalidArgument, "m-of-n parameters need 0 < m <= n_relevant <= n_features");
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p.n_features; ++i) names.push_back("x" + std::to_string(i));
  return generate(std::move(names), p.n_instances, p.seed, p.split, [&](const std::vector<std::size_t>& bits) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < p.n_relevant; ++i) ones += bits[i];
    return ones >= p.m;
  });
}

SyntheticTask make_single_rule(std::size_t n_instances, std::uint64_t seed, SplitFractions split) {
  return generate({"a", "b", "c"}, n_instances, seed, split,
                  [](const std::vector<std::size_t>& bits) { return bits[0] == 1; });
}

}  // namespace ruleagg
