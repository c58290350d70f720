#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruleagg/itemsets.hpp"
#include "ruleagg/model.hpp"
#include "ruleagg/preprocess.hpp"

namespace ruleagg {

// Node of a binary tree over item tests. Internal nodes send instances that
// contain `test` right and the rest left. Every node keeps its class counts.
struct TreeNode {
  std::optional<ItemId> test;
  int left = -1;
  int right = -1;
  std::array<std::size_t, 2> counts{0, 0};

  bool is_leaf() const { return !test.has_value(); }
};

struct TreeParams {
  std::size_t max_depth = 6;
  std::size_t min_leaf = 1;
  std::uint64_t seed = 0;  // breaks ties among equal-gain splits
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, TreeParams params, int positive_label);

  double positive_probability(const EncodedInstance& instance) const;
  int predict(const EncodedInstance& instance) const;
  std::size_t depth() const;
  // Items tested anywhere in the tree.
  ItemSet used_items() const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  int positive_label() const { return positive_label_; }

 private:
  const TreeNode& leaf_for(const EncodedInstance& instance) const;

  std::vector<TreeNode> nodes_;
  TreeParams params_;
  int positive_label_ = 1;
};

// Greedy Gini splits; a node becomes a leaf when pure, at max depth, or when
// no split leaves min_leaf instances on both sides.
DecisionTree train_tree(std::span<const EncodedInstance> train, std::span<const int> labels,
                        const FeatureSchema& schema, const TreeParams& params);

// Uses each instance's ground-truth label.
DecisionTree train_tree(const Dataset& train, const FeatureSchema& schema, const TreeParams& params);

std::string tree_to_json(const DecisionTree& tree, const FeatureSchema& schema);
DecisionTree tree_from_json(std::string_view json, const FeatureSchema& schema);

BlackBoxPredictions predict_all(const DecisionTree& tree, const Dataset& data, const FeatureSchema& schema);

struct OcclusionParams {
  std::size_t n_samples = 50;
  std::uint64_t seed = 0;
};

// Score of feature f = mean over samples of
//   P(pos | x) - P(pos | x with f resampled from the train marginal),
// attached to x's active item for f. Seeded per instance id, so results do not
// depend on batch order.
LocalExplanation explain_occlusion(const DecisionTree& tree, const Instance& instance, const Dataset& train,
                                   const FeatureSchema& schema, const OcclusionParams& params);

std::vector<LocalExplanation> explain_all(const DecisionTree& tree, const Dataset& data, const Dataset& train,
                                          const FeatureSchema& schema, const OcclusionParams& params);

}  // namespace ruleagg
