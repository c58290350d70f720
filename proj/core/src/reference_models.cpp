#include "ruleagg/reference_models.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "ruleagg/error.hpp"
#include "ruleagg/random.hpp"

namespace ruleagg {

namespace {

double gini(std::size_t a, std::size_t b) {
  const double n = static_cast<double>(a + b);
  if (n == 0) return 0.0;
  const double pa = static_cast<double>(a) / n;
  const double pb = static_cast<double>(b) / n;
  return 1.0 - pa * pa - pb * pb;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const EncodedInstance> data, std::span<const int> labels, std::vector<ItemId> candidates,
              const TreeParams& params)
      : data_(data), labels_(labels), candidates_(std::move(candidates)), params_(params), rng_(params.seed) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(data_.size());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  int grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::array<std::size_t, 2> counts{0, 0};
    for (auto r : rows) ++counts[static_cast<std::size_t>(labels_[r])];
    nodes_[static_cast<std::size_t>(index)].counts = counts;
    if (depth >= params_.max_depth || counts[0] == 0 || counts[1] == 0) return index;

    const double parent = gini(counts[0], counts[1]);
    const double n = static_cast<double>(rows.size());
    constexpr double kTieTolerance = 1e-12;
    double best_gain = -1.0;
    std::vector<ItemId> best;
    for (ItemId item : candidates_) {
      std::array<std::size_t, 2> in{0, 0};
      for (auto r : rows) {
        const auto& active = data_[r].active_items;
        if (std::binary_search(active.begin(), active.end(), item)) ++in[static_cast<std::size_t>(labels_[r])];
      }
      const std::size_t n_in = in[0] + in[1];
      const std::size_t n_out = rows.size() - n_in;
      if (n_in < std::max<std::size_t>(1, params_.min_leaf) || n_out < std::max<std::size_t>(1, params_.min_leaf)) {
        continue;
      }
      const double child = (static_cast<double>(n_in) * gini(in[0], in[1]) +
                            static_cast<double>(n_out) * gini(counts[0] - in[0], counts[1] - in[1])) /
                           n;
      const double gain = parent - child;
      if (gain > best_gain + kTieTolerance) {
        best_gain = gain;
        best.assign(1, item);
      } else if (std::abs(gain - best_gain) <= kTieTolerance) {
        best.push_back(item);
      }
    }
    if (best.empty()) return index;

    const ItemId split = best[uniform_index(rng_, best.size())];
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto r : rows) {
      const auto& active = data_[r].active_items;
      (std::binary_search(active.begin(), active.end(), split) ? right : left).push_back(r);
    }
    nodes_[static_cast<std::size_t>(index)].test = split;
    const int l = grow(left, depth + 1);
    const int rr = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(index)].left = l;
    nodes_[static_cast<std::size_t>(index)].right = rr;
    return index;
  }

  std::span<const EncodedInstance> data_;
  std::span<const int> labels_;
  std::vector<ItemId> candidates_;
  TreeParams params_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
};

Rng instance_rng(std::uint64_t seed, std::string_view id) { return Rng(splitmix64(seed ^ fnv1a(id))); }

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, TreeParams params, int positive_label)
    : nodes_(std::move(nodes)), params_(params), positive_label_(positive_label) {
  if (nodes_.empty()) throw Error(ErrorKind::kInvalidArgument, "a tree needs at least one node");
  for (const auto& n : nodes_) {
    if (n.is_leaf()) continue;
    const auto size = static_cast<int>(nodes_.size());
    if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size) {
      throw Error(ErrorKind::kParse, "tree node has invalid children");
    }
  }
}

const TreeNode& DecisionTree::leaf_for(const EncodedInstance& instance) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const auto& active = instance.active_items;
    const bool has = std::binary_search(active.begin(), active.end(), *node->test);
    node = &nodes_[static_cast<std::size_t>(has ? node->right : node->left)];
  }
  return *node;
}

double DecisionTree::positive_probability(const EncodedInstance& instance) const {
  const auto& leaf = leaf_for(instance);
  const std::size_t total = leaf.counts[0] + leaf.counts[1];
  if (total == 0) return 0.5;
  return static_cast<double>(leaf.counts[static_cast<std::size_t>(positive_label_)]) / static_cast<double>(total);
}

int DecisionTree::predict(const EncodedInstance& instance) const {
  return positive_probability(instance) > 0.5 ? positive_label_ : 1 - positive_label_;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    deepest = std::max(deepest, d[i]);
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
  }
  return deepest;
}

ItemSet DecisionTree::used_items() const {
  std::vector<ItemId> items;
  for (const auto& n : nodes_) {
    if (n.test) items.push_back(*n.test);
  }
  return make_item_set(std::move(items));
}

DecisionTree train_tree(std::span<const EncodedInstance> train, std::span<const int> labels,
                        const FeatureSchema& schema, const TreeParams& params) {
  if (train.size() != labels.size()) throw Error(ErrorKind::kInvalidArgument, "labels must cover the training set");
  if (params.max_depth < 1) throw Error(ErrorKind::kInvalidArgument, "max_depth must be >= 1");
  if (train.empty()) throw Error(ErrorKind::kCannotFit, "cannot train a tree on an empty split");
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(ErrorKind::kInvalidArgument, "labels must be class indices 0 or 1");
  }
  std::vector<ItemId> candidates;
  for (ItemId id = 0; id < schema.item_count(); ++id) {
    if (!schema.is_class_item(id)) candidates.push_back(id);
  }
  TreeBuilder builder(train, labels, std::move(candidates), params);
  return DecisionTree(builder.build(), params, schema.positive_index());
}

DecisionTree train_tree(const Dataset& train, const FeatureSchema& schema, const TreeParams& params) {
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& inst : train.instances) {
    if (!inst.label) throw Error(ErrorKind::kIntegrity, "training instance '" + inst.id + "' has no label");
    labels.push_back(*inst.label);
  }
  const auto encoded = encode_all(train, schema);
  return train_tree(encoded, labels, schema, params);
}

std::string tree_to_json(const DecisionTree& tree, const FeatureSchema& schema) {
  nlohmann::ordered_json doc;
  doc["max_depth"] = tree.params().max_depth;
  doc["min_leaf"] = tree.params().min_leaf;
  doc["seed"] = tree.params().seed;
  doc["positive"] = schema.class_label(tree.positive_label()).name;
  auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : tree.nodes()) {
    nlohmann::ordered_json node;
    node["counts"] = {{schema.class_label(0).name, n.counts[0]}, {schema.class_label(1).name, n.counts[1]}};
    if (n.test) {
      node["test"] = schema.render(*n.test);
      node["left"] = n.left;
      node["right"] = n.right;
    }
    nodes.push_back(std::move(node));
  }
  return doc.dump(2) + "\n";
}

DecisionTree tree_from_json(std::string_view json, const FeatureSchema& schema) {
  try {
    const auto doc = nlohmann::json::parse(json);
    TreeParams params;
    params.max_depth = doc.at("max_depth").get<std::size_t>();
    params.min_leaf = doc.at("min_leaf").get<std::size_t>();
    params.seed = doc.value("seed", std::uint64_t{0});
    std::vector<TreeNode> nodes;
    for (const auto& jn : doc.at("nodes")) {
      TreeNode n;
      for (int c = 0; c < 2; ++c) {
        n.counts[static_cast<std::size_t>(c)] = jn.at("counts").at(schema.class_label(c).name).get<std::size_t>();
      }
      if (jn.contains("test")) {
        n.test = schema.parse_item(jn.at("test").get<std::string>());
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
      }
      nodes.push_back(n);
    }
    return DecisionTree(std::move(nodes), params, schema.require_label(doc.at("positive").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid tree document: ") + e.what());
  }
}

BlackBoxPredictions predict_all(const DecisionTree& tree, const Dataset& data, const FeatureSchema& schema) {
  BlackBoxPredictions out;
  for (const auto& inst : data.instances) {
    const auto enc = encode(inst, schema);
    const double p = tree.positive_probability(enc);
    out.by_id[inst.id] = Prediction{tree.predict(enc), p};
  }
  return out;
}

LocalExplanation explain_occlusion(const DecisionTree& tree, const Instance& instance, const Dataset& train,
                                   const FeatureSchema& schema, const OcclusionParams& params) {
  if (train.empty()) throw Error(ErrorKind::kInvalidArgument, "occlusion needs a non-empty training split");
  if (params.n_samples == 0) throw Error(ErrorKind::kInvalidArgument, "occlusion needs n_samples >= 1");
  const EncodedInstance base = encode(instance, schema);
  const double p_base = tree.positive_probability(base);

  LocalExplanation out;
  out.instance_id = instance.id;
  out.predicted_label = tree.predict(base);
  ScoreForm scores;

  Rng rng = instance_rng(params.seed, instance.id);
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const auto& spec = schema.feature(f);
    auto value_item = [&](const RawValue& v) {
      const std::size_t value =
          spec.is_categorical() ? std::get<std::size_t>(v) : bin_index(spec.edges(), std::get<double>(v));
      return schema.condition_item(f, value);
    };
    const ItemId own = value_item(instance.values[f]);
    double diff_sum = 0.0;
    for (std::size_t s = 0; s < params.n_samples; ++s) {
      const auto& donor = train.instances[uniform_index(rng, train.size())];
      const ItemId replacement = value_item(donor.values[f]);
      EncodedInstance perturbed = base;
      if (replacement != own) {
        std::erase(perturbed.active_items, own);
        perturbed.active_items.insert(
            std::upper_bound(perturbed.active_items.begin(), perturbed.active_items.end(), replacement), replacement);
      }
      diff_sum += p_base - tree.positive_probability(perturbed);
    }
    scores.scores.emplace_back(own, diff_sum / static_cast<double>(params.n_samples));
  }
  out.form = std::move(scores);
  return out;
}

std::vector<LocalExplanation> explain_all(const DecisionTree& tree, const Dataset& data, const Dataset& train,
                                          const FeatureSchema& schema, const OcclusionParams& params) {
  std::vector<LocalExplanation> out;
  out.reserve(data.size());
  for (const auto& inst : data.instances) out.push_back(explain_occlusion(tree, inst, train, schema, params));
  return out;
}

}  // namespace ruleagg
