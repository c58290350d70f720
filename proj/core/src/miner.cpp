#include "ruleagg/miner.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "ruleagg/error.hpp"

namespace ruleagg {

namespace {

struct ItemSetHash {
  std::size_t operator()(const ItemSet& s) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (ItemId id : s) {
      h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

using Bitset = std::vector<std::uint64_t>;

// Vertical layout: one transaction-id bitset per item.
class TidIndex {
 public:
  TidIndex(std::span<const ItemSet> transactions) : words_((transactions.size() + 63) / 64) {
    ItemId max_id = 0;
    for (const auto& t : transactions) {
      if (!t.empty()) max_id = std::max(max_id, t.back());
    }
    bits_.assign(transactions.empty() ? 0 : static_cast<std::size_t>(max_id) + 1, Bitset(words_, 0));
    for (std::size_t tid = 0; tid < transactions.size(); ++tid) {
      for (ItemId id : transactions[tid]) bits_[id][tid / 64] |= std::uint64_t{1} << (tid % 64);
    }
  }

  std::size_t item_universe() const { return bits_.size(); }
  const Bitset& item(ItemId id) const { return bits_[id]; }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<Bitset> bits_;
};

std::size_t popcount(const Bitset& b) {
  std::size_t n = 0;
  for (auto w : b) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t and_popcount(const Bitset& a, const Bitset& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return n;
}

Bitset and_of(const Bitset& a, const Bitset& b) {
  Bitset out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

bool all_subsets_frequent(const ItemSet& candidate, const std::unordered_set<ItemSet, ItemSetHash>& previous) {
  // The two subsets dropping one of the last two items are the join parents.
  ItemSet subset(candidate.size() - 1);
  for (std::size_t skip = 0; skip + 2 < candidate.size(); ++skip) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      if (i != skip) subset[k++] = candidate[i];
    }
    if (!previous.contains(subset)) return false;
  }
  return true;
}

}  // namespace

std::vector<FrequentItemset> frequent_itemsets(std::span<const ItemSet> transactions, std::size_t min_support,
                                               std::optional<std::size_t> max_size) {
  if (min_support < 1) throw Error(ErrorKind::kInvalidArgument, "min_support must be >= 1");
  for (const auto& t : transactions) {
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end()) {
      throw Error(ErrorKind::kInvalidArgument, "transactions must be sorted, duplicate-free item sets");
    }
  }
  std::vector<FrequentItemset> result;
  if (transactions.size() < min_support || (max_size && *max_size == 0)) return result;

  const TidIndex index(transactions);

  std::vector<FrequentItemset> level;
  for (ItemId id = 0; id < index.item_universe(); ++id) {
    const std::size_t sup = popcount(index.item(id));
    if (sup >= min_support) level.push_back({{id}, sup});
  }

  std::size_t size = 1;
  while (!level.empty()) {
    result.insert(result.end(), level.begin(), level.end());
    if (max_size && size >= *max_size) break;

    std::unordered_set<ItemSet, ItemSetHash> previous;
    previous.reserve(level.size() * 2);
    for (const auto& f : level) previous.insert(f.items);

    std::vector<FrequentItemset> next;
    // `level` is lexicographically sorted, so itemsets sharing a (size-1)
    // prefix are contiguous.
    std::size_t group_begin = 0;
    while (group_begin < level.size()) {
      std::size_t group_end = group_begin + 1;
      while (group_end < level.size() &&
             std::equal(level[group_begin].items.begin(), level[group_begin].items.end() - 1,
                        level[group_end].items.begin())) {
        ++group_end;
      }
      if (group_end - group_begin >= 2) {
        Bitset prefix_bits(index.words(), ~std::uint64_t{0});
        const auto& first = level[group_begin].items;
        for (std::size_t i = 0; i + 1 < first.size(); ++i) prefix_bits = and_of(prefix_bits, index.item(first[i]));

        for (std::size_t i = group_begin; i < group_end; ++i) {
          const Bitset left_bits = and_of(prefix_bits, index.item(level[i].items.back()));
          for (std::size_t j = i + 1; j < group_end; ++j) {
            ItemSet candidate = level[i].items;
            candidate.push_back(level[j].items.back());
            if (!all_subsets_frequent(candidate, previous)) continue;
            const std::size_t sup = and_popcount(left_bits, index.item(candidate.back()));
            if (sup >= min_support) next.push_back({std::move(candidate), sup});
          }
        }
      }
      group_begin = group_end;
    }
    level = std::move(next);
    ++size;
  }
  return result;
}

std::vector<FrequentItemset> frequent_itemsets(std::span<const ExplanationItemset> transactions,
                                               std::size_t min_support, std::optional<std::size_t> max_size) {
  std::vector<ItemSet> flat;
  flat.reserve(transactions.size());
  for (const auto& t : transactions) flat.push_back(t.transaction());
  return frequent_itemsets(flat, min_support, max_size);
}

std::vector<AssociationRule> derive_rules(std::span<const FrequentItemset> frequents, double min_confidence,
                                          RuleMode mode, const std::function<bool(ItemId)>& is_class_item) {
  std::unordered_map<ItemSet, std::size_t, ItemSetHash> support;
  support.reserve(frequents.size() * 2);
  for (const auto& f : frequents) support.emplace(f.items, f.support_count);

  std::vector<AssociationRule> rules;
  for (const auto& f : frequents) {
    if (f.items.size() < 2) continue;
    std::size_t class_count = 0;
    ItemId cls = 0;
    ItemSet conditions;
    for (ItemId id : f.items) {
      if (is_class_item(id)) {
        ++class_count;
        cls = id;
      } else {
        conditions.push_back(id);
      }
    }
    if (class_count != 1) continue;

    const ItemSet& denominator_set = mode == RuleMode::kCharacteristic ? ItemSet{cls} : conditions;
    auto it = support.find(denominator_set);
    // Downward closure guarantees every subset of a frequent itemset is present.
    assert(it != support.end() && it->second > 0);
    if (it == support.end() || it->second == 0) {
      throw Error(ErrorKind::kIntegrity, "frequent itemsets are not closed under subsets");
    }
    const std::size_t denominator = it->second;
    const double confidence = static_cast<double>(f.support_count) / static_cast<double>(denominator);
    if (confidence < min_confidence) continue;

    if (mode == RuleMode::kCharacteristic) {
      rules.push_back(AssociationRule::from_counts(mode, {cls}, std::move(conditions), f.support_count, denominator));
    } else {
      rules.push_back(AssociationRule::from_counts(mode, std::move(conditions), {cls}, f.support_count, denominator));
    }
  }
  std::sort(rules.begin(), rules.end(), rule_display_less);
  return rules;
}

std::vector<AssociationRule> derive_rules(std::span<const FrequentItemset> frequents, double min_confidence,
                                          RuleMode mode, const FeatureSchema& schema) {
  return derive_rules(frequents, min_confidence, mode, [&schema](ItemId id) { return schema.is_class_item(id); });
}

}  // namespace ruleagg
