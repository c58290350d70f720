#include <benchmark/benchmark.h>

#include <random>

#include "ruleagg/miner.hpp"
#include "ruleagg/pipeline.hpp"
#include "ruleagg/synthetic.hpp"

using namespace ruleagg;

namespace {

// Zipf-like item popularity so that a few hundred itemsets are frequent.
std::vector<ItemSet> basket_db(std::size_t n_tx, std::size_t n_items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> weights(n_items);
  for (std::size_t i = 0; i < n_items; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<ItemSet> db(n_tx);
  for (auto& t : db) {
    std::vector<ItemId> ids;
    const std::size_t len = 3 + rng() % 8;
    for (std::size_t k = 0; k < len; ++k) ids.push_back(static_cast<ItemId>(pick(rng)));
    t = make_item_set(std::move(ids));
  }
  return db;
}

void BM_FrequentItemsets(benchmark::State& state) {
  const auto db = basket_db(static_cast<std::size_t>(state.range(0)), 200, 1);
  std::size_t n = 0;
  for (auto _ : state) {
    auto fs = frequent_itemsets(std::span<const ItemSet>(db), 10, 5);
    n = fs.size();
    benchmark::DoNotOptimize(fs);
  }
  state.counters["frequent"] = static_cast<double>(n);
}
BENCHMARK(BM_FrequentItemsets)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DeriveRules(benchmark::State& state) {
  auto db = basket_db(10000, 200, 2);
  for (auto& t : db) {
    t.erase(std::remove_if(t.begin(), t.end(), [](ItemId id) { return id < 2; }), t.end());
    t.insert(t.begin(), static_cast<ItemId>(t.size() % 2));
  }
  const auto fs = frequent_itemsets(std::span<const ItemSet>(db), 10, 5);
  for (auto _ : state) {
    auto rules = derive_rules(fs, 0.1, RuleMode::kDiscriminative, [](ItemId id) { return id < 2; });
    benchmark::DoNotOptimize(rules);
  }
}
BENCHMARK(BM_DeriveRules)->Unit(benchmark::kMillisecond);

void BM_MofnPipeline(benchmark::State& state) {
  const auto task = make_mofn({});
  const auto in = reference_inputs(task.schema, task.train, task.dev, task.test, {}, 0);
  MiningConfig m;
  m.mode = RuleMode::kDiscriminative;
  for (auto _ : state) {
    auto r = run_pipeline(in, m, {});
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MofnPipeline)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
