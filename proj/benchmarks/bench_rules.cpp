#include <benchmark/benchmark.h>

#include "bagclean/datagen.hpp"
#include "bagclean/rules.hpp"

namespace {

using namespace bagclean;

void BM_InMatchedSet(benchmark::State& state) {
  datagen::GenConfig config;
  config.n_bags = 100;
  config.rule_coverage = 0.1;
  config.seed = 3;
  const auto gen = datagen::generate(config);
  for (auto _ : state) {
    long matched = 0;
    for (const auto& bag : gen.dataset.bags) {
      for (const auto& x : bag.instances) {
        matched += rules::in_matched_set(gen.rule_set, x, bag.relation);
      }
    }
    benchmark::DoNotOptimize(matched);
  }
}
BENCHMARK(BM_InMatchedSet);

}  // namespace
