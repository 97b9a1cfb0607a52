#include <benchmark/benchmark.h>

#include "bagclean/encoder.hpp"
#include "bagclean/policy.hpp"
#include "bagclean/rng.hpp"

namespace {

using namespace bagclean;

encoder::StateVector make_state(int d_s, int d_e, Rng& rng) {
  Vec sel(d_s), cand(d_s), rel(d_e);
  for (auto& v : sel) v = rng.gaussian();
  for (auto& v : cand) v = rng.gaussian();
  for (auto& v : rel) v = rng.gaussian();
  return {sel, cand, rel};
}

void BM_ActionDistribution(benchmark::State& state) {
  const int d_s = 64, d_e = 50;
  Rng rng(7);
  auto params = policy::PolicyParams::zero(2 * d_s + d_e);
  for (auto& row : params.weight)
    for (auto& v : row) v = 0.1 * rng.gaussian();
  const auto s = make_state(d_s, d_e, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy::action_distribution(s, params));
  }
}
BENCHMARK(BM_ActionDistribution);

void BM_GradLogPolicy(benchmark::State& state) {
  const int d_s = 64, d_e = 50;
  Rng rng(7);
  auto params = policy::PolicyParams::zero(2 * d_s + d_e);
  for (auto& row : params.weight)
    for (auto& v : row) v = 0.1 * rng.gaussian();
  const auto s = make_state(d_s, d_e, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy::grad_log_policy(s, 1, params));
  }
}
BENCHMARK(BM_GradLogPolicy);

}  // namespace

BENCHMARK_MAIN();
