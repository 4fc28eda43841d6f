#include <benchmark/benchmark.h>

#include <random>

#include "ccg/congestion.hpp"
#include "ccg/equilibrium.hpp"
#include "ccg/zdd.hpp"

using namespace ccg;

namespace {

Network grid(int n) {
  std::vector<Edge> edges;
  auto id = [n](int r, int c) { return static_cast<NodeId>(r * n + c + 1); };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) edges.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < n) edges.push_back({id(r, c), id(r + 1, c)});
    }
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  std::vector<double> w(edges.size());
  for (double& x : w) x = unit(rng);
  return Network(n * n, edges, w);
}

StPaths corners(int n) { return {1, static_cast<NodeId>(n * n)}; }

void BM_BuildStPaths(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Network net = grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(build_family(net, corners(n)).node_count());
}
BENCHMARK(BM_BuildStPaths)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MinCost(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Network net = grid(n);
  const Zdd z = build_family(net, corners(n));
  const std::vector<double> w(net.weights().begin(), net.weights().end());
  for (auto _ : state) benchmark::DoNotOptimize(min_cost(z, w).cost);
  state.counters["zdd_nodes"] = static_cast<double>(z.node_count());
}
BENCHMARK(BM_MinCost)->Arg(6)->Arg(8);

void BM_SubsampledLmo(benchmark::State& state) {
  const Network net = grid(8);
  const Zdd z = build_family(net, corners(8));
  const ZddSampler sampler(z, static_cast<SamplingScheme>(state.range(0)));
  const std::vector<double> w(net.weights().begin(), net.weights().end());
  Rng rng(3);
  const auto m = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(subsampled_lmo(sampler, m, w, rng).cost);
}
BENCHMARK(BM_SubsampledLmo)->ArgsProduct({{0, 1, 2}, {1, 16}});

void BM_FrankWolfe(benchmark::State& state) {
  const Network net = grid(6);
  const Zdd z = build_family(net, corners(6));
  const FractionalCost model(std::vector<double>(net.weights().begin(), net.weights().end()), 10.0);
  const std::vector<double> theta(net.edge_count(), 1.0);
  FwOptions o;
  o.T = static_cast<std::size_t>(state.range(0));
  o.gap_every = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fw_equilibrium(model, theta, LmoConfig::zdd_exact(z), o).final_gap);
  }
}
BENCHMARK(BM_FrankWolfe)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
