// Microbenchmarks for the per-epoch kernels at CORA-like sizes
// (N ~ 2.7k, average degree ~ 4, 7 clusters).

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "secl/encoders.hpp"
#include "secl/kmeans.hpp"
#include "secl/losses.hpp"
#include "secl/metrics.hpp"
#include "secl/synthetic.hpp"
#include "secl/trainer.hpp"

namespace secl {
namespace {

Graph sparse_graph(Index n, Index d) { return make_random_graph(n, 4.0 / static_cast<double>(n), d, 11); }

DenseMatrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

void BM_Smoothing(benchmark::State& state) {
  const Graph g = sparse_graph(state.range(0), 256);
  const SparseMatrix a_hat = normalized_adjacency(g);
  for (auto _ : state) benchmark::DoNotOptimize(smooth_attributes(a_hat, g.attributes, 3));
}
BENCHMARK(BM_Smoothing)->Arg(1000)->Arg(2708)->Unit(benchmark::kMillisecond);

void BM_ModularityApply(benchmark::State& state) {
  const Index n = state.range(0);
  const Graph g = sparse_graph(n, 1);
  // range(1) selects the dense (1) or matrix-free (0) operator.
  const ModularityOperator b(g, state.range(1) != 0 ? n : 0);
  const DenseMatrix u = gaussian(n, 7, 3);
  for (auto _ : state) benchmark::DoNotOptimize(b.apply(u));
}
BENCHMARK(BM_ModularityApply)->Args({2708, 1})->Args({2708, 0})->Unit(benchmark::kMicrosecond);

void BM_StructuralLoss(benchmark::State& state) {
  const Index n = state.range(0);
  const Graph g = sparse_graph(n, 1);
  const SparseMatrix a_tilde = self_looped_adjacency(g);
  DenseMatrix h1 = gaussian(n, 500, 1);
  DenseMatrix h2 = gaussian(n, 500, 2);
  h1.rowwise().normalize();
  h2.rowwise().normalize();
  const Index cap = state.range(1) != 0 ? n : 0;
  for (auto _ : state) {
    Tape tape;
    const Var loss = structural_contrastive_loss(tape, tape.parameter(h1), tape.parameter(h2), a_tilde, cap);
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.scalar(loss));
  }
}
BENCHMARK(BM_StructuralLoss)->Args({2708, 1})->Args({2708, 0})->Unit(benchmark::kMillisecond);

void BM_TrainingEpoch(benchmark::State& state) {
  PlantedPartitionSpec spec;
  spec.nodes = state.range(0);
  spec.classes = 7;
  spec.attributes = 256;
  spec.p_in = 20.0 / static_cast<double>(spec.nodes);
  spec.p_out = 1.0 / static_cast<double>(spec.nodes);
  const Graph g = make_planted_partition(spec);
  TrainConfig c;
  c.clusters = 7;
  c.epochs = 1;
  c.runs = 1;
  const TrainingContext ctx = TrainingContext::build(c, g);
  TrainOptions o;
  o.evaluate = false;
  for (auto _ : state) benchmark::DoNotOptimize(train(c, g, ctx, o));
}
BENCHMARK(BM_TrainingEpoch)->Arg(1000)->Arg(2708)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const DenseMatrix x = gaussian(state.range(0), 500, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(x, 7, 0));
}
BENCHMARK(BM_KMeans)->Arg(2708)->Unit(benchmark::kMillisecond);

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<std::vector<double>> benefit(n, std::vector<double>(n));
  for (auto& row : benefit) {
    for (double& v : row) v = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(hungarian_max(benefit));
}
BENCHMARK(BM_Hungarian)->Arg(7)->Arg(64);

}  // namespace
}  // namespace secl

BENCHMARK_MAIN();
