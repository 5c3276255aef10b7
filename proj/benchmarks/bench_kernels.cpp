// Microbenchmarks for the kernels that dominate training: dense affine maps,
// edge gather/scatter, a full message-passing block, and the geometry-heavy
// construction paths.

#include <benchmark/benchmark.h>

#include <random>

#include "oceancast/graph.hpp"
#include "oceancast/mesh.hpp"
#include "oceancast/model.hpp"

namespace {

using ocean::IndexArray;
using ocean::Matrix;

Matrix<float> random_matrix(int r, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 1.0f);
  Matrix<float> m(r, c);
  for (auto& v : m.data) v = g(rng);
  return m;
}

IndexArray random_index(int n, int max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> idx(static_cast<std::size_t>(n));
  for (auto& v : idx) v = static_cast<std::uint32_t>(rng() % static_cast<std::uint64_t>(max));
  return ocean::make_index_array(std::move(idx));
}

void BM_AffineForward(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  ocean::ParamStore<float> store(1);
  store.add("w", 3 * width, width, ocean::ParamInit::TruncNormalFanIn);
  store.add("b", 1, width, ocean::ParamInit::Zero);
  const Matrix<float> x = random_matrix(rows, 3 * width, 2);
  for (auto _ : state) {
    ocean::Tape<float> tape(&store);
    benchmark::DoNotOptimize(tape.affine(tape.constant(x), tape.param("w"), tape.param("b")));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_AffineForward)->Args({30000, 32})->Args({30000, 64})->Args({30000, 192});

void BM_SegmentSum(benchmark::State& state) {
  const int edges = static_cast<int>(state.range(0));
  const int nodes = edges / 6;
  const Matrix<float> x = random_matrix(edges, 64, 3);
  const IndexArray recv = random_index(edges, nodes, 4);
  for (auto _ : state) {
    ocean::Tape<float> tape;
    benchmark::DoNotOptimize(tape.segment_sum(tape.constant(x), recv, nodes));
  }
  state.SetItemsProcessed(state.iterations() * edges);
}
BENCHMARK(BM_SegmentSum)->Arg(10000)->Arg(60000);

void BM_GatherRows(benchmark::State& state) {
  const int edges = static_cast<int>(state.range(0));
  const Matrix<float> x = random_matrix(edges / 6, 64, 5);
  const IndexArray idx = random_index(edges, edges / 6, 6);
  for (auto _ : state) {
    ocean::Tape<float> tape;
    benchmark::DoNotOptimize(tape.gather_rows(tape.constant(x), idx));
  }
  state.SetItemsProcessed(state.iterations() * edges);
}
BENCHMARK(BM_GatherRows)->Arg(60000);

void BM_GnnBlockForwardBackward(benchmark::State& state) {
  const int edges = static_cast<int>(state.range(0));
  const int nodes = edges / 6;
  ocean::ModelConfig cfg;
  cfg.embed_width = static_cast<int>(state.range(1));
  ocean::ParamStore<float> store(7);
  ocean::detail::create_gnn_block_params(store, "blk", cfg);

  const Matrix<float> v = random_matrix(nodes, cfg.embed_width, 8);
  const Matrix<float> e = random_matrix(edges, cfg.embed_width, 9);
  const IndexArray senders = random_index(edges, nodes, 10);
  const IndexArray receivers = random_index(edges, nodes, 11);
  const Matrix<float> target = random_matrix(nodes, cfg.embed_width, 12);
  const std::vector<float> colw(static_cast<std::size_t>(cfg.embed_width), 1.0f);

  for (auto _ : state) {
    ocean::Tape<float> tape(&store);
    auto [e2, v2] = ocean::gnn_block(tape, "blk", cfg, tape.constant(v), tape.constant(v),
                                     tape.constant(e), senders, receivers, nodes);
    const int loss = tape.weighted_mse_vs(v2, target, colw);
    benchmark::DoNotOptimize(tape.backward(loss));
  }
  state.SetItemsProcessed(state.iterations() * edges);
}
BENCHMARK(BM_GnnBlockForwardBackward)->Args({30000, 32})->Args({30000, 64});

void BM_MeshBuild(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ocean::build_hierarchy(level));
}
BENCHMARK(BM_MeshBuild)->Arg(3)->Arg(4);

void BM_GraphBuild(benchmark::State& state) {
  const ocean::OceanGrid grid = ocean::make_uniform_grid(static_cast<int>(state.range(0)),
                                                         2 * static_cast<int>(state.range(0)));
  auto [coarse, fine] = ocean::build_hierarchy(static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(ocean::build_ocean_graph(grid, coarse, fine, 0.6));
}
BENCHMARK(BM_GraphBuild)->Args({45, 2})->Args({90, 3});

}  // namespace

BENCHMARK_MAIN();
