#include "embadapt/embadapt.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace embadapt;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    return m;
}

Labels alternating(std::size_t n) {
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 2);
    return y;
}

void BM_HeadForwardBackward(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    TrainConfig cfg;
    cfg.projection_size = m / 4;
    const auto head = ProjectionHead::init(m, cfg, 1);
    const Matrix x = gaussian(128, static_cast<Eigen::Index>(m), 2);
    const Matrix grad = gaussian(128, static_cast<Eigen::Index>(cfg.projection_size), 3);
    for (auto _ : state) {
        ProjectionHead::Cache cache;
        benchmark::DoNotOptimize(head.forward(x, cache));
        benchmark::DoNotOptimize(head.backward(cache, grad));
    }
}
BENCHMARK(BM_HeadForwardBackward)->Arg(128)->Arg(768);

void BM_ContrastiveLoss(benchmark::State& state) {
    const auto b = static_cast<std::size_t>(state.range(0));
    Matrix p = gaussian(static_cast<Eigen::Index>(b), 128, 4);
    p.rowwise().normalize();
    const auto y = alternating(b);
    const auto pairs = build_pairs(y, true);
    for (auto _ : state) benchmark::DoNotOptimize(contrastive_loss(p, pairs, 0.1));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pairs.size()));
}
BENCHMARK(BM_ContrastiveLoss)->Arg(32)->Arg(128);

void BM_CartFit(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix x = gaussian(n, 32, 5);
    Labels y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) * x(i, 1) > 0 ? 1 : 0;
    for (auto _ : state) {
        DecisionTree tree;
        tree.fit(x, y);
        benchmark::DoNotOptimize(tree.node_count());
    }
}
BENCHMARK(BM_CartFit)->Arg(500)->Arg(2000);

void BM_PcaFit(benchmark::State& state) {
    const auto d = state.range(0);
    const Matrix x = gaussian(2000, d, 6);
    for (auto _ : state) benchmark::DoNotOptimize(pca_fit(x, static_cast<std::size_t>(d / 2)));
}
BENCHMARK(BM_PcaFit)->Arg(128)->Arg(768);

}  // namespace

BENCHMARK_MAIN();
