// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include "acx/core/kernels.hpp"
#include "acx/core/random.hpp"
#include "acx/data/synthetic.hpp"
#include "acx/data/workload.hpp"
#include "acx/gnn/model.hpp"
#include "acx/granger/granger.hpp"

using namespace acx;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (auto& x : m.data()) x = rng.uniform() * 2.0 - 1.0;
    return m;
}

void gemm_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::gemm(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

void gemm_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::gemm_serial(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

void gemm_naive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::gemm_naive(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

struct GrangerFixture {
    data::Workload workload;
    gnn::GnnModel f;

    static const GrangerFixture& get() {
        static const GrangerFixture fx = [] {
            auto sg = data::generate_tree_cycles(data::tree_cycles_preset(data::Scale::desk), 1);
            auto w = data::make_node_workload("tree_cycles", sg, 3, 1);
            auto f = gnn::GnnModel::initialize({TaskKind::node, w.feature_width, {20, 20, 20}, w.classes}, 1);
            return GrangerFixture{std::move(w), std::move(f)};
        }();
        return fx;
    }
};

void granger_jobs(benchmark::State& state) {
    const auto& fx = GrangerFixture::get();
    const auto jobs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(granger::extract_all(fx.f, fx.workload.instances, jobs));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fx.workload.instances.size()));
}

void granger_serial(benchmark::State& state) {
    const auto& fx = GrangerFixture::get();
    for (auto _ : state) benchmark::DoNotOptimize(granger::extract_all_serial(fx.f, fx.workload.instances));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fx.workload.instances.size()));
}

} // namespace

BENCHMARK(gemm_parallel)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(gemm_serial)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(gemm_naive)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(granger_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(granger_jobs)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
