#include <benchmark/benchmark.h>

#include <vector>

#include "omnigraph/equirect.hpp"
#include "omnigraph/graph.hpp"
#include "omnigraph/kernels.hpp"
#include "omnigraph/network.hpp"
#include "omnigraph/rng.hpp"

using namespace omnigraph;

namespace {

const SparseLaplacian& laplacian_128() {
    static const auto ls = network_laplacian(EquirectGrid(128, 64), GraphMode::geometry);
    return ls;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1, 1);
    return v;
}

PlanarImage checker(int side) {
    std::vector<double> v(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) v[r * side + c] = ((r / 4 + c / 4) % 2) ? 1.0 : 0.0;
    return PlanarImage(side, v);
}

template <auto Fn>
void BM_spmv(benchmark::State& state) {
    const auto& a = laplacian_128().csr();
    const auto x = random_signal(a.n, 1);
    std::vector<double> y(a.n);
    for (auto _ : state) {
        Fn(a, x, y, 1.0);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(a.nnz()));
}

template <auto Fn>
void BM_poly(benchmark::State& state) {
    const auto& a = laplacian_128().csr();
    const auto x = random_signal(a.n, 2);
    const std::vector<double> coeffs = {0.3, -0.2, 0.1, 0.05, -0.02, 0.01};
    std::vector<double> out(a.n);
    for (auto _ : state) {
        Fn(a, 1.0, coeffs, x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <auto Fn>
void BM_render(benchmark::State& state) {
    const EquirectGrid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) / 2);
    const auto img = checker(28);
    const TangentFrame frame(SphericalPoint(0.25, 0.125));
    for (auto _ : state) {
        auto out = Fn(img, frame, g, 0.5);
        benchmark::DoNotOptimize(out.values.data());
    }
}

void BM_loss_and_grad(benchmark::State& state) {
    const auto& ls = laplacian_128();
    const NetworkConfig cfg;
    const auto params = NetworkParams::init(cfg);
    const EquirectGrid g(128, 64);
    std::vector<EquirectImage> images;
    for (int i = 0; i < static_cast<int>(state.range(0)); ++i) images.emplace_back(g, random_signal(g.size(), 10 + i));
    std::vector<Example> batch;
    for (std::size_t i = 0; i < images.size(); ++i) batch.push_back({&images[i], static_cast<int>(i % 3)});
    for (auto _ : state) {
        auto lg = loss_and_grad(params, cfg, batch, ls);
        benchmark::DoNotOptimize(lg.loss);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_spmv<kernels::spmv_serial>)->Name("spmv/serial");
BENCHMARK(BM_spmv<kernels::spmv>)->Name("spmv/parallel");
BENCHMARK(BM_poly<kernels::poly_apply_serial>)->Name("poly_apply/serial");
BENCHMARK(BM_poly<kernels::poly_apply>)->Name("poly_apply/parallel");
BENCHMARK(BM_render<render_equirect_serial>)->Name("render/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_render<render_equirect>)->Name("render/parallel")->Arg(128)->Arg(512);
BENCHMARK(BM_loss_and_grad)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
