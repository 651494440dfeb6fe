#include <benchmark/benchmark.h>

#include "sawei/bo_loop.hpp"
#include "sawei/gp.hpp"
#include "sawei/objectives.hpp"
#include "sawei/search.hpp"

using namespace sawei;

namespace {

Dataset sample(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
    const auto f = make_synthetic("rastrigin", static_cast<std::size_t>(d), 1);
    Rng rng(seed);
    Dataset data{Eigen::MatrixXd(d, n), Eigen::VectorXd(n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            data.points(i, j) = uniform01(rng);
        }
        data.values(j) = f.evaluate(Eigen::VectorXd(data.points.col(j)));
    }
    return data;
}

void BM_GpFit(benchmark::State& state) {
    const auto data = sample(2, state.range(0), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(data, {}, 3));
    }
}
BENCHMARK(BM_GpFit)->Arg(10)->Arg(40)->Arg(70)->Unit(benchmark::kMillisecond);

void BM_BatchPredict(benchmark::State& state) {
    const auto model = fit(sample(2, state.range(0), 1), {}, 3);
    Rng rng(2);
    Eigen::MatrixXd q(2, 2000);
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        q(0, j) = uniform01(rng);
        q(1, j) = uniform01(rng);
    }
    Eigen::VectorXd mean, std;
    for (auto _ : state) {
        model.predict(q, mean, std);
        benchmark::DoNotOptimize(std.data());
    }
    state.SetItemsProcessed(state.iterations() * q.cols());
}
BENCHMARK(BM_BatchPredict)->Arg(10)->Arg(70)->Unit(benchmark::kMicrosecond);

void BM_Maximize(benchmark::State& state) {
    const auto model = fit(sample(2, 30, 1), {}, 3);
    const BatchUtility af = [&](const Eigen::MatrixXd& x) {
        Eigen::VectorXd mean, std;
        model.predict(x, mean, std);
        return Eigen::VectorXd(std - mean);
    };
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(seed++);
        benchmark::DoNotOptimize(maximize(af, SearchSpace::unit_cube(2), {}, Eigen::MatrixXd(), rng));
    }
}
BENCHMARK(BM_Maximize)->Unit(benchmark::kMillisecond);

void BM_SaweiRun(benchmark::State& state) {
    const auto f = make_synthetic("sphere", 2, 1);
    RunConfig rc;
    rc.init_design.size = 8;
    rc.bo_budget = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_bo(f, rc));
    }
}
BENCHMARK(BM_SaweiRun)->Arg(20)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
