#include <benchmark/benchmark.h>

#include <random>

#include "edcuav/generator.hpp"
#include "edcuav/metrics.hpp"
#include "edcuav/planner.hpp"
#include "edcuav/qp.hpp"

namespace {

using namespace edc;

// Dense random QP: PD Hessian, box bounds and one two-sided linear row.
qp::Problem random_qp(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
    const Eigen::MatrixXd p = m.transpose() * m + Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n).setIdentity();
    for (int j = 0; j < n; ++j) a(n, j) = normal(rng);

    qp::Problem problem;
    problem.P = p.sparseView();
    problem.q = 4.0 * qp::Vector::NullaryExpr(n, [&] { return normal(rng); });
    problem.A = a.sparseView();
    problem.lower = qp::Vector::Constant(n + 1, -2.0);
    problem.upper = qp::Vector::Constant(n + 1, 2.0);
    return problem;
}

void BM_QpSolve(benchmark::State& state) {
    const auto problem = random_qp(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(qp::solve(problem));
}
BENCHMARK(BM_QpSolve)->Arg(4)->Arg(16)->Arg(64);

Scenario bench_scenario(int uavs) {
    io::GenSpec g;
    g.num_uavs = uavs;
    g.area_surface = 250000;
    g.seed = 11;
    return io::generate_scenario(g);
}

void plan_benchmark(benchmark::State& state, planner::SeparationMode mode) {
    planner::PlanRequest req;
    req.scenario = bench_scenario(static_cast<int>(state.range(0)));
    req.mode = mode;
    for (auto _ : state) benchmark::DoNotOptimize(planner::plan(req));
}

void BM_PlanSignedL1(benchmark::State& state) { plan_benchmark(state, planner::SeparationMode::SignedL1); }
void BM_PlanScp(benchmark::State& state) { plan_benchmark(state, planner::SeparationMode::Scp); }
BENCHMARK(BM_PlanSignedL1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlanScp)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BaselineSweep(benchmark::State& state) {
    metrics::SweepSpec spec;
    spec.values = {10, 20, 30, 40, 50};
    spec.endpoint_separation = false;
    spec.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(metrics::sweep(spec));
}
BENCHMARK(BM_BaselineSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
