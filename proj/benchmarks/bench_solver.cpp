#include <benchmark/benchmark.h>

#include "auglasso/model.hpp"
#include "auglasso/solver.hpp"
#include "auglasso/tuning.hpp"

using namespace auglasso;

namespace {

Dataset make_instance(int n, int p, int s) {
    Rng rng(42);
    ContaminationSpec spec;
    spec.o = n / 20;
    spec.magnitude = 10.0;
    spec.mechanism = ContaminationSpec::Mechanism::sign_flip_shift;
    return generate(n, p, CovarianceModel::identity(), make_beta(p, s, 10.0),
                    1.0, spec, rng);
}

void BM_FitCd(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int p = n / 10;
    const Dataset ds = make_instance(n, p, 5);
    const PenaltyPair pen = lambda_theorem3(n, p, NoiseModel(1.0, 0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_cd(ds, pen));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_FitCd)->RangeMultiplier(2)->Range(250, 2000)->Complexity();

void BM_FitProx(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int p = n / 10;
    const Dataset ds = make_instance(n, p, 5);
    const PenaltyPair pen = lambda_theorem3(n, p, NoiseModel(1.0, 0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_prox(ds, pen));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_FitProx)->RangeMultiplier(2)->Range(250, 1000)->Complexity();

void BM_ProfileTheta(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset ds = make_instance(n, n / 10, 5);
    const Eigen::VectorXd beta = Eigen::VectorXd::Zero(n / 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(profile_theta(ds.X, ds.y, beta, 0.2));
    }
}
BENCHMARK(BM_ProfileTheta)->Range(250, 2000);

void BM_KktResidual(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int p = n / 10;
    const Dataset ds = make_instance(n, p, 5);
    const Eigen::VectorXd beta = make_beta(p, 5, 10.0);
    const Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    const PenaltyPair pen(0.2, 0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kkt_residual(ds.X, ds.y, beta, theta, pen));
    }
}
BENCHMARK(BM_KktResidual)->Range(250, 2000);

}  // namespace

BENCHMARK_MAIN();
