#include "mfs/benchmarks.hpp"
#include "mfs/gp.hpp"
#include "mfs/mlp.hpp"
#include "mfs/network.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

using namespace mfs;

void BM_EvaluateHighFidelity(benchmark::State& state, const std::string& name) {
  const BenchmarkSpec spec = benchmark_by_name(name);
  const Matrix x = sample_uniform(spec, 256, 1);
  for (auto _ : state) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      std::vector<double> p(spec.dim);
      for (int j = 0; j < spec.dim; ++j) p[j] = x(i, j);
      benchmark::DoNotOptimize(evaluate(spec, FidelityLevel::HF, p));
    }
  }
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK_CAPTURE(BM_EvaluateHighFidelity, forrester2f, std::string("forrester2f"));
BENCHMARK_CAPTURE(BM_EvaluateHighFidelity, borehole2f, std::string("borehole2f"));
BENCHMARK_CAPTURE(BM_EvaluateHighFidelity, rastrigin3f, std::string("rastrigin3f"));

void BM_NetworkForwardBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const Network net({4, width, width, 1}, Activation::Tanh, false, 3);
  const Matrix x = Matrix::Random(200, 4);
  const Matrix d_out = Matrix::Ones(200, 1);
  Vector grad = Vector::Zero(net.parameters().size());
  Network::Cache cache;
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x, cache));
    grad.setZero();
    benchmark::DoNotOptimize(net.backward(cache, d_out, grad));
  }
}
BENCHMARK(BM_NetworkForwardBackward)->Arg(16)->Arg(64)->Arg(128);

void BM_MlpFit(benchmark::State& state) {
  const BenchmarkSpec spec = benchmark_by_name("forrester2f");
  const FidelityDataset data = make_dataset(spec, FidelityLevel::HF, sample_uniform(spec, 50, 2));
  const MlpConfig cfg = MlpConfig::uniform(2, 32, 1e-3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mlp_fit(cfg, data));
}
BENCHMARK(BM_MlpFit)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_GpFit(benchmark::State& state) {
  const BenchmarkSpec spec = benchmark_by_name("booth2f");
  const int n = static_cast<int>(state.range(0));
  const FidelityDataset data = make_dataset(spec, FidelityLevel::HF, sample_uniform(spec, n, 4));
  GpOptions options;
  options.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gp_fit(KernelKind::MaternWhite, data, options));
}
BENCHMARK(BM_GpFit)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
