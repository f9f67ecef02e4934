#include "mfs/benchmarks.hpp"
#include "mfs/errors.hpp"
#include "benchmark_fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <vector>

namespace mfs {
namespace {

using L = FidelityLevel;

void expect_rel(double actual, double expected, double tol = 1e-12) {
  const double scale = std::max(1.0, std::abs(expected));
  EXPECT_NEAR(actual, expected, tol * scale) << "expected " << expected;
}

using testing_fixtures::Fixture;
using testing_fixtures::fixtures;

TEST(Benchmarks, FixedPointFixtures) {
  for (const auto& f : fixtures()) {
    SCOPED_TRACE(std::string(f.id) + " " + std::string(to_string(f.level)));
    const BenchmarkSpec spec = benchmark_by_name(f.id, f.dim);
    expect_rel(evaluate(spec, f.level, f.x), f.value);
  }
}

TEST(Benchmarks, ExactZeros) {
  const double third = 1.0 / 3.0;
  EXPECT_EQ(evaluate(make_benchmark(BenchmarkId::Booth2f), L::HF, std::vector{1.0, 3.0}), 0.0);
  EXPECT_EQ(evaluate(make_benchmark(BenchmarkId::Rosenbrock3f, 5), L::HF, std::vector(5, 1.0)), 0.0);
  EXPECT_EQ(evaluate(make_benchmark(BenchmarkId::Rastrigin3f, 5), L::HF, std::vector(5, 0.1)), 0.0);
  EXPECT_NEAR(evaluate(make_benchmark(BenchmarkId::Forrester2f), L::HF, std::vector{third}), 0.0, 1e-15);
}

TEST(Benchmarks, ForresterLowFromHighIdentity) {
  const BenchmarkSpec spec = make_benchmark(BenchmarkId::Forrester2f);
  const Matrix x = sample_uniform(spec, 1000, 42);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const std::vector<double> p{x(i, 0)};
    const double hf = evaluate(spec, L::HF, p);
    const double lf = evaluate(spec, L::LF, p);
    EXPECT_NEAR(lf - (0.5 * hf + 10.0 * (p[0] - 0.5) - 5.0), 0.0, 1e-13);
  }
}

TEST(Benchmarks, MakeDatasetForrester) {
  const BenchmarkSpec spec = make_benchmark(BenchmarkId::Forrester2f);
  Matrix x(3, 1);
  x << 0.0, 1.0 / 3.0, 1.0;
  const FidelityDataset hf = make_dataset(spec, L::HF, x);
  EXPECT_EQ(hf.level, L::HF);
  expect_rel(hf.targets(0), 4.0 * std::sin(-4.0));
  EXPECT_NEAR(hf.targets(1), 0.0, 1e-15);
  expect_rel(hf.targets(2), 16.0 * std::sin(8.0));
  const FidelityDataset lf = make_dataset(spec, L::LF, x);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(lf.targets(i), 0.5 * hf.targets(i) + 10.0 * (x(i, 0) - 0.5) - 5.0, 1e-13);
  }
  const FidelityDataset empty = make_dataset(spec, L::HF, Matrix(0, 1));
  EXPECT_TRUE(empty.empty());
}

TEST(Benchmarks, Errors) {
  const BenchmarkSpec forrester = make_benchmark(BenchmarkId::Forrester2f);
  EXPECT_THROW(evaluate(forrester, L::HF, std::vector{1.5}), DomainError);
  EXPECT_THROW(evaluate(forrester, L::HF, std::vector{0.5, 0.5}), ShapeError);
  EXPECT_THROW(evaluate(forrester, L::MF, std::vector{0.5}), LevelError);
  EXPECT_THROW(eval_bifidelity(make_benchmark(BenchmarkId::Forrester3f), L::HF, std::vector{0.5}), LevelError);
  EXPECT_THROW(benchmark_by_name("nope"), ConfigError);
  EXPECT_THROW(sample_uniform(forrester, 0, 1), PreconditionError);
  const BenchmarkSpec park = make_benchmark(BenchmarkId::Park91a2f);
  EXPECT_THROW(evaluate(park, L::HF, std::vector{0.0, 0.5, 0.5, 0.5}), DomainError);
}

TEST(Benchmarks, RegistryRoundTrip) {
  const auto names = benchmark_names();
  EXPECT_EQ(names.size(), 9u);
  for (const auto& n : names) {
    const BenchmarkSpec spec = benchmark_by_name(n);
    EXPECT_EQ(spec.name, n);
    EXPECT_TRUE(spec.levels == 2 || spec.levels == 3);
    for (int j = 0; j < spec.dim; ++j) EXPECT_LT(spec.lower(j), spec.upper(j));
  }
  EXPECT_EQ(benchmark_by_name("rastrigin3f", 5).dim, 5);
}

TEST(Benchmarks, SamplingContainmentAndDeterminism) {
  const BenchmarkSpec spec = make_benchmark(BenchmarkId::Forrester2f);
  const Matrix a = sample_uniform(spec, 1000, 7);
  const Matrix b = sample_uniform(spec, 1000, 7);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_GE(a.minCoeff(), 0.0);
  EXPECT_LE(a.maxCoeff(), 1.0);
  const BenchmarkSpec borehole = make_benchmark(BenchmarkId::Borehole2f);
  const Matrix one = sample_uniform(borehole, 1, 3);
  for (int j = 0; j < borehole.dim; ++j) {
    EXPECT_GE(one(0, j), borehole.lower(j));
    EXPECT_LE(one(0, j), borehole.upper(j));
  }
}

TEST(Benchmarks, SampleMeanNearMidpoint) {
  const BenchmarkSpec spec = make_benchmark(BenchmarkId::Booth2f);
  const int n = 10000;
  const Matrix x = sample_uniform(spec, n, 11);
  for (int j = 0; j < 2; ++j) {
    const double width = spec.upper(j) - spec.lower(j);
    const double se = width / std::sqrt(12.0) / std::sqrt(double(n));
    EXPECT_NEAR(x.col(j).mean(), 0.5 * (spec.lower(j) + spec.upper(j)), 3.0 * se);
  }
}

TEST(Benchmarks, RastriginErrorBound) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double phi : {10000.0, 5000.0, 2500.0}) {
    const double a = 1.0 - 1e-4 * phi;
    for (int t = 0; t < 200; ++t) {
      std::vector<double> z(5);
      for (auto& v : z) v = u(rng);
      EXPECT_LE(std::abs(rastrigin_error(z, phi)), 5.0 * std::abs(a) + 1e-15);
    }
  }
}

TEST(Benchmarks, RotationIsOrthogonal) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int d : {2, 3, 5}) {
    const Matrix r = rotation_matrix(d, 0.2);
    for (int t = 0; t < 20; ++t) {
      Vector v(d);
      for (int j = 0; j < d; ++j) v(j) = g(rng);
      EXPECT_NEAR((r * v).norm(), v.norm(), 1e-12);
    }
  }
  const Matrix r2 = rotation_matrix(2, 0.2);
  EXPECT_DOUBLE_EQ(r2(0, 0), std::cos(0.2));
  EXPECT_DOUBLE_EQ(r2(0, 1), -std::sin(0.2));
  EXPECT_DOUBLE_EQ(r2(1, 0), std::sin(0.2));
}

TEST(Benchmarks, EvaluatorsArePure) {
  for (const auto& n : benchmark_names()) {
    const BenchmarkSpec spec = benchmark_by_name(n);
    const Matrix x = sample_uniform(spec, 5, 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      std::vector<double> p;
      for (int j = 0; j < spec.dim; ++j) p.push_back(x(i, j));
      const double first = evaluate(spec, L::HF, p);
      const double second = evaluate(spec, L::HF, p);
      EXPECT_EQ(std::memcmp(&first, &second, sizeof(double)), 0);
    }
  }
}

}  // namespace
}  // namespace mfs
