#include "mfs/benchmarks.hpp"

#include "mfs/errors.hpp"

#include <array>
#include <cmath>
#include <random>

namespace mfs {
namespace {

using std::numbers::pi;

struct RegistryEntry {
  std::string_view name;
  BenchmarkId id;
};

constexpr std::array<RegistryEntry, 9> kRegistry{{
    {"forrester2f", BenchmarkId::Forrester2f},
    {"booth2f", BenchmarkId::Booth2f},
    {"branin2f", BenchmarkId::Branin2f},
    {"park91a2f", BenchmarkId::Park91a2f},
    {"hartmann6_2f", BenchmarkId::Hartmann6_2f},
    {"borehole2f", BenchmarkId::Borehole2f},
    {"forrester3f", BenchmarkId::Forrester3f},
    {"rosenbrock3f", BenchmarkId::Rosenbrock3f},
    {"rastrigin3f", BenchmarkId::Rastrigin3f},
}};

Vector constant_bound(int dim, double value) { return Vector::Constant(dim, value); }

double forrester_core(double x) {
  const double a = 6.0 * x - 2.0;
  return a * a * std::sin(12.0 * x - 4.0);
}

double booth(double x1, double x2) {
  const double a = x1 + 2.0 * x2 - 7.0;
  const double b = 2.0 * x1 + x2 - 5.0;
  return a * a + b * b;
}

double branin_base(double x1, double x2) {
  const double t1 = x2 - 5.1 * x1 * x1 / (4.0 * pi * pi) + 5.0 * x1 / pi - 6.0;
  const double t2 = 10.0 * std::cos(x1) * (1.0 - 1.0 / (8.0 * pi));
  return t1 * t1 + t2 + 10.0;
}

double park91a_high(std::span<const double> x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
  const double t1 = 0.5 * x1 * (std::sqrt(1.0 + (x2 + x3 * x3) * x4 / (x1 * x1)) - 1.0);
  const double t2 = (x1 + 3.0 * x4) * std::exp(1.0 + std::sin(x3));
  return t1 + t2;
}

double hartmann_exp_approx(double x) {
  const double e = std::exp(-4.0 / 9.0);
  return std::pow(e + e * (x + 4.0) / 9.0, 9);
}

double hartmann(std::span<const double> x, bool high) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double arg = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - constants::kHartmannP[i][j];
      arg -= constants::kHartmannA[i][j] * d * d;
    }
    sum += high ? constants::kHartmannAlphaHigh[i] * std::exp(arg)
                : constants::kHartmannAlphaLow[i] * hartmann_exp_approx(arg);
  }
  return -(2.58 + sum) / 1.94;
}

double borehole(std::span<const double> x, double a, double b) {
  const double rw = x[0], r = x[1], tu = x[2], hu = x[3], tl = x[4], hl = x[5], len = x[6], kw = x[7];
  const double log_ratio = std::log(r / rw);
  const double denom = log_ratio * (b + 2.0 * len * tu / (log_ratio * rw * rw * kw) + tu / tl);
  return a * tu * (hu - hl) / denom;
}

double rosenbrock_high(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double rosenbrock_medium(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = -2.0 - x[i];
    s += 50.0 * a * a + b * b;
  }
  for (double xi : x) s -= 0.5 * xi;
  return s;
}

double rosenbrock_low(std::span<const double> x) {
  double half = 0.0, quarter = 0.0;
  for (double xi : x) {
    half += 0.5 * xi;
    quarter += 0.25 * xi;
  }
  return (rosenbrock_high(x) - 4.0 - half) / (10.0 + quarter);
}

double rastrigin(std::span<const double> x, double phi) {
  const auto d = static_cast<Eigen::Index>(x.size());
  Vector shifted(d);
  for (Eigen::Index j = 0; j < d; ++j) shifted(j) = x[j] - constants::kRastriginOptimum;
  const Vector z = rotation_matrix(static_cast<int>(d), constants::kRastriginTheta) * shifted;
  double base = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) base += z(j) * z(j) + 1.0 - std::cos(10.0 * pi * z(j));
  return base + rastrigin_error({z.data(), static_cast<std::size_t>(d)}, phi);
}

void check_point(const BenchmarkSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dim) {
    throw ShapeError(spec.name + " expects " + std::to_string(spec.dim) + " inputs, got " +
                     std::to_string(x.size()));
  }
  for (int j = 0; j < spec.dim; ++j) {
    if (!(x[j] >= spec.lower(j) && x[j] <= spec.upper(j))) {
      throw DomainError(spec.name + ": x" + std::to_string(j + 1) + " = " + std::to_string(x[j]) +
                        " outside [" + std::to_string(spec.lower(j)) + ", " +
                        std::to_string(spec.upper(j)) + "]");
    }
  }
}

}  // namespace

BenchmarkSpec make_benchmark(BenchmarkId id, int dim) {
  BenchmarkSpec s;
  s.id = id;
  for (const auto& e : kRegistry) {
    if (e.id == id) s.name = std::string(e.name);
  }
  switch (id) {
    case BenchmarkId::Forrester2f:
    case BenchmarkId::Forrester3f:
      s.dim = 1;
      s.lower = constant_bound(1, 0.0);
      s.upper = constant_bound(1, 1.0);
      break;
    case BenchmarkId::Booth2f:
      s.dim = 2;
      s.lower = constant_bound(2, -10.0);
      s.upper = constant_bound(2, 10.0);
      break;
    case BenchmarkId::Branin2f:
      s.dim = 2;
      s.lower = Vector{{-5.0, 0.0}};
      s.upper = Vector{{10.0, 15.0}};
      break;
    case BenchmarkId::Park91a2f:
      s.dim = 4;
      s.lower = Vector{{1e-8, 0.0, 0.0, 0.0}};
      s.upper = constant_bound(4, 1.0);
      break;
    case BenchmarkId::Hartmann6_2f:
      s.dim = 6;
      s.lower = constant_bound(6, 0.0);
      s.upper = constant_bound(6, 1.0);
      break;
    case BenchmarkId::Borehole2f:
      s.dim = 8;
      s.lower = Vector{{0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0, 9855.0}};
      s.upper = Vector{{0.15, 50000.0, 115600.0, 1110.0, 116.0, 820.0, 1680.0, 12045.0}};
      break;
    case BenchmarkId::Rosenbrock3f:
      s.dim = dim > 0 ? dim : 2;
      s.lower = constant_bound(s.dim, -2.0);
      s.upper = constant_bound(s.dim, 2.0);
      break;
    case BenchmarkId::Rastrigin3f:
      s.dim = dim > 0 ? dim : 2;
      s.lower = constant_bound(s.dim, -0.1);
      s.upper = constant_bound(s.dim, 0.2);
      break;
  }
  const bool tri = id == BenchmarkId::Forrester3f || id == BenchmarkId::Rosenbrock3f ||
                   id == BenchmarkId::Rastrigin3f;
  s.levels = tri ? 3 : 2;
  if (dim > 0 && !(id == BenchmarkId::Rosenbrock3f || id == BenchmarkId::Rastrigin3f) &&
      dim != s.dim) {
    throw ConfigError(s.name + " has fixed dimension " + std::to_string(s.dim));
  }
  if (s.dim < 2 && (id == BenchmarkId::Rosenbrock3f || id == BenchmarkId::Rastrigin3f)) {
    throw ConfigError(s.name + " needs D >= 2");
  }
  return s;
}

std::optional<BenchmarkId> parse_benchmark(std::string_view name) {
  for (const auto& e : kRegistry) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> out;
  for (const auto& e : kRegistry) out.emplace_back(e.name);
  return out;
}

BenchmarkSpec benchmark_by_name(std::string_view name, int dim) {
  const auto id = parse_benchmark(name);
  if (!id) {
    std::string msg = "unknown benchmark '" + std::string(name) + "'; valid ids:";
    for (const auto& n : benchmark_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  return make_benchmark(*id, dim);
}

double eval_bifidelity(const BenchmarkSpec& spec, FidelityLevel level, std::span<const double> x) {
  if (spec.levels != 2) throw LevelError(spec.name + " is not a bi-fidelity benchmark");
  if (level == FidelityLevel::MF) throw LevelError(spec.name + " has no medium-fidelity level");
  check_point(spec, x);
  const bool high = level == FidelityLevel::HF;
  switch (spec.id) {
    case BenchmarkId::Forrester2f: {
      const double fh = forrester_core(x[0]);
      if (high) return fh;
      return constants::kForresterA * fh + constants::kForresterB * (x[0] - 0.5) +
             constants::kForresterC;
    }
    case BenchmarkId::Booth2f:
      if (high) return booth(x[0], x[1]);
      return booth(0.4 * x[0], x[1]) + 1.7 * x[0] * x[1] - x[0] + 2.0 * x[1];
    case BenchmarkId::Branin2f:
      if (high) return branin_base(x[0], x[1]) - 22.5 * x[1];
      return branin_base(0.7 * x[0], 0.7 * x[1]) - 15.75 * x[1] +
             20.0 * (0.9 + x[0]) * (0.9 + x[0]) - 50.0;
    case BenchmarkId::Park91a2f: {
      const double fh = park91a_high(x);
      if (high) return fh;
      return (1.0 + std::sin(x[0]) / 10.0) * fh - 2.0 * x[0] + x[1] * x[1] + x[2] * x[2] + 0.5;
    }
    case BenchmarkId::Hartmann6_2f:
      return hartmann(x, high);
    case BenchmarkId::Borehole2f:
      return high ? borehole(x, constants::kBoreholeHighA, constants::kBoreholeHighB)
                  : borehole(x, constants::kBoreholeLowA, constants::kBoreholeLowB);
    default:
      break;
  }
  throw LevelError(spec.name + " is not a bi-fidelity benchmark");
}

double eval_trifidelity(const BenchmarkSpec& spec, FidelityLevel level, std::span<const double> x) {
  if (spec.levels != 3) throw LevelError(spec.name + " is not a tri-fidelity benchmark");
  check_point(spec, x);
  switch (spec.id) {
    case BenchmarkId::Forrester3f: {
      const double t = x[0];
      const double s = std::sin(12.0 * t - 4.0);
      switch (level) {
        case FidelityLevel::HF: {
          const double a = 5.5 * t - 2.5;
          return a * a * s;
        }
        case FidelityLevel::MF: {
          const double a = 6.0 * t - 2.0;
          return 0.75 * a * a * s + 5.0 * (t - 0.5) - 2.0;
        }
        case FidelityLevel::LF: {
          const double a = 6.0 * t - 2.0;
          return 0.5 * a * a * s + 10.0 * (t - 0.5) - 5.0;
        }
      }
      break;
    }
    case BenchmarkId::Rosenbrock3f:
      switch (level) {
        case FidelityLevel::HF: return rosenbrock_high(x);
        case FidelityLevel::MF: return rosenbrock_medium(x);
        case FidelityLevel::LF: return rosenbrock_low(x);
      }
      break;
    case BenchmarkId::Rastrigin3f:
      switch (level) {
        case FidelityLevel::HF: return rastrigin(x, constants::kRastriginPhiHigh);
        case FidelityLevel::MF: return rastrigin(x, constants::kRastriginPhiMedium);
        case FidelityLevel::LF: return rastrigin(x, constants::kRastriginPhiLow);
      }
      break;
    default:
      break;
  }
  throw LevelError(spec.name + " is not a tri-fidelity benchmark");
}

double evaluate(const BenchmarkSpec& spec, FidelityLevel level, std::span<const double> x) {
  return spec.levels == 3 ? eval_trifidelity(spec, level, x) : eval_bifidelity(spec, level, x);
}

Matrix sample_uniform(const BenchmarkSpec& spec, int n, std::uint64_t seed) {
  if (n <= 0) throw PreconditionError("empty design: sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(n, spec.dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.dim; ++j) {
      const double u = unit(rng);
      out(i, j) = spec.lower(j) + u * (spec.upper(j) - spec.lower(j));
    }
  }
  return out;
}

FidelityDataset make_dataset(const BenchmarkSpec& spec, FidelityLevel level, const Matrix& inputs) {
  if (inputs.rows() > 0 && inputs.cols() != spec.dim) {
    throw ShapeError(spec.name + " expects " + std::to_string(spec.dim) + " input columns");
  }
  FidelityDataset ds;
  ds.level = level;
  ds.inputs = inputs.rows() > 0 ? inputs : Matrix(0, spec.dim);
  ds.targets.resize(inputs.rows());
  Vector row(spec.dim);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    row = inputs.row(i).transpose();
    ds.targets(i) = evaluate(spec, level, {row.data(), static_cast<std::size_t>(spec.dim)});
  }
  return ds;
}

Matrix rotation_matrix(int dim, double theta) {
  Matrix r = Matrix::Identity(dim, dim);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int k = 0; k + 1 < dim; ++k) {
    Matrix g = Matrix::Identity(dim, dim);
    g(k, k) = c;
    g(k, k + 1) = -s;
    g(k + 1, k) = s;
    g(k + 1, k + 1) = c;
    r = g * r;
  }
  return r;
}

double rastrigin_error(std::span<const double> z, double phi) {
  const double theta = 1.0 - 0.0001 * phi;
  const double a = theta;
  const double w = 10.0 * pi * theta;
  const double b = 0.5 * pi * theta;
  double s = 0.0;
  for (double zj : z) {
    const double c = std::cos(w * zj + b + pi);
    s += a * c * c;
  }
  return s;
}

}  // namespace mfs
