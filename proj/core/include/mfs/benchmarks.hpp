#pragma once

#include "mfs/dataset.hpp"
#include "mfs/types.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfs {

enum class BenchmarkId {
  Forrester2f,
  Booth2f,
  Branin2f,
  Park91a2f,
  Hartmann6_2f,
  Borehole2f,
  Forrester3f,
  Rosenbrock3f,
  Rastrigin3f,
};

/// Identity, input box and fidelity count of one analytical benchmark family.
struct BenchmarkSpec {
  BenchmarkId id{};
  std::string name;
  int dim = 0;
  int levels = 0;
  Vector lower;
  Vector upper;

  bool has_level(FidelityLevel level) const {
    return levels == 3 || level != FidelityLevel::MF;
  }
};

namespace constants {

inline constexpr double kForresterA = 0.5;
inline constexpr double kForresterB = 10.0;
inline constexpr double kForresterC = -5.0;

inline constexpr double kHartmannA[4][6] = {
    {10, 3, 17, 3.5, 1.7, 8},
    {0.05, 10, 17, 0.1, 8, 14},
    {3, 3.5, 1.7, 10, 17, 8},
    {17, 8, 0.05, 10, 0.1, 14},
};
inline constexpr double kHartmannP[4][6] = {
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
};
inline constexpr double kHartmannAlphaHigh[4] = {1.0, 1.2, 3.0, 3.2};
inline constexpr double kHartmannAlphaLow[4] = {0.5, 0.5, 2.0, 4.0};

inline constexpr double kBoreholeHighA = 2.0 * std::numbers::pi;
inline constexpr double kBoreholeHighB = 1.0;
inline constexpr double kBoreholeLowA = 5.0;
inline constexpr double kBoreholeLowB = 1.5;

inline constexpr double kRastriginTheta = 0.2;
inline constexpr double kRastriginOptimum = 0.1;
inline constexpr double kRastriginPhiHigh = 10000.0;
inline constexpr double kRastriginPhiMedium = 5000.0;
inline constexpr double kRastriginPhiLow = 2500.0;

}  // namespace constants

/// `dim` is only meaningful for rosenbrock3f / rastrigin3f (0 selects D = 2).
BenchmarkSpec make_benchmark(BenchmarkId id, int dim = 0);

/// Looks a benchmark up by its registry name; throws ConfigError listing valid names.
BenchmarkSpec benchmark_by_name(std::string_view name, int dim = 0);
std::optional<BenchmarkId> parse_benchmark(std::string_view name);
std::vector<std::string> benchmark_names();

/// Closed-form value of a two-level benchmark (LF or HF).
double eval_bifidelity(const BenchmarkSpec& spec, FidelityLevel level, std::span<const double> x);
/// Closed-form value of a three-level benchmark (LF, MF or HF).
double eval_trifidelity(const BenchmarkSpec& spec, FidelityLevel level, std::span<const double> x);
/// Dispatches on spec.levels.
double evaluate(const BenchmarkSpec& spec, FidelityLevel level, std::span<const double> x);

/// n points i.i.d. uniform over the box; identical seed gives identical output.
Matrix sample_uniform(const BenchmarkSpec& spec, int n, std::uint64_t seed);

/// Pairs each input row with its exact value at `level`.
FidelityDataset make_dataset(const BenchmarkSpec& spec, FidelityLevel level, const Matrix& inputs);

/// Composition of planar rotations by theta over coordinate pairs (1,2), (2,3), ...,
/// (D-1,D), the first pair applied first. Equals the standard 2x2 rotation for D = 2.
Matrix rotation_matrix(int dim, double theta);

/// Fidelity-dependent Rastrigin error term e_r(z, phi).
double rastrigin_error(std::span<const double> z, double phi);

}  // namespace mfs
