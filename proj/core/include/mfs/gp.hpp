#pragma once

#include "mfs/dataset.hpp"
#include "mfs/types.hpp"

#include <cstdint>

namespace mfs {

/// Kernel composition. Both carry an additive white-noise term and ARD length-scales.
enum class KernelKind {
  MaternWhite,  // Matern nu = 5/2
  RbfWhite,
};

struct GpHyperparameters {
  Vector length_scales;  // standardized input units
  double signal_variance = 1.0;  // standardized target units
  double noise_variance = 1e-2;
};

struct GpOptions {
  int restarts = 4;  // total starts, including the default one
  std::uint64_t seed = 0;
  int max_iterations = 200;
};

inline constexpr double kGpJitterStart = 1e-10;
inline constexpr double kGpJitterMax = 1e-4;
inline constexpr double kGpNoiseFloor = 1e-10;

struct GpModel {
  KernelKind kernel = KernelKind::MaternWhite;
  GpHyperparameters hyper;
  Standardizer input_scaler;
  Standardizer target_scaler;
  Matrix train_inputs;  // standardized
  Vector alpha;         // (K + (noise + jitter) I)^-1 y
  Matrix cholesky;      // lower factor of that matrix
  double jitter = kGpJitterStart;
  double log_marginal_likelihood = 0.0;

  int input_dim() const { return static_cast<int>(train_inputs.cols()); }
  /// Fitted noise variance in target units.
  double noise_variance() const;
  /// Fitted signal variance in target units.
  double signal_variance() const;
};

struct GpPrediction {
  Vector mean;
  Vector variance;  // latent (noise-free) predictive variance, target units
};

/// Signal covariance between the rows of `a` and `b` (no noise term).
Matrix kernel_matrix(KernelKind kernel, const GpHyperparameters& hyper, const Matrix& a,
                     const Matrix& b);

/// Conditions a GP on `data` with fixed hyperparameters (standardized space).
GpModel gp_condition(KernelKind kernel, const GpHyperparameters& hyper, const FidelityDataset& data);

/// Maximizes the log marginal likelihood from several starts (the first is
/// deterministic, the others drawn from `options.seed`).
GpModel gp_fit(KernelKind kernel, const FidelityDataset& data, const GpOptions& options = {});

GpPrediction gp_predict(const GpModel& model, const Matrix& inputs);

}  // namespace mfs
