#pragma once

#include "mfs/dataset.hpp"
#include "mfs/network.hpp"
#include "mfs/types.hpp"

#include <cstdint>
#include <vector>

namespace mfs {

struct MlpConfig {
  std::vector<int> layer_widths{64, 64, 64, 64};  // hidden widths; empty gives an affine map
  double learning_rate = 1e-3;
  int epochs = 2000;
  double l2_lambda = 0.0;
  std::uint64_t seed = 0;
  Activation activation = Activation::Tanh;

  static MlpConfig uniform(int layers, int width, double learning_rate, int epochs);

  /// Throws PreconditionError for non-positive widths, epochs < 1, learning_rate <= 0 or l2 < 0.
  void validate() const;
};

/// A trained single-output regressor. Inputs and targets are standardized with
/// training statistics; the network works in the standardized space.
struct MlpModel {
  MlpConfig config;
  Standardizer input_scaler;
  Standardizer target_scaler;
  Network network;
  std::vector<double> loss_trace;

  int input_dim() const { return network.input_dim(); }
};

/// Builds the untrained model (scalers fitted to `data`, seeded initial weights).
MlpModel mlp_init(const MlpConfig& config, const FidelityDataset& data);

/// Trains an initialized model in place on `data`.
void mlp_train(MlpModel& model, const FidelityDataset& data);

/// Minimizes MSE + l2_lambda * ||W||^2 (W = every weight and bias) with full-batch Adam.
MlpModel mlp_fit(const MlpConfig& config, const FidelityDataset& data);

Vector mlp_predict(const MlpModel& model, const Matrix& inputs);

/// Loss value of `model` on `data` in the model's standardized space.
double mlp_loss(const MlpModel& model, const FidelityDataset& data, double l2_lambda);

/// Analytic gradient of mlp_loss with respect to model.network.parameters().
Vector mlp_loss_gradient(const MlpModel& model, const FidelityDataset& data, double l2_lambda);

}  // namespace mfs
