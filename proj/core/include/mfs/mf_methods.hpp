#pragma once

#include "mfs/dataset.hpp"
#include "mfs/gp.hpp"
#include "mfs/mlp.hpp"
#include "mfs/network.hpp"
#include "mfs/types.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfs {

enum class MethodId {
  GpMimic,
  MfGp,
  Delta,
  Flag,
  Intermediate,
  TwoStep,
  ThreeStep,
  GpMimic3f,
  Flag3f,
  Intermediate3f,
};

std::string_view to_string(MethodId id);
std::optional<MethodId> parse_method(std::string_view name);
std::vector<std::string> method_names();
int method_fidelity_count(MethodId id);
bool method_is_neural(MethodId id);
/// Methods whose loss carries the fidelity weighting (alpha or the 3F simplex).
bool method_is_weighted(MethodId id);

/// Fidelity weights of the joint loss. Two-level weights are (1 - alpha, alpha);
/// three-level weights must lie on the simplex and are never renormalized.
class MfWeights {
 public:
  MfWeights() : weights_{0.5, 0.5} {}

  /// Throws PreconditionError unless alpha is in [0, 1].
  static MfWeights two_fidelity(double alpha);
  /// Throws PreconditionError unless all weights are >= 0 and sum to 1 within 1e-12.
  static MfWeights three_fidelity(double w_low, double w_medium, double w_high);

  int fidelity_count() const { return static_cast<int>(weights_.size()); }
  /// Ordered low to high.
  const std::vector<double>& per_level() const { return weights_; }
  double alpha() const { return weights_.back(); }

 private:
  explicit MfWeights(std::vector<double> w) : weights_(std::move(w)) {}
  std::vector<double> weights_;
};

/// A fitted multifidelity method exposing the highest-fidelity predictor.
class MfModel {
 public:
  virtual ~MfModel() = default;

  virtual MethodId method() const = 0;
  virtual int fidelity_count() const = 0;
  virtual int input_dim() const = 0;
  /// Highest-fidelity prediction; `inputs` has input_dim() columns and at least one row.
  virtual Vector predict(const Matrix& inputs) const = 0;

  double train_seconds = 0.0;
  std::vector<std::string> flags;  // e.g. "degenerate_hf", "rho_fallback"

  bool has_flag(std::string_view flag) const;
};

/// Shape-checked façade over MfModel::predict; an empty query gives an empty vector.
Vector mf_predict(const MfModel& model, const Matrix& inputs);

class DeltaModel final : public MfModel {
 public:
  MethodId method() const override { return MethodId::Delta; }
  int fidelity_count() const override { return 2; }
  int input_dim() const override { return low.input_dim(); }
  Vector predict(const Matrix& inputs) const override;

  MlpModel low;       // f_L(x)
  MlpModel residual;  // f_delta(x, f_L(x))
};

class TwoStepModel final : public MfModel {
 public:
  MethodId method() const override { return MethodId::TwoStep; }
  int fidelity_count() const override { return 2; }
  int input_dim() const override { return low.input_dim(); }
  Vector predict(const Matrix& inputs) const override;

  MlpModel low;   // f_L(x)
  MlpModel high;  // f_H(x, f_L(x))
};

class ThreeStepModel final : public MfModel {
 public:
  MethodId method() const override { return MethodId::ThreeStep; }
  int fidelity_count() const override { return 2; }
  int input_dim() const override { return low.input_dim(); }
  Vector predict(const Matrix& inputs) const override;
  /// Output of the affine stage y_lin(x).
  Vector linear_prediction(const Matrix& inputs) const;

  MlpModel low;        // f_L(x)
  MlpModel linear;     // affine map of (x, f_L(x))
  MlpModel nonlinear;  // shallow net on (x, f_L(x), y_lin(x))
};

class FlagModel final : public MfModel {
 public:
  MethodId method() const override { return levels == 3 ? MethodId::Flag3f : MethodId::Flag; }
  int fidelity_count() const override { return levels; }
  int input_dim() const override { return network.input_dim() - indicator_width(); }
  Vector predict(const Matrix& inputs) const override;
  /// F(x, level) for level index 0 (lowest) .. levels - 1.
  Vector predict_at(const Matrix& inputs, int level_index) const;
  int indicator_width() const { return levels == 3 ? 3 : 1; }

  MlpModel network;
  int levels = 2;
};

struct JointLossBreakdown {
  std::vector<double> mse;  // per level, standardized targets, low to high
  double penalty = 0.0;     // lambda * ||W||^2
  double total = 0.0;
};

/// Shared machinery for the all-in-one networks trained on the weighted loss
/// sum_k w_k MSE_k + lambda ||W||^2 over pooled rows.
class JointNetworkModel : public MfModel {
 public:
  int fidelity_count() const override { return levels; }
  int input_dim() const override { return trunk.input_dim(); }
  Vector predict(const Matrix& inputs) const override;
  /// One column per level (low to high), target units.
  Matrix predict_levels(const Matrix& inputs) const;

  /// Loss terms at the current parameters. `data` is ordered low to high.
  JointLossBreakdown loss(std::span<const FidelityDataset> data, const MfWeights& weights,
                          double lambda) const;
  /// Gradient of loss().total, concatenated over parameter_blocks().
  Vector loss_gradient(std::span<const FidelityDataset> data, const MfWeights& weights,
                       double lambda) const;

  std::vector<Vector*> parameter_blocks();
  std::vector<const Vector*> parameter_blocks() const;

  struct Cache {
    std::vector<Network::Cache> nets;
  };
  /// Standardized inputs to standardized per-level outputs.
  virtual Matrix forward(const Matrix& x_std, Cache& cache) const = 0;
  /// Accumulates parameter gradients (one vector per block) given dLoss/doutputs.
  virtual void backward(const Cache& cache, const Matrix& d_out,
                        std::vector<Vector>& grads) const = 0;

  Network trunk;
  Standardizer input_scaler;
  Standardizer target_scaler;
  int levels = 2;
  std::vector<double> loss_trace;

 protected:
  virtual std::vector<Network*> networks() = 0;
  virtual std::vector<const Network*> networks() const = 0;
};

/// Trunk h(x) -> LF head; each higher head sees (h, lower predictions).
class IntermediateModel final : public JointNetworkModel {
 public:
  MethodId method() const override {
    return levels == 3 ? MethodId::Intermediate3f : MethodId::Intermediate;
  }
  Matrix forward(const Matrix& x_std, Cache& cache) const override;
  void backward(const Cache& cache, const Matrix& d_out, std::vector<Vector>& grads) const override;

  std::vector<Network> heads;  // heads[0] affine on h; heads[k] on (h, y_0..y_{k-1})

 protected:
  std::vector<Network*> networks() override;
  std::vector<const Network*> networks() const override;
};

/// Trunk u(x) followed by a purely linear mixing layer W u + b.
class GpMimicModel final : public JointNetworkModel {
 public:
  MethodId method() const override { return levels == 3 ? MethodId::GpMimic3f : MethodId::GpMimic; }
  Matrix forward(const Matrix& x_std, Cache& cache) const override;
  void backward(const Cache& cache, const Matrix& d_out, std::vector<Vector>& grads) const override;

  /// Applies the mixing layer to latent rows u (standardized output space).
  Matrix mix(const Matrix& latent) const { return mixing.forward(latent); }

  Network mixing;

 protected:
  std::vector<Network*> networks() override;
  std::vector<const Network*> networks() const override;
};

class MfGpModel final : public MfModel {
 public:
  MethodId method() const override { return MethodId::MfGp; }
  int fidelity_count() const override { return 2; }
  int input_dim() const override { return low.input_dim(); }
  Vector predict(const Matrix& inputs) const override;

  GpModel low;          // Matern + white on LF
  GpModel discrepancy;  // RBF + white on y_H - rho mu_L
  double rho = 0.0;
};

DeltaModel fit_delta(const MlpConfig& cfg_low, const MlpConfig& cfg_delta,
                     const FidelityDataset& low, const FidelityDataset& high);
FlagModel fit_flag(const MlpConfig& cfg, std::span<const FidelityDataset> datasets);
IntermediateModel fit_intermediate(const MlpConfig& cfg, const MfWeights& weights, double lambda,
                                   std::span<const FidelityDataset> datasets);
GpMimicModel fit_gpmimic(const MlpConfig& cfg, const MfWeights& weights, double lambda,
                         std::span<const FidelityDataset> datasets);
TwoStepModel fit_twostep(const MlpConfig& cfg_low, const MlpConfig& cfg_high,
                         const FidelityDataset& low, const FidelityDataset& high);
ThreeStepModel fit_threestep(const MlpConfig& cfg_low, const MlpConfig& cfg_linear,
                             const MlpConfig& cfg_nonlinear, const FidelityDataset& low,
                             const FidelityDataset& high);
struct ScaleEstimate {
  double rho = 0.0;
  bool trend = false;     // an affine trend in x was partialled out
  bool fallback = false;  // LF predictions carry no spread; rho set to 0
};
/// Least-squares slope of y_H on mu_L at the HF rows. With at least d + 4 rows an
/// affine trend in x is regressed out of both sides first; otherwise only the means.
ScaleEstimate estimate_scale(const Vector& mu_low, const Matrix& inputs, const Vector& y_high);

MfGpModel fit_mfgp(std::span<const FidelityDataset> datasets, const GpOptions& options = {});

/// Untrained joint models (seeded weights, scalers fitted on the pooled data).
IntermediateModel init_intermediate(const MlpConfig& cfg, std::span<const FidelityDataset> datasets);
GpMimicModel init_gpmimic(const MlpConfig& cfg, std::span<const FidelityDataset> datasets);

/// Everything needed to fit any registered method.
struct MethodSettings {
  MlpConfig network;  // shared architecture for every sub-network
  double alpha = 0.5;
  double l2_lambda = 0.0;
  MfWeights weights3f = MfWeights::three_fidelity(0.2, 0.2, 0.6);
  GpOptions gp;
};

/// Benchmark-tuned defaults (architecture, learning rate, alpha / lambda / weights).
MethodSettings default_settings(MethodId id);

/// Fits `id` on datasets ordered low to high and records the training wall time.
std::unique_ptr<MfModel> fit_method(MethodId id, const MethodSettings& settings,
                                    std::span<const FidelityDataset> datasets);

}  // namespace mfs
