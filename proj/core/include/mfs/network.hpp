#pragma once

#include "mfs/types.hpp"

#include <cstdint>
#include <vector>

namespace mfs {

enum class Activation { Tanh, Relu, Identity };

/// Fully connected feed-forward stack with one flat parameter vector.
///
/// Rows of the input matrix are samples. Hidden layers apply `hidden`; the last
/// layer is affine unless `activate_output` is set (used for feature trunks).
/// Parameters are laid out layer by layer as W (out x in, column-major) then b.
class Network {
 public:
  struct Cache {
    std::vector<Matrix> activations;  // activations[0] is the input
  };

  Network() = default;
  Network(std::vector<int> widths, Activation hidden, bool activate_output, std::uint64_t seed);

  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  int layer_count() const { return static_cast<int>(widths_.size()) - 1; }
  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return hidden_; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Cache& cache) const;

  /// Accumulates dLoss/dparams into `grad` and returns dLoss/dinput.
  Matrix backward(const Cache& cache, const Matrix& d_out, Vector& grad) const;

 private:
  bool layer_activated(int layer) const;

  std::vector<int> widths_{1, 1};
  Activation hidden_ = Activation::Tanh;
  bool activate_output_ = false;
  Vector params_;
  std::vector<Eigen::Index> weight_offsets_;
  std::vector<Eigen::Index> bias_offsets_;
};

}  // namespace mfs
