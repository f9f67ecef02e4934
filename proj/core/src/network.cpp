#include "mfs/network.hpp"

#include "mfs/errors.hpp"

#include <cmath>
#include <random>

namespace mfs {
namespace {

void apply_activation(Activation act, Matrix& z) {
  switch (act) {
    case Activation::Tanh: z = z.array().tanh(); break;
    case Activation::Relu: z = z.array().max(0.0); break;
    case Activation::Identity: break;
  }
}

// Derivative expressed through the activation output a = act(z).
void scale_by_derivative(Activation act, const Matrix& a, Matrix& delta) {
  switch (act) {
    case Activation::Tanh: delta.array() *= 1.0 - a.array().square(); break;
    case Activation::Relu: delta.array() *= (a.array() > 0.0).cast<double>(); break;
    case Activation::Identity: break;
  }
}

}  // namespace

Network::Network(std::vector<int> widths, Activation hidden, bool activate_output,
                 std::uint64_t seed)
    : widths_(std::move(widths)), hidden_(hidden), activate_output_(activate_output) {
  if (widths_.size() < 2) throw PreconditionError("network needs input and output widths");
  for (int w : widths_) {
    if (w <= 0) throw PreconditionError("network widths must be positive");
  }
  Eigen::Index total = 0;
  for (int l = 0; l < layer_count(); ++l) {
    weight_offsets_.push_back(total);
    total += static_cast<Eigen::Index>(widths_[l]) * widths_[l + 1];
    bias_offsets_.push_back(total);
    total += widths_[l + 1];
  }
  params_.resize(total);

  std::mt19937_64 rng(seed);
  for (int l = 0; l < layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const Eigen::Index end = bias_offsets_[l] + widths_[l + 1];
    for (Eigen::Index i = weight_offsets_[l]; i < end; ++i) params_(i) = dist(rng);
  }
}

bool Network::layer_activated(int layer) const {
  return layer + 1 < layer_count() || activate_output_;
}

Matrix Network::forward(const Matrix& x) const {
  Cache unused;
  return forward(x, unused);
}

Matrix Network::forward(const Matrix& x, Cache& cache) const {
  if (x.cols() != input_dim()) {
    throw ShapeError("network expects " + std::to_string(input_dim()) + " inputs, got " +
                     std::to_string(x.cols()));
  }
  cache.activations.resize(static_cast<std::size_t>(layer_count()) + 1);
  cache.activations[0] = x;
  for (int l = 0; l < layer_count(); ++l) {
    const int in = widths_[l], out = widths_[l + 1];
    Eigen::Map<const Matrix> w(params_.data() + weight_offsets_[l], out, in);
    Eigen::Map<const Vector> b(params_.data() + bias_offsets_[l], out);
    Matrix z = cache.activations[l] * w.transpose();
    z.rowwise() += b.transpose();
    if (layer_activated(l)) apply_activation(hidden_, z);
    cache.activations[l + 1] = std::move(z);
  }
  return cache.activations.back();
}

Matrix Network::backward(const Cache& cache, const Matrix& d_out, Vector& grad) const {
  if (grad.size() != params_.size()) throw ShapeError("gradient buffer has wrong size");
  if (cache.activations.size() != static_cast<std::size_t>(layer_count()) + 1) {
    throw PreconditionError("backward called without a matching forward cache");
  }
  Matrix delta = d_out;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const int in = widths_[l], out = widths_[l + 1];
    if (layer_activated(l)) scale_by_derivative(hidden_, cache.activations[l + 1], delta);
    Eigen::Map<Matrix> gw(grad.data() + weight_offsets_[l], out, in);
    Eigen::Map<Vector> gb(grad.data() + bias_offsets_[l], out);
    gw.noalias() += delta.transpose() * cache.activations[l];
    gb.noalias() += delta.colwise().sum().transpose();
    Eigen::Map<const Matrix> w(params_.data() + weight_offsets_[l], out, in);
    delta = delta * w;
  }
  return delta;
}

}  // namespace mfs
