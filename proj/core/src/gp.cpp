#include "mfs/gp.hpp"

#include "mfs/errors.hpp"
#include "mfs/optim.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mfs {
namespace {

constexpr double kSqrt5 = 2.23606797749978969641;

Matrix scaled_sq_dist(const Matrix& a, const Matrix& b, const Vector& length_scales) {
  const Matrix as = a.array().rowwise() / length_scales.transpose().array();
  const Matrix bs = b.array().rowwise() / length_scales.transpose().array();
  Matrix d2 = (-2.0 * as * bs.transpose()).eval();
  d2.colwise() += as.rowwise().squaredNorm();
  d2.rowwise() += bs.rowwise().squaredNorm().transpose();
  return d2.cwiseMax(0.0);
}

struct Factorization {
  Matrix lower;
  Vector alpha;
  double jitter = 0.0;
  double log_det = 0.0;
};

// Cholesky of K + (noise + jitter) I with jitter escalated x10 from the start value.
bool factorize(const Matrix& k_signal, double noise, const Vector& y, Factorization& out) {
  for (double jitter = kGpJitterStart; jitter <= kGpJitterMax * 1.0000001; jitter *= 10.0) {
    Matrix k = k_signal;
    k.diagonal().array() += noise + jitter;
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() != Eigen::Success) continue;
    Matrix lower = llt.matrixL();
    if (!(lower.diagonal().array() > 0.0).all()) continue;
    out.lower = std::move(lower);
    out.alpha = llt.solve(y);
    out.jitter = jitter;
    out.log_det = 2.0 * out.lower.diagonal().array().log().sum();
    return true;
  }
  return false;
}

// Recursive 2x2 block inverse; about three times cheaper than solving against I.
Matrix lower_triangular_inverse(const Matrix& l) {
  const Eigen::Index n = l.rows();
  if (n <= 64) {
    Matrix inv = Matrix::Identity(n, n);
    l.triangularView<Eigen::Lower>().solveInPlace(inv);
    return inv;
  }
  const Eigen::Index h = n / 2;
  const Matrix a_inv = lower_triangular_inverse(l.topLeftCorner(h, h));
  const Matrix c_inv = lower_triangular_inverse(l.bottomRightCorner(n - h, n - h));
  const Matrix b_a = l.bottomLeftCorner(n - h, h) * a_inv.triangularView<Eigen::Lower>();
  Matrix out = Matrix::Zero(n, n);
  out.topLeftCorner(h, h) = a_inv;
  out.bottomRightCorner(n - h, n - h) = c_inv;
  out.bottomLeftCorner(n - h, h).noalias() = -(c_inv.triangularView<Eigen::Lower>() * b_a);
  return out;
}

// Parameter vector layout: [log l_1..log l_d, log signal, log noise].
GpHyperparameters unpack(const Vector& theta, int d) {
  GpHyperparameters h;
  h.length_scales = theta.head(d).array().exp();
  h.signal_variance = std::exp(theta(d));
  h.noise_variance = std::exp(theta(d + 1));
  return h;
}

class NegativeLogLikelihood {
 public:
  NegativeLogLikelihood(KernelKind kernel, const Matrix& x, const Vector& y)
      : kernel_(kernel), x_(x), y_(y) {}

  double operator()(const Vector& theta, Vector& grad) const {
    const int d = static_cast<int>(x_.cols());
    const Eigen::Index n = x_.rows();
    const GpHyperparameters h = unpack(theta, d);
    const Matrix r2 = scaled_sq_dist(x_, x_, h.length_scales);
    Matrix k(n, n), g(n, n);
    if (kernel_ == KernelKind::MaternWhite) {
      const Matrix r = r2.cwiseSqrt();
      const Matrix e = (-kSqrt5 * r).array().exp();
      k = h.signal_variance * (1.0 + kSqrt5 * r.array() + (5.0 / 3.0) * r2.array()) * e.array();
      // dk/dlog(l_j) = g * (delta_j / l_j)^2
      g = h.signal_variance * (5.0 / 3.0) * (1.0 + kSqrt5 * r.array()) * e.array();
    } else {
      k = h.signal_variance * (-0.5 * r2.array()).exp();
      g = k;
    }
    Factorization f;
    grad = Vector::Zero(theta.size());
    if (!factorize(k, h.noise_variance, y_, f)) return std::numeric_limits<double>::infinity();

    const double nll = 0.5 * y_.dot(f.alpha) + 0.5 * f.log_det +
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    const Matrix lower_inv = lower_triangular_inverse(f.lower);
    Matrix w = f.alpha * f.alpha.transpose();
    w.selfadjointView<Eigen::Lower>().rankUpdate(lower_inv.transpose(), -1.0);
    w.triangularView<Eigen::StrictlyUpper>() = w.transpose();

    const Matrix m = w.cwiseProduct(g);
    const Vector m_rowsum = m.rowwise().sum();
    for (int j = 0; j < d; ++j) {
      const Vector xj = x_.col(j) / h.length_scales(j);
      const double s = 2.0 * xj.cwiseAbs2().dot(m_rowsum) - 2.0 * xj.dot(m * xj);
      grad(j) = -0.5 * s;
    }
    grad(d) = -0.5 * w.cwiseProduct(k).sum();
    grad(d + 1) = -0.5 * h.noise_variance * w.trace();
    return nll;
  }

 private:
  KernelKind kernel_;
  const Matrix& x_;
  const Vector& y_;
};

void check_inputs(const FidelityDataset& data) {
  data.validate();
  if (data.rows() < 2) throw PreconditionError("GP fit needs at least 2 rows");
}

}  // namespace

double GpModel::noise_variance() const {
  const double s = target_scaler.scale()(0);
  return hyper.noise_variance * s * s;
}

double GpModel::signal_variance() const {
  const double s = target_scaler.scale()(0);
  return hyper.signal_variance * s * s;
}

Matrix kernel_matrix(KernelKind kernel, const GpHyperparameters& hyper, const Matrix& a,
                     const Matrix& b) {
  if (a.cols() != b.cols() || a.cols() != hyper.length_scales.size()) {
    throw ShapeError("kernel inputs do not match the length-scale count");
  }
  const Matrix r2 = scaled_sq_dist(a, b, hyper.length_scales);
  if (kernel == KernelKind::MaternWhite) {
    const Matrix r = r2.cwiseSqrt();
    return hyper.signal_variance * (1.0 + kSqrt5 * r.array() + (5.0 / 3.0) * r2.array()) *
           (-kSqrt5 * r.array()).exp();
  }
  return hyper.signal_variance * (-0.5 * r2.array()).exp();
}

GpModel gp_condition(KernelKind kernel, const GpHyperparameters& hyper, const FidelityDataset& data) {
  check_inputs(data);
  if (hyper.length_scales.size() != data.dim()) throw ShapeError("length-scale count != input dim");
  GpModel model;
  model.kernel = kernel;
  model.hyper = hyper;
  model.hyper.noise_variance = std::max(hyper.noise_variance, kGpNoiseFloor);
  model.input_scaler = Standardizer::fit(data.inputs);
  model.target_scaler = Standardizer::fit(data.targets);
  model.train_inputs = model.input_scaler.transform(data.inputs);
  const Vector y = model.target_scaler.transform(data.targets);
  const Matrix k = kernel_matrix(kernel, model.hyper, model.train_inputs, model.train_inputs);
  Factorization f;
  if (!factorize(k, model.hyper.noise_variance, y, f)) {
    throw ConditioningError("GP covariance is not positive definite after jitter " +
                            std::to_string(kGpJitterMax));
  }
  model.cholesky = std::move(f.lower);
  model.alpha = std::move(f.alpha);
  model.jitter = f.jitter;
  model.log_marginal_likelihood =
      -0.5 * y.dot(model.alpha) - 0.5 * f.log_det -
      0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  return model;
}

GpModel gp_fit(KernelKind kernel, const FidelityDataset& data, const GpOptions& options) {
  check_inputs(data);
  const int d = static_cast<int>(data.dim());
  const Standardizer xs = Standardizer::fit(data.inputs);
  const Standardizer ys = Standardizer::fit(data.targets);
  const Matrix x = xs.transform(data.inputs);
  const Vector y = ys.transform(data.targets);

  Vector lower(d + 2), upper(d + 2);
  lower.head(d).setConstant(std::log(1e-2));
  upper.head(d).setConstant(std::log(1e3));
  lower(d) = std::log(1e-4);
  upper(d) = std::log(1e4);
  lower(d + 1) = std::log(kGpNoiseFloor);
  upper(d + 1) = std::log(1.0);

  NegativeLogLikelihood nll(kernel, x, y);
  const auto objective = [&nll](const Vector& theta, Vector& grad) { return nll(theta, grad); };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  const int starts = std::max(1, options.restarts);
  for (int s = 0; s < starts; ++s) {
    Vector theta(d + 2);
    if (s == 0) {
      theta.head(d).setZero();
      theta(d) = 0.0;
      theta(d + 1) = std::log(1e-4);
    } else {
      for (int j = 0; j < d; ++j) theta(j) = std::log(0.1) + unit(rng) * std::log(100.0);
      theta(d) = std::log(0.3) + unit(rng) * std::log(10.0);
      theta(d + 1) = std::log(1e-8) + unit(rng) * std::log(1e6);
    }
    const LbfgsResult r = minimize_lbfgs(objective, theta, lower, upper,
                                         {.max_iterations = options.max_iterations});
    if (r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw ConditioningError("GP covariance is not positive definite for any hyperparameter start");
  }
  return gp_condition(kernel, unpack(best_theta, d), data);
}

GpPrediction gp_predict(const GpModel& model, const Matrix& inputs) {
  GpPrediction out;
  if (inputs.rows() == 0) {
    out.mean = Vector(0);
    out.variance = Vector(0);
    return out;
  }
  if (inputs.cols() != model.input_dim()) {
    throw ShapeError("GP expects " + std::to_string(model.input_dim()) + " input columns, got " +
                     std::to_string(inputs.cols()));
  }
  const Matrix xq = model.input_scaler.transform(inputs);
  const Matrix k_star = kernel_matrix(model.kernel, model.hyper, xq, model.train_inputs);
  const Vector mean_std = k_star * model.alpha;
  Matrix v = k_star.transpose();
  model.cholesky.triangularView<Eigen::Lower>().solveInPlace(v);
  const Vector var_std =
      (model.hyper.signal_variance - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
  const double scale = model.target_scaler.scale()(0);
  out.mean = model.target_scaler.inverse_transform(mean_std);
  out.variance = var_std * scale * scale;
  return out;
}

}  // namespace mfs
