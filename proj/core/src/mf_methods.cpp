#include "mfs/mf_methods.hpp"

#include "mfs/errors.hpp"
#include "mfs/optim.hpp"

#include <Eigen/QR>

#include <array>
#include <chrono>
#include <cmath>

namespace mfs {
namespace {

struct MethodEntry {
  std::string_view name;
  MethodId id;
  int fidelities;
};

constexpr std::array<MethodEntry, 10> kMethods{{
    {"gpmimic", MethodId::GpMimic, 2},
    {"mfgp", MethodId::MfGp, 2},
    {"delta", MethodId::Delta, 2},
    {"flag", MethodId::Flag, 2},
    {"intermediate", MethodId::Intermediate, 2},
    {"twostep", MethodId::TwoStep, 2},
    {"threestep", MethodId::ThreeStep, 2},
    {"gpmimic3f", MethodId::GpMimic3f, 3},
    {"flag3f", MethodId::Flag3f, 3},
    {"intermediate3f", MethodId::Intermediate3f, 3},
}};

void require_nonempty(const FidelityDataset& d, std::string_view what) {
  d.validate();
  if (d.empty()) throw PreconditionError(std::string(what) + " dataset is empty");
}

void require_levels(std::span<const FidelityDataset> datasets, std::string_view method) {
  if (datasets.size() != 2 && datasets.size() != 3) {
    throw PreconditionError(std::string(method) + " needs 2 or 3 fidelity datasets, got " +
                            std::to_string(datasets.size()));
  }
  for (const auto& d : datasets) require_nonempty(d, method);
  for (const auto& d : datasets) {
    if (d.dim() != datasets.front().dim()) {
      throw ShapeError(std::string(method) + ": fidelity datasets differ in input dimension");
    }
  }
}

void require_same_dim(const FidelityDataset& low, const FidelityDataset& high) {
  if (low.dim() != high.dim()) throw ShapeError("low and high datasets differ in input dimension");
}

FidelityDataset augmented(const Matrix& inputs, const Matrix& extra, const Vector& targets,
                          FidelityLevel level) {
  FidelityDataset d;
  d.inputs = hstack(inputs, extra);
  d.targets = targets;
  d.level = level;
  return d;
}

Matrix stack_rows(std::span<const FidelityDataset> datasets, Vector& targets,
                  std::vector<int>& level_of_row) {
  Eigen::Index total = 0;
  for (const auto& d : datasets) total += d.rows();
  const Eigen::Index dim = datasets.front().dim();
  Matrix x(total, dim);
  targets.resize(total);
  level_of_row.resize(static_cast<std::size_t>(total));
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    const auto& d = datasets[k];
    x.middleRows(row, d.rows()) = d.inputs;
    targets.segment(row, d.rows()) = d.targets;
    for (Eigen::Index i = 0; i < d.rows(); ++i) level_of_row[static_cast<std::size_t>(row + i)] = static_cast<int>(k);
    row += d.rows();
  }
  return x;
}

MlpConfig reseeded(MlpConfig cfg, std::uint64_t offset) {
  cfg.seed += offset;
  return cfg;
}

// Weighted per-level MSE over pooled standardized rows.
class JointObjective final : public Objective {
 public:
  JointObjective(JointNetworkModel& model, Matrix x, Vector t, std::vector<int> level_of_row,
                 std::vector<double> weights, double lambda)
      : model_(model),
        x_(std::move(x)),
        t_(std::move(t)),
        level_(std::move(level_of_row)),
        weights_(std::move(weights)),
        lambda_(lambda),
        counts_(weights_.size(), 0) {
    for (int k : level_) ++counts_[static_cast<std::size_t>(k)];
  }

  std::vector<Vector*> blocks() override { return model_.parameter_blocks(); }

  double evaluate(std::vector<Vector>& grads) override {
    JointLossBreakdown parts;
    return evaluate(grads, parts, true);
  }

  double evaluate(std::vector<Vector>& grads, JointLossBreakdown& parts, bool with_gradient) {
    const Matrix out = model_.forward(x_, cache_);
    const std::size_t levels = weights_.size();
    parts.mse.assign(levels, 0.0);
    Matrix d_out = Matrix::Zero(out.rows(), out.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const auto k = static_cast<std::size_t>(level_[static_cast<std::size_t>(i)]);
      const double r = out(i, static_cast<Eigen::Index>(k)) - t_(i);
      const double n = static_cast<double>(counts_[k]);
      parts.mse[k] += r * r / n;
      d_out(i, static_cast<Eigen::Index>(k)) = 2.0 * weights_[k] * r / n;
    }
    parts.penalty = 0.0;
    const auto blocks = model_.parameter_blocks();
    for (const Vector* b : blocks) parts.penalty += b->squaredNorm();
    parts.penalty *= lambda_;
    parts.total = parts.penalty;
    for (std::size_t k = 0; k < levels; ++k) {
      if (weights_[k] != 0.0) parts.total += weights_[k] * parts.mse[k];
    }
    if (with_gradient) {
      grads.resize(blocks.size());
      for (std::size_t b = 0; b < blocks.size(); ++b) grads[b] = Vector::Zero(blocks[b]->size());
      model_.backward(cache_, d_out, grads);
      for (std::size_t b = 0; b < blocks.size(); ++b) grads[b] += 2.0 * lambda_ * *blocks[b];
    }
    return parts.total;
  }

 private:
  JointNetworkModel& model_;
  Matrix x_;
  Vector t_;
  std::vector<int> level_;
  std::vector<double> weights_;
  double lambda_;
  std::vector<int> counts_;
  JointNetworkModel::Cache cache_;
};

JointObjective make_joint_objective(JointNetworkModel& model, std::span<const FidelityDataset> data,
                                    const MfWeights& weights, double lambda) {
  if (static_cast<int>(data.size()) != model.levels || weights.fidelity_count() != model.levels) {
    throw PreconditionError("joint loss needs one dataset and one weight per fidelity level");
  }
  for (const auto& d : data) {
    require_nonempty(d, "joint loss");
    if (d.dim() != model.input_dim()) throw ShapeError("joint loss: input dimension mismatch");
  }
  if (!(lambda >= 0.0)) throw PreconditionError("penalty lambda must be non-negative");
  Vector t;
  std::vector<int> level;
  const Matrix x = stack_rows(data, t, level);
  return JointObjective(model, model.input_scaler.transform(x), model.target_scaler.transform(t),
                        std::move(level), weights.per_level(), lambda);
}

template <typename Model>
void init_joint_common(Model& m, const MlpConfig& cfg, std::span<const FidelityDataset> datasets,
                       std::string_view name) {
  cfg.validate();
  require_levels(datasets, name);
  if (cfg.layer_widths.empty()) {
    throw PreconditionError(std::string(name) + " needs at least one hidden layer");
  }
  Vector t;
  std::vector<int> level;
  const Matrix x = stack_rows(datasets, t, level);
  m.levels = static_cast<int>(datasets.size());
  m.input_scaler = Standardizer::fit(x);
  m.target_scaler = Standardizer::fit(t);
  std::vector<int> widths{static_cast<int>(x.cols())};
  widths.insert(widths.end(), cfg.layer_widths.begin(), cfg.layer_widths.end());
  m.trunk = Network(widths, cfg.activation, true, cfg.seed);
}

template <typename Model>
void train_joint(Model& m, const MlpConfig& cfg, const MfWeights& weights, double lambda,
                 std::span<const FidelityDataset> datasets) {
  if (weights.fidelity_count() != static_cast<int>(datasets.size())) {
    throw PreconditionError("weight count does not match the number of fidelity datasets");
  }
  JointObjective objective = make_joint_objective(m, datasets, weights, lambda);
  m.loss_trace = train_adam(objective, {.learning_rate = cfg.learning_rate, .epochs = cfg.epochs});
}

template <typename F>
double timed(F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view to_string(MethodId id) {
  for (const auto& e : kMethods) {
    if (e.id == id) return e.name;
  }
  return "?";
}

std::optional<MethodId> parse_method(std::string_view name) {
  for (const auto& e : kMethods) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

std::vector<std::string> method_names() {
  std::vector<std::string> out;
  for (const auto& e : kMethods) out.emplace_back(e.name);
  return out;
}

int method_fidelity_count(MethodId id) {
  for (const auto& e : kMethods) {
    if (e.id == id) return e.fidelities;
  }
  return 2;
}

bool method_is_neural(MethodId id) { return id != MethodId::MfGp; }

bool method_is_weighted(MethodId id) {
  return id == MethodId::GpMimic || id == MethodId::Intermediate || id == MethodId::GpMimic3f ||
         id == MethodId::Intermediate3f;
}

MfWeights MfWeights::two_fidelity(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw PreconditionError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  return MfWeights({1.0 - alpha, alpha});
}

MfWeights MfWeights::three_fidelity(double w_low, double w_medium, double w_high) {
  if (!(w_low >= 0.0 && w_medium >= 0.0 && w_high >= 0.0)) {
    throw PreconditionError("fidelity weights must be non-negative");
  }
  if (std::abs(w_low + w_medium + w_high - 1.0) > 1e-12) {
    throw PreconditionError("fidelity weights must sum to 1 (w_l + w_m + w_h = " +
                            std::to_string(w_low + w_medium + w_high) + ")");
  }
  return MfWeights({w_low, w_medium, w_high});
}

bool MfModel::has_flag(std::string_view flag) const {
  for (const auto& f : flags) {
    if (f == flag) return true;
  }
  return false;
}

Vector mf_predict(const MfModel& model, const Matrix& inputs) {
  if (inputs.rows() == 0) return Vector(0);
  if (inputs.cols() != model.input_dim()) {
    throw ShapeError(std::string(to_string(model.method())) + " expects " +
                     std::to_string(model.input_dim()) + " input columns, got " +
                     std::to_string(inputs.cols()));
  }
  return model.predict(inputs);
}

// ---- Delta / TwoStep / ThreeStep -------------------------------------------

Vector DeltaModel::predict(const Matrix& inputs) const {
  const Vector fl = mlp_predict(low, inputs);
  return fl + mlp_predict(residual, hstack(inputs, fl));
}

Vector TwoStepModel::predict(const Matrix& inputs) const {
  const Vector fl = mlp_predict(low, inputs);
  return mlp_predict(high, hstack(inputs, fl));
}

Vector ThreeStepModel::linear_prediction(const Matrix& inputs) const {
  const Vector fl = mlp_predict(low, inputs);
  return mlp_predict(linear, hstack(inputs, fl));
}

Vector ThreeStepModel::predict(const Matrix& inputs) const {
  const Vector fl = mlp_predict(low, inputs);
  const Matrix with_low = hstack(inputs, fl);
  const Vector lin = mlp_predict(linear, with_low);
  return mlp_predict(nonlinear, hstack(with_low, lin));
}

DeltaModel fit_delta(const MlpConfig& cfg_low, const MlpConfig& cfg_delta,
                     const FidelityDataset& low, const FidelityDataset& high) {
  require_nonempty(low, "delta low-fidelity");
  require_nonempty(high, "delta high-fidelity");
  require_same_dim(low, high);
  DeltaModel m;
  m.low = mlp_fit(cfg_low, low);
  const Vector fl = mlp_predict(m.low, high.inputs);
  m.residual = mlp_fit(cfg_delta, augmented(high.inputs, fl, high.targets - fl, high.level));
  if (high.rows() == 1) m.flags.emplace_back("degenerate_hf");
  return m;
}

TwoStepModel fit_twostep(const MlpConfig& cfg_low, const MlpConfig& cfg_high,
                         const FidelityDataset& low, const FidelityDataset& high) {
  require_nonempty(low, "two-step low-fidelity");
  require_nonempty(high, "two-step high-fidelity");
  require_same_dim(low, high);
  TwoStepModel m;
  m.low = mlp_fit(cfg_low, low);
  const Vector fl = mlp_predict(m.low, high.inputs);
  m.high = mlp_fit(cfg_high, augmented(high.inputs, fl, high.targets, high.level));
  if (high.rows() == 1) m.flags.emplace_back("degenerate_hf");
  return m;
}

ThreeStepModel fit_threestep(const MlpConfig& cfg_low, const MlpConfig& cfg_linear,
                             const MlpConfig& cfg_nonlinear, const FidelityDataset& low,
                             const FidelityDataset& high) {
  require_nonempty(low, "three-step low-fidelity");
  require_nonempty(high, "three-step high-fidelity");
  require_same_dim(low, high);
  if (!cfg_linear.layer_widths.empty()) {
    throw PreconditionError("three-step linear stage must have no hidden layers");
  }
  ThreeStepModel m;
  m.low = mlp_fit(cfg_low, low);
  const Vector fl = mlp_predict(m.low, high.inputs);
  const Matrix with_low = hstack(high.inputs, fl);
  m.linear = mlp_fit(cfg_linear, augmented(high.inputs, fl, high.targets, high.level));
  const Vector lin = mlp_predict(m.linear, with_low);
  m.nonlinear = mlp_fit(cfg_nonlinear, augmented(with_low, lin, high.targets, high.level));
  if (high.rows() == 1) m.flags.emplace_back("degenerate_hf");
  return m;
}

// ---- Flag -------------------------------------------------------------------

namespace {

Matrix indicator_columns(Eigen::Index rows, int levels, int level_index) {
  if (levels == 2) return Matrix::Constant(rows, 1, static_cast<double>(level_index));
  Matrix one_hot = Matrix::Zero(rows, levels);
  one_hot.col(level_index).setOnes();
  return one_hot;
}

}  // namespace

Vector FlagModel::predict_at(const Matrix& inputs, int level_index) const {
  if (level_index < 0 || level_index >= levels) throw LevelError("flag level index out of range");
  return mlp_predict(network, hstack(inputs, indicator_columns(inputs.rows(), levels, level_index)));
}

Vector FlagModel::predict(const Matrix& inputs) const { return predict_at(inputs, levels - 1); }

FlagModel fit_flag(const MlpConfig& cfg, std::span<const FidelityDataset> datasets) {
  require_levels(datasets, "flag");
  FlagModel m;
  m.levels = static_cast<int>(datasets.size());
  FidelityDataset pooled;
  pooled.level = datasets.back().level;
  Eigen::Index total = 0;
  for (const auto& d : datasets) total += d.rows();
  const Eigen::Index dim = datasets.front().dim();
  pooled.inputs.resize(total, dim + m.indicator_width());
  pooled.targets.resize(total);
  Eigen::Index row = 0;
  for (int k = 0; k < m.levels; ++k) {
    const auto& d = datasets[static_cast<std::size_t>(k)];
    pooled.inputs.middleRows(row, d.rows()) = hstack(d.inputs, indicator_columns(d.rows(), m.levels, k));
    pooled.targets.segment(row, d.rows()) = d.targets;
    row += d.rows();
  }
  m.network = mlp_init(cfg, pooled);
  for (int k = 0; k < m.indicator_width(); ++k) m.network.input_scaler.pass_through(dim + k);
  mlp_train(m.network, pooled);
  return m;
}

// ---- Joint networks ---------------------------------------------------------

std::vector<Vector*> JointNetworkModel::parameter_blocks() {
  std::vector<Vector*> out;
  for (Network* n : networks()) out.push_back(&n->parameters());
  return out;
}

std::vector<const Vector*> JointNetworkModel::parameter_blocks() const {
  std::vector<const Vector*> out;
  for (const Network* n : networks()) out.push_back(&n->parameters());
  return out;
}

Matrix JointNetworkModel::predict_levels(const Matrix& inputs) const {
  if (inputs.cols() != input_dim()) throw ShapeError("joint model input dimension mismatch");
  Cache cache;
  const Matrix out = forward(input_scaler.transform(inputs), cache);
  return (out.array() * target_scaler.scale()(0) + target_scaler.shift()(0)).matrix();
}

Vector JointNetworkModel::predict(const Matrix& inputs) const {
  return predict_levels(inputs).col(levels - 1);
}

JointLossBreakdown JointNetworkModel::loss(std::span<const FidelityDataset> data,
                                           const MfWeights& weights, double lambda) const {
  auto& self = const_cast<JointNetworkModel&>(*this);  // evaluation only; parameters untouched
  JointObjective objective = make_joint_objective(self, data, weights, lambda);
  std::vector<Vector> unused;
  JointLossBreakdown parts;
  objective.evaluate(unused, parts, false);
  return parts;
}

Vector JointNetworkModel::loss_gradient(std::span<const FidelityDataset> data,
                                        const MfWeights& weights, double lambda) const {
  auto& self = const_cast<JointNetworkModel&>(*this);
  JointObjective objective = make_joint_objective(self, data, weights, lambda);
  std::vector<Vector> grads;
  objective.evaluate(grads);
  Eigen::Index total = 0;
  for (const auto& g : grads) total += g.size();
  Vector flat(total);
  Eigen::Index offset = 0;
  for (const auto& g : grads) {
    flat.segment(offset, g.size()) = g;
    offset += g.size();
  }
  return flat;
}

std::vector<Network*> IntermediateModel::networks() {
  std::vector<Network*> out{&trunk};
  for (auto& h : heads) out.push_back(&h);
  return out;
}

std::vector<const Network*> IntermediateModel::networks() const {
  std::vector<const Network*> out{&trunk};
  for (const auto& h : heads) out.push_back(&h);
  return out;
}

Matrix IntermediateModel::forward(const Matrix& x_std, Cache& cache) const {
  cache.nets.resize(1 + heads.size());
  const Matrix h = trunk.forward(x_std, cache.nets[0]);
  Matrix out(x_std.rows(), levels);
  Matrix head_input = h;
  for (int k = 0; k < levels; ++k) {
    const Matrix y = heads[static_cast<std::size_t>(k)].forward(head_input, cache.nets[static_cast<std::size_t>(k) + 1]);
    out.col(k) = y.col(0);
    if (k + 1 < levels) head_input = hstack(head_input, y);
  }
  return out;
}

void IntermediateModel::backward(const Cache& cache, const Matrix& d_out,
                                 std::vector<Vector>& grads) const {
  const Eigen::Index hidden = trunk.output_dim();
  Matrix d_y = d_out;
  Matrix d_h = Matrix::Zero(d_out.rows(), hidden);
  for (int k = levels - 1; k >= 0; --k) {
    const auto idx = static_cast<std::size_t>(k);
    const Matrix d_in = heads[idx].backward(cache.nets[idx + 1], d_y.col(k), grads[idx + 1]);
    d_h += d_in.leftCols(hidden);
    for (int j = 0; j < k; ++j) d_y.col(j) += d_in.col(hidden + j);
  }
  trunk.backward(cache.nets[0], d_h, grads[0]);
}

std::vector<Network*> GpMimicModel::networks() { return {&trunk, &mixing}; }
std::vector<const Network*> GpMimicModel::networks() const { return {&trunk, &mixing}; }

Matrix GpMimicModel::forward(const Matrix& x_std, Cache& cache) const {
  cache.nets.resize(2);
  const Matrix u = trunk.forward(x_std, cache.nets[0]);
  return mixing.forward(u, cache.nets[1]);
}

void GpMimicModel::backward(const Cache& cache, const Matrix& d_out,
                            std::vector<Vector>& grads) const {
  const Matrix d_u = mixing.backward(cache.nets[1], d_out, grads[1]);
  trunk.backward(cache.nets[0], d_u, grads[0]);
}

IntermediateModel init_intermediate(const MlpConfig& cfg, std::span<const FidelityDataset> datasets) {
  IntermediateModel m;
  init_joint_common(m, cfg, datasets, "intermediate");
  const int hidden = cfg.layer_widths.back();
  m.heads.clear();
  m.heads.emplace_back(std::vector<int>{hidden, 1}, cfg.activation, false, cfg.seed + 101);
  for (int k = 1; k < m.levels; ++k) {
    m.heads.emplace_back(std::vector<int>{hidden + k, hidden, 1}, cfg.activation, false,
                         cfg.seed + 101 + static_cast<std::uint64_t>(k));
  }
  return m;
}

GpMimicModel init_gpmimic(const MlpConfig& cfg, std::span<const FidelityDataset> datasets) {
  GpMimicModel m;
  init_joint_common(m, cfg, datasets, "gpmimic");
  m.mixing = Network({cfg.layer_widths.back(), m.levels}, Activation::Identity, false, cfg.seed + 101);
  return m;
}

IntermediateModel fit_intermediate(const MlpConfig& cfg, const MfWeights& weights, double lambda,
                                   std::span<const FidelityDataset> datasets) {
  IntermediateModel m = init_intermediate(cfg, datasets);
  train_joint(m, cfg, weights, lambda, datasets);
  return m;
}

GpMimicModel fit_gpmimic(const MlpConfig& cfg, const MfWeights& weights, double lambda,
                         std::span<const FidelityDataset> datasets) {
  GpMimicModel m = init_gpmimic(cfg, datasets);
  train_joint(m, cfg, weights, lambda, datasets);
  return m;
}

// ---- MF-GP ------------------------------------------------------------------

Vector MfGpModel::predict(const Matrix& inputs) const {
  return rho * gp_predict(low, inputs).mean + gp_predict(discrepancy, inputs).mean;
}

ScaleEstimate estimate_scale(const Vector& mu_low, const Matrix& inputs, const Vector& y_high) {
  if (mu_low.size() != y_high.size() || inputs.rows() != y_high.size()) {
    throw ShapeError("scale estimate needs one LF prediction per HF row");
  }
  ScaleEstimate est;
  const Eigen::Index n = y_high.size();
  const Eigen::Index d = inputs.cols();
  const Vector mu_c = mu_low.array() - mu_low.mean();
  const double spread = mu_c.squaredNorm();
  if (!(spread > 1e-300) || !(spread > 1e-20 * mu_low.squaredNorm()) || !std::isfinite(spread)) {
    est.fallback = true;
    return est;
  }
  if (n >= d + 4) {
    // Partial out an affine trend in x from both sides, then regress.
    Matrix z(n, d + 1);
    z.col(0).setOnes();
    z.rightCols(d) = Standardizer::fit(inputs).transform(inputs);
    const Eigen::ColPivHouseholderQR<Matrix> qr(z);
    if (qr.rank() == d + 1) {
      const Vector mu_r = mu_low - z * qr.solve(mu_low);
      const Vector y_r = y_high - z * qr.solve(y_high);
      const double denom = mu_r.squaredNorm();
      if (denom > 1e-10 * spread) {
        est.rho = mu_r.dot(y_r) / denom;
        est.trend = true;
        return est;
      }
    }
  }
  const Vector y_c = y_high.array() - y_high.mean();
  est.rho = mu_c.dot(y_c) / spread;
  return est;
}

MfGpModel fit_mfgp(std::span<const FidelityDataset> datasets, const GpOptions& options) {
  if (datasets.size() != 2) {
    throw PreconditionError("mfgp is a two-fidelity method; got " + std::to_string(datasets.size()) +
                            " datasets");
  }
  const auto& low = datasets[0];
  const auto& high = datasets[1];
  require_nonempty(low, "mfgp low-fidelity");
  require_nonempty(high, "mfgp high-fidelity");
  require_same_dim(low, high);

  MfGpModel m;
  m.low = gp_fit(KernelKind::MaternWhite, low, options);
  const Vector mu = gp_predict(m.low, high.inputs).mean;

  const ScaleEstimate est = estimate_scale(mu, high.inputs, high.targets);
  m.rho = est.rho;
  if (est.fallback) m.flags.emplace_back("rho_fallback");

  FidelityDataset resid = high;
  resid.targets = high.targets - m.rho * mu;
  GpOptions disc = options;
  disc.seed = options.seed + 1;
  m.discrepancy = gp_fit(KernelKind::RbfWhite, resid, disc);
  return m;
}

// ---- Registry ---------------------------------------------------------------

MethodSettings default_settings(MethodId id) {
  MethodSettings s;
  s.network = MlpConfig::uniform(4, 128, 1e-3, 2000);
  switch (id) {
    case MethodId::GpMimic:
      s.alpha = 0.05;
      s.l2_lambda = 1e-5;
      break;
    case MethodId::Intermediate:
      s.alpha = 0.05;
      s.l2_lambda = 0.1;
      break;
    case MethodId::Delta:
    case MethodId::TwoStep:
      s.network = MlpConfig::uniform(4, 64, 1e-3, 2000);
      break;
    case MethodId::GpMimic3f:
      s.weights3f = MfWeights::three_fidelity(0.3, 0.2, 0.5);
      s.l2_lambda = 1e-4;
      break;
    case MethodId::Intermediate3f:
      s.weights3f = MfWeights::three_fidelity(0.1, 0.2, 0.7);
      s.l2_lambda = 1e-3;
      break;
    default:
      break;
  }
  return s;
}

std::unique_ptr<MfModel> fit_method(MethodId id, const MethodSettings& settings,
                                    std::span<const FidelityDataset> datasets) {
  const int arity = method_fidelity_count(id);
  if (static_cast<int>(datasets.size()) != arity) {
    throw ConfigError(std::string(to_string(id)) + " takes " + std::to_string(arity) +
                      " fidelity levels, got " + std::to_string(datasets.size()));
  }
  MlpConfig net = settings.network;
  net.l2_lambda = settings.l2_lambda;

  std::unique_ptr<MfModel> model;
  const double seconds = timed([&] {
    switch (id) {
      case MethodId::Delta:
        model = std::make_unique<DeltaModel>(
            fit_delta(net, reseeded(net, 1), datasets[0], datasets[1]));
        break;
      case MethodId::TwoStep:
        model = std::make_unique<TwoStepModel>(
            fit_twostep(net, reseeded(net, 1), datasets[0], datasets[1]));
        break;
      case MethodId::ThreeStep: {
        MlpConfig linear = reseeded(net, 1);
        linear.layer_widths.clear();
        MlpConfig shallow = reseeded(net, 2);
        shallow.layer_widths = {net.layer_widths.empty() ? 16 : net.layer_widths.back()};
        model = std::make_unique<ThreeStepModel>(
            fit_threestep(net, linear, shallow, datasets[0], datasets[1]));
        break;
      }
      case MethodId::Flag:
      case MethodId::Flag3f:
        model = std::make_unique<FlagModel>(fit_flag(net, datasets));
        break;
      case MethodId::Intermediate:
        model = std::make_unique<IntermediateModel>(fit_intermediate(
            net, MfWeights::two_fidelity(settings.alpha), settings.l2_lambda, datasets));
        break;
      case MethodId::Intermediate3f:
        model = std::make_unique<IntermediateModel>(
            fit_intermediate(net, settings.weights3f, settings.l2_lambda, datasets));
        break;
      case MethodId::GpMimic:
        model = std::make_unique<GpMimicModel>(fit_gpmimic(
            net, MfWeights::two_fidelity(settings.alpha), settings.l2_lambda, datasets));
        break;
      case MethodId::GpMimic3f:
        model = std::make_unique<GpMimicModel>(
            fit_gpmimic(net, settings.weights3f, settings.l2_lambda, datasets));
        break;
      case MethodId::MfGp: {
        GpOptions gp = settings.gp;
        gp.seed += net.seed;
        model = std::make_unique<MfGpModel>(fit_mfgp(datasets, gp));
        break;
      }
    }
  });
  model->train_seconds = seconds;
  return model;
}

}  // namespace mfs
