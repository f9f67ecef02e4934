#include "mfs/mlp.hpp"

#include "mfs/errors.hpp"
#include "mfs/optim.hpp"

namespace mfs {
namespace {

std::vector<int> full_widths(const MlpConfig& config, int input_dim) {
  std::vector<int> widths{input_dim};
  widths.insert(widths.end(), config.layer_widths.begin(), config.layer_widths.end());
  widths.push_back(1);
  return widths;
}

class MseObjective final : public Objective {
 public:
  MseObjective(Network& net, Matrix x, Vector y, double l2)
      : net_(net), x_(std::move(x)), y_(std::move(y)), l2_(l2) {}

  std::vector<Vector*> blocks() override { return {&net_.parameters()}; }

  double evaluate(std::vector<Vector>& grads) override {
    grads.resize(1);
    Vector& g = grads[0];
    g = Vector::Zero(net_.parameters().size());
    const Matrix pred = net_.forward(x_, cache_);
    const Vector resid = pred.col(0) - y_;
    const double n = static_cast<double>(y_.size());
    const Matrix d_out = (2.0 / n) * resid;
    net_.backward(cache_, d_out, g);
    const Vector& w = net_.parameters();
    g += 2.0 * l2_ * w;
    return resid.squaredNorm() / n + l2_ * w.squaredNorm();
  }

 private:
  Network& net_;
  Matrix x_;
  Vector y_;
  double l2_;
  Network::Cache cache_;
};

void check_data(const MlpModel& model, const FidelityDataset& data) {
  data.validate();
  if (data.empty()) throw PreconditionError("MLP loss needs at least one row");
  if (data.dim() != model.input_dim()) {
    throw ShapeError("MLP trained on " + std::to_string(model.input_dim()) + " inputs, data has " +
                     std::to_string(data.dim()));
  }
}

}  // namespace

MlpConfig MlpConfig::uniform(int layers, int width, double learning_rate, int epochs) {
  MlpConfig c;
  c.layer_widths.assign(static_cast<std::size_t>(layers), width);
  c.learning_rate = learning_rate;
  c.epochs = epochs;
  return c;
}

void MlpConfig::validate() const {
  for (int w : layer_widths) {
    if (w <= 0) throw PreconditionError("hidden widths must be positive");
  }
  if (epochs < 1) throw PreconditionError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw PreconditionError("learning rate must be positive");
  if (!(l2_lambda >= 0.0)) throw PreconditionError("l2 penalty must be non-negative");
}

MlpModel mlp_init(const MlpConfig& config, const FidelityDataset& data) {
  config.validate();
  data.validate();
  if (data.empty()) throw PreconditionError("cannot fit an MLP to an empty dataset");
  MlpModel model;
  model.config = config;
  model.input_scaler = Standardizer::fit(data.inputs);
  model.target_scaler = Standardizer::fit(data.targets);
  model.network = Network(full_widths(config, static_cast<int>(data.dim())), config.activation,
                          false, config.seed);
  return model;
}

void mlp_train(MlpModel& model, const FidelityDataset& data) {
  if (data.dim() != model.input_dim()) throw ShapeError("training data does not match the model's input width");
  const MlpConfig& config = model.config;
  MseObjective objective(model.network, model.input_scaler.transform(data.inputs),
                         model.target_scaler.transform(data.targets), config.l2_lambda);
  model.loss_trace = train_adam(objective, {.learning_rate = config.learning_rate,
                                            .epochs = config.epochs});
}

MlpModel mlp_fit(const MlpConfig& config, const FidelityDataset& data) {
  MlpModel model = mlp_init(config, data);
  mlp_train(model, data);
  return model;
}

Vector mlp_predict(const MlpModel& model, const Matrix& inputs) {
  if (inputs.rows() == 0) return Vector(0);
  if (inputs.cols() != model.input_dim()) {
    throw ShapeError("MLP expects " + std::to_string(model.input_dim()) + " input columns, got " +
                     std::to_string(inputs.cols()));
  }
  const Matrix out = model.network.forward(model.input_scaler.transform(inputs));
  return model.target_scaler.inverse_transform(Vector(out.col(0)));
}

double mlp_loss(const MlpModel& model, const FidelityDataset& data, double l2_lambda) {
  check_data(model, data);
  const Matrix pred = model.network.forward(model.input_scaler.transform(data.inputs));
  const Vector resid = pred.col(0) - model.target_scaler.transform(data.targets);
  return resid.squaredNorm() / static_cast<double>(resid.size()) +
         l2_lambda * model.network.parameters().squaredNorm();
}

Vector mlp_loss_gradient(const MlpModel& model, const FidelityDataset& data, double l2_lambda) {
  check_data(model, data);
  Network copy = model.network;
  MseObjective objective(copy, model.input_scaler.transform(data.inputs),
                         model.target_scaler.transform(data.targets), l2_lambda);
  std::vector<Vector> grads;
  objective.evaluate(grads);
  return grads[0];
}

}  // namespace mfs
