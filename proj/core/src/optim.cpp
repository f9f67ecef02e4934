#include "mfs/optim.hpp"

#include "mfs/errors.hpp"

#include <cmath>

namespace mfs {

std::vector<double> train_adam(Objective& objective, const AdamOptions& options) {
  if (options.epochs < 1) throw PreconditionError("epochs must be >= 1");
  if (!(options.learning_rate > 0.0)) throw PreconditionError("learning rate must be positive");

  const std::vector<Vector*> params = objective.blocks();
  std::vector<Vector> grads(params.size());
  std::vector<Vector> m(params.size()), v(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = Vector::Zero(params[i]->size());
    v[i] = Vector::Zero(params[i]->size());
  }

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(options.epochs));
  double beta1_power = 1.0, beta2_power = 1.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double loss = objective.evaluate(grads);
    if (!std::isfinite(loss)) throw DivergenceError(epoch, "non-finite training loss");
    trace.push_back(loss);

    beta1_power *= options.beta1;
    beta2_power *= options.beta2;
    const double step = options.learning_rate * std::sqrt(1.0 - beta2_power) / (1.0 - beta1_power);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * grads[i];
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * grads[i].cwiseAbs2();
      params[i]->array() -= step * m[i].array() / (v[i].array().sqrt() + options.epsilon);
    }
  }
  return trace;
}

}  // namespace mfs
