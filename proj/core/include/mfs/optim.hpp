#pragma once

#include "mfs/types.hpp"

#include <functional>
#include <vector>

namespace mfs {

/// A differentiable scalar loss over one or more parameter blocks.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::vector<Vector*> blocks() = 0;

  /// Loss at the current parameters. `grads` is resized to match blocks() and
  /// receives the gradient of the returned value.
  virtual double evaluate(std::vector<Vector>& grads) = 0;
};

struct AdamOptions {
  double learning_rate = 1e-3;
  int epochs = 500;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Full-batch Adam. Returns the loss evaluated at the start of every epoch
/// (length == epochs). Throws DivergenceError on the first non-finite loss.
std::vector<double> train_adam(Objective& objective, const AdamOptions& options);

struct LbfgsOptions {
  int max_iterations = 200;
  int memory = 8;
  double gradient_tolerance = 1e-6;
  double relative_tolerance = 1e-10;
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// f(x, grad) returns the value and writes the gradient; +inf marks infeasible points.
using DifferentiableFunction = std::function<double(const Vector&, Vector&)>;

/// Limited-memory BFGS with projection onto the box [lower, upper] and Armijo backtracking.
LbfgsResult minimize_lbfgs(const DifferentiableFunction& f, Vector x0, const Vector& lower,
                           const Vector& upper, const LbfgsOptions& options = {});

}  // namespace mfs
