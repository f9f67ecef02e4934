#include "mfs/optim.hpp"

#include "mfs/errors.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace mfs {
namespace {

Vector project(const Vector& x, const Vector& lower, const Vector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// Gradient with components that would push through an active bound removed.
Vector projected_gradient(const Vector& x, const Vector& g, const Vector& lower,
                          const Vector& upper) {
  Vector pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x(i) <= lower(i) && g(i) > 0.0) || (x(i) >= upper(i) && g(i) < 0.0)) pg(i) = 0.0;
  }
  return pg;
}

}  // namespace

LbfgsResult minimize_lbfgs(const DifferentiableFunction& f, Vector x0, const Vector& lower,
                           const Vector& upper, const LbfgsOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) throw ShapeError("L-BFGS bounds have wrong size");

  LbfgsResult result;
  Vector x = project(x0, lower, upper);
  Vector g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) {
    result.x = x;
    result.value = fx;
    return result;
  }

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Vector pg = projected_gradient(x, g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Two-loop recursion on the free-variable gradient.
    Vector q = pg;
    std::vector<double> alphas(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alphas[i] * y_hist[i];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alphas[i] - beta) * s_hist[i];
    }
    Vector direction = -q;
    // Variables pinned at a bound by their gradient stay put this iteration.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pg(i) == 0.0 && (x(i) <= lower(i) || x(i) >= upper(i))) direction(i) = 0.0;
    }
    if (direction.dot(pg) >= 0.0) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -pg;
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / pg.norm()) : 1.0;
    Vector x_new(n), g_new(n);
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 20; ++ls) {
      x_new = project(x + step * direction, lower, upper);
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      break;
    }

    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double f_old = fx;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (std::abs(f_old - fx) <= options.relative_tolerance * std::max(1.0, std::abs(fx))) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = fx;
  return result;
}

}  // namespace mfs
