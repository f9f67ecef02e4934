#include "mfs/metrics.hpp"

#include "mfs/errors.hpp"

#include <cmath>
#include <string>

namespace mfs {
namespace {

void check_lengths(const Vector& prediction, const Vector& truth) {
  if (prediction.size() != truth.size()) {
    throw MetricError("prediction has " + std::to_string(prediction.size()) + " entries, truth has " +
                      std::to_string(truth.size()));
  }
  if (truth.size() == 0) throw MetricError("metric of an empty vector is undefined");
}

}  // namespace

double rmse(const Vector& prediction, const Vector& truth) {
  check_lengths(prediction, truth);
  return std::sqrt((prediction - truth).squaredNorm() / static_cast<double>(truth.size()));
}

double r2(const Vector& prediction, const Vector& truth) {
  check_lengths(prediction, truth);
  const double ss_tot = (truth.array() - truth.mean()).square().sum();
  if (!(ss_tot > 0.0)) throw MetricError("R^2 is undefined for a constant truth vector");
  return 1.0 - (prediction - truth).squaredNorm() / ss_tot;
}

}  // namespace mfs
