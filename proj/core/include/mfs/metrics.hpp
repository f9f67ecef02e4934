#pragma once

#include "mfs/types.hpp"

namespace mfs {

/// Root mean squared error. Throws MetricError on length mismatch or empty input.
double rmse(const Vector& prediction, const Vector& truth);

/// Coefficient of determination 1 - SS_res / SS_tot (SS_tot about the truth mean).
/// Can be negative. Throws MetricError when the truth has zero variance.
double r2(const Vector& prediction, const Vector& truth);

}  // namespace mfs
