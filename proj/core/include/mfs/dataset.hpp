#pragma once

#include "mfs/types.hpp"

#include <string>
#include <vector>

namespace mfs {

/// Inputs and targets observed at one fidelity level of one problem.
struct FidelityDataset {
  Matrix inputs;  // n x d, one sample per row
  Vector targets;
  FidelityLevel level = FidelityLevel::HF;
  std::vector<std::string> input_names;  // empty means x1..xd

  Eigen::Index rows() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }
  bool empty() const { return inputs.rows() == 0; }

  /// Throws ShapeError on row-count mismatch, PreconditionError on non-finite entries.
  void validate() const;

  /// Rows at the given indices, in order.
  FidelityDataset subset(const std::vector<int>& rows) const;

  std::string input_name(Eigen::Index column) const;
};

/// Per-column zero-mean / unit-variance transform fitted on training data.
/// Columns with (near) zero spread keep scale 1 so they map to 0 instead of NaN.
class Standardizer {
 public:
  Standardizer() = default;

  static Standardizer fit(const Matrix& data);
  static Standardizer fit(const Vector& data);

  Matrix transform(const Matrix& data) const;
  Matrix inverse_transform(const Matrix& data) const;
  Vector transform(const Vector& data) const;
  Vector inverse_transform(const Vector& data) const;

  /// Leaves one column untouched (shift 0, scale 1).
  void pass_through(Eigen::Index column);

  const Vector& shift() const { return shift_; }
  const Vector& scale() const { return scale_; }
  Eigen::Index size() const { return shift_.size(); }

 private:
  Vector shift_;
  Vector scale_;
};

/// Horizontal concatenation [a, b] with a row-count check.
Matrix hstack(const Matrix& a, const Matrix& b);

}  // namespace mfs
