#include "mfs/dataset.hpp"

#include "mfs/errors.hpp"

#include <cmath>

namespace mfs {

std::string_view to_string(FidelityLevel level) {
  switch (level) {
    case FidelityLevel::LF: return "lf";
    case FidelityLevel::MF: return "mf";
    case FidelityLevel::HF: return "hf";
  }
  return "?";
}

std::optional<FidelityLevel> parse_fidelity(std::string_view text) {
  if (text == "lf" || text == "LF") return FidelityLevel::LF;
  if (text == "mf" || text == "MF") return FidelityLevel::MF;
  if (text == "hf" || text == "HF") return FidelityLevel::HF;
  return std::nullopt;
}

void FidelityDataset::validate() const {
  if (inputs.rows() != targets.size()) {
    throw ShapeError("dataset has " + std::to_string(inputs.rows()) + " input rows but " +
                     std::to_string(targets.size()) + " targets");
  }
  if (!input_names.empty() && static_cast<Eigen::Index>(input_names.size()) != inputs.cols()) {
    throw ShapeError("dataset column names do not match input width");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw PreconditionError("dataset contains non-finite values");
  }
}

FidelityDataset FidelityDataset::subset(const std::vector<int>& rows) const {
  FidelityDataset out;
  out.level = level;
  out.input_names = input_names;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    if (r < 0 || r >= inputs.rows()) throw ShapeError("row index out of range: " + std::to_string(r));
    out.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(r);
    out.targets(static_cast<Eigen::Index>(i)) = targets(r);
  }
  return out;
}

std::string FidelityDataset::input_name(Eigen::Index column) const {
  if (!input_names.empty()) return input_names.at(static_cast<std::size_t>(column));
  return "x" + std::to_string(column + 1);
}

Standardizer Standardizer::fit(const Matrix& data) {
  Standardizer s;
  const Eigen::Index d = data.cols();
  s.shift_ = Vector::Zero(d);
  s.scale_ = Vector::Ones(d);
  if (data.rows() == 0) return s;
  s.shift_ = data.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var = (data.col(j).array() - s.shift_(j)).square().mean();
    const double sd = std::sqrt(var);
    // Relative threshold: a column that is constant up to rounding is treated as constant.
    if (sd > 1e-12 * std::max(1.0, std::abs(s.shift_(j)))) s.scale_(j) = sd;
  }
  return s;
}

Standardizer Standardizer::fit(const Vector& data) { return fit(Matrix(data)); }

void Standardizer::pass_through(Eigen::Index column) {
  if (column < 0 || column >= size()) throw ShapeError("standardizer column out of range");
  shift_(column) = 0.0;
  scale_(column) = 1.0;
}

Matrix Standardizer::transform(const Matrix& data) const {
  if (data.cols() != shift_.size()) throw ShapeError("standardizer width mismatch");
  return (data.rowwise() - shift_.transpose()).array().rowwise() / scale_.transpose().array();
}

Matrix Standardizer::inverse_transform(const Matrix& data) const {
  if (data.cols() != shift_.size()) throw ShapeError("standardizer width mismatch");
  return (data.array().rowwise() * scale_.transpose().array()).matrix().rowwise() + shift_.transpose();
}

Vector Standardizer::transform(const Vector& data) const {
  if (shift_.size() != 1) throw ShapeError("vector transform needs a single-column standardizer");
  return (data.array() - shift_(0)) / scale_(0);
}

Vector Standardizer::inverse_transform(const Vector& data) const {
  if (shift_.size() != 1) throw ShapeError("vector transform needs a single-column standardizer");
  return data.array() * scale_(0) + shift_(0);
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hstack row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace mfs
