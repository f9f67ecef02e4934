#include "mfs/onc.hpp"

#include "mfs/csv.hpp"
#include "mfs/errors.hpp"

#include <algorithm>
#include <random>

namespace mfs {
namespace {

constexpr std::array<OncInputColumn, 8> kInputs{{
    {"heated_temperature", "K", 873.15, 1498.2},
    {"unheated_htc", "W/m^2K", 0.1, 10.0},
    {"air_viscosity", "kg/m s", 1.85e-5, 5.16e-5},
    {"air_conductivity", "W/m K", 0.02551, 0.08452},
    {"helium_viscosity", "kg/m s", 1.98e-5, 6.15e-5},
    {"helium_conductivity", "W/m K", 0.15525, 0.47859},
    {"glass_conductivity", "W/m K", 1.4, 3.2},
    {"glass_thickness", "m", 0.001, 0.004},
}};

constexpr std::array<std::string_view, 2> kOutputs{"time_to_onc", "temp_after_onc"};

std::optional<OncRowIssue> first_violation(const Matrix& inputs, Eigen::Index row) {
  for (std::size_t j = 0; j < kInputs.size(); ++j) {
    const double v = inputs(row, static_cast<Eigen::Index>(j));
    const auto& c = kInputs[j];
    if (v < c.lower || v > c.upper) {
      const std::string which = v < c.lower ? "below the lower bound " : "above the upper bound ";
      return OncRowIssue{static_cast<std::size_t>(row), std::string(c.name), v,
                         std::string(c.name) + " = " + format_double(v) + " is " + which +
                             format_double(v < c.lower ? c.lower : c.upper) + " " +
                             std::string(c.unit)};
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(OncOutput output) { return kOutputs[static_cast<std::size_t>(output)]; }

std::string_view to_string(InputSubset subset) {
  switch (subset) {
    case InputSubset::All:
      return "all";
    case InputSubset::Dominant:
      return "dominant";
    case InputSubset::NonDominant:
      return "nondominant";
  }
  return "?";
}

OncOutput parse_onc_output(std::string_view name) {
  if (name == kOutputs[0]) return OncOutput::TimeToOnc;
  if (name == kOutputs[1]) return OncOutput::TempAfterOnc;
  throw ConfigError("unknown ONC output '" + std::string(name) +
                    "' (valid: time_to_onc, temp_after_onc)");
}

InputSubset parse_input_subset(std::string_view name) {
  for (auto s : {InputSubset::All, InputSubset::Dominant, InputSubset::NonDominant}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown input subset '" + std::string(name) +
                    "' (valid: all, dominant, nondominant)");
}

const std::array<OncInputColumn, 8>& onc_input_columns() { return kInputs; }
const std::array<std::string_view, 2>& onc_output_columns() { return kOutputs; }

OncValidation validate_onc_inputs(const Matrix& inputs) {
  if (inputs.cols() != static_cast<Eigen::Index>(kInputs.size())) {
    throw ShapeError("ONC inputs need 8 columns, got " + std::to_string(inputs.cols()));
  }
  OncValidation v;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    if (auto issue = first_violation(inputs, i)) {
      v.rejected.push_back(std::move(*issue));
    } else {
      v.accepted.push_back(static_cast<std::size_t>(i));
    }
  }
  return v;
}

OncTable load_onc_csv(const std::filesystem::path& path, FidelityLevel level, BoundsPolicy policy) {
  const CsvTable csv = read_csv(path);
  std::array<std::size_t, 8> in_cols{};
  std::array<std::size_t, 2> out_cols{};
  for (std::size_t j = 0; j < kInputs.size(); ++j) in_cols[j] = csv.column(std::string(kInputs[j].name));
  for (std::size_t j = 0; j < kOutputs.size(); ++j) out_cols[j] = csv.column(std::string(kOutputs[j]));

  OncTable t;
  t.level = level;
  const auto n = static_cast<Eigen::Index>(csv.rows.size());
  t.inputs.resize(n, 8);
  t.outputs.resize(n, 2);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < in_cols.size(); ++j) {
      t.inputs(r, static_cast<Eigen::Index>(j)) =
          parse_cell(csv.rows[i][in_cols[j]], i, std::string(kInputs[j].name));
    }
    for (std::size_t j = 0; j < out_cols.size(); ++j) {
      t.outputs(r, static_cast<Eigen::Index>(j)) =
          parse_cell(csv.rows[i][out_cols[j]], i, std::string(kOutputs[j]));
    }
  }

  OncValidation v = validate_onc_inputs(t.inputs);
  if (!v.rejected.empty() && policy == BoundsPolicy::Strict) {
    const auto& bad = v.rejected.front();
    throw SchemaError(path.string() + ": row " + std::to_string(bad.row + 1) + ", column '" +
                      bad.column + "': " + bad.message);
  }
  t.issues = std::move(v.rejected);
  for (const auto& issue : t.issues) {
    t.warnings.push_back("row " + std::to_string(issue.row + 1) + ": " + issue.message);
  }
  if (n != kOncExpectedRows) {
    t.warnings.push_back(path.string() + " has " + std::to_string(n) + " rows, expected " +
                         std::to_string(kOncExpectedRows));
  }
  return t;
}

void save_onc_csv(const OncTable& table, const std::filesystem::path& path) {
  if (table.inputs.cols() != 8 || table.outputs.cols() != 2 ||
      table.inputs.rows() != table.outputs.rows()) {
    throw ShapeError("ONC table needs 8 input and 2 output columns with equal row counts");
  }
  CsvTable csv;
  for (const auto& c : kInputs) csv.columns.emplace_back(c.name);
  for (auto o : kOutputs) csv.columns.emplace_back(o);
  csv.columns.emplace_back("fidelity");
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < 8; ++j) row.push_back(format_double(table.inputs(i, j)));
    for (Eigen::Index j = 0; j < 2; ++j) row.push_back(format_double(table.outputs(i, j)));
    row.emplace_back(to_string(table.level));
    csv.rows.push_back(std::move(row));
  }
  write_csv(csv, path);
}

FidelityDataset onc_dataset(const OncTable& table, OncOutput output) {
  FidelityDataset d;
  d.inputs = table.inputs;
  d.targets = table.outputs.col(static_cast<Eigen::Index>(output));
  d.level = table.level;
  for (const auto& c : kInputs) d.input_names.emplace_back(c.name);
  return d;
}

Matrix sample_onc_inputs(int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("empty design: n must be at least 1");
  std::mt19937_64 rng(seed);
  Matrix x(n, 8);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 8; ++j) {
      std::uniform_real_distribution<double> u(kInputs[static_cast<std::size_t>(j)].lower,
                                               kInputs[static_cast<std::size_t>(j)].upper);
      x(i, j) = u(rng);
    }
  }
  return x;
}

std::vector<std::string> onc_subset_columns(OncOutput output, InputSubset subset) {
  const std::size_t dominant = output == OncOutput::TimeToOnc ? 1 : 2;
  std::vector<std::string> cols;
  for (std::size_t j = 0; j < kInputs.size(); ++j) {
    const bool is_dominant = j < dominant;
    if (subset == InputSubset::All || (subset == InputSubset::Dominant) == is_dominant) {
      cols.emplace_back(kInputs[j].name);
    }
  }
  return cols;
}

FidelityDataset input_subset(const FidelityDataset& data, OncOutput output, InputSubset subset) {
  if (data.input_names.size() != static_cast<std::size_t>(data.dim())) {
    throw SchemaError("input_subset needs named input columns");
  }
  const auto keep = onc_subset_columns(output, subset);
  FidelityDataset out;
  out.level = data.level;
  out.targets = data.targets;
  out.inputs.resize(data.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto it = std::find(data.input_names.begin(), data.input_names.end(), keep[k]);
    if (it == data.input_names.end()) throw SchemaError("dataset lacks input column '" + keep[k] + "'");
    out.inputs.col(static_cast<Eigen::Index>(k)) =
        data.inputs.col(static_cast<Eigen::Index>(it - data.input_names.begin()));
  }
  out.input_names = keep;
  return out;
}

}  // namespace mfs
