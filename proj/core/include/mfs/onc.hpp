#pragma once

#include "mfs/dataset.hpp"
#include "mfs/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mfs {

struct OncInputColumn {
  std::string_view name;
  std::string_view unit;
  double lower;
  double upper;
};

enum class OncOutput { TimeToOnc, TempAfterOnc };
enum class InputSubset { All, Dominant, NonDominant };

std::string_view to_string(OncOutput output);
std::string_view to_string(InputSubset subset);
OncOutput parse_onc_output(std::string_view name);  // ConfigError on unknown names
InputSubset parse_input_subset(std::string_view name);

/// Input columns of the ONC transient data, in canonical order.
const std::array<OncInputColumn, 8>& onc_input_columns();
const std::array<std::string_view, 2>& onc_output_columns();
inline constexpr int kOncExpectedRows = 1000;

enum class BoundsPolicy { Warn, Strict };

struct OncRowIssue {
  std::size_t row;  // 0-based data row
  std::string column;
  double value;
  std::string message;
};

/// One ONC fidelity file: inputs in canonical column order, both outputs.
struct OncTable {
  Matrix inputs;   // n x 8
  Matrix outputs;  // n x 2 (time_to_onc, temp_after_onc)
  FidelityLevel level = FidelityLevel::HF;
  std::vector<OncRowIssue> issues;  // out-of-bounds rows kept under BoundsPolicy::Warn
  std::vector<std::string> warnings;

  Eigen::Index rows() const { return inputs.rows(); }
};

struct OncValidation {
  std::vector<std::size_t> accepted;
  std::vector<OncRowIssue> rejected;  // one entry per rejected row (its first violation)
};

/// Checks every row of `inputs` (canonical order) against the bounds.
OncValidation validate_onc_inputs(const Matrix& inputs);

/// Reads a name-keyed ONC file (column order is free; extra columns ignored). Missing
/// columns and non-numeric cells throw SchemaError naming row and column. Out-of-bounds
/// inputs throw SchemaError under Strict and are recorded in `issues` under Warn.
OncTable load_onc_csv(const std::filesystem::path& path, FidelityLevel level,
                      BoundsPolicy policy = BoundsPolicy::Warn);
void save_onc_csv(const OncTable& table, const std::filesystem::path& path);

/// Dataset for one output with all eight named input columns.
FidelityDataset onc_dataset(const OncTable& table, OncOutput output);

/// Uniform samples over the input bounds (n x 8); throws PreconditionError for n < 1.
Matrix sample_onc_inputs(int n, std::uint64_t seed);

/// Column names kept for an output / subset pair.
std::vector<std::string> onc_subset_columns(OncOutput output, InputSubset subset);

/// Keeps exactly the columns of the subset, located by name. Throws SchemaError when
/// `data` lacks a required column or has unnamed inputs.
FidelityDataset input_subset(const FidelityDataset& data, OncOutput output, InputSubset subset);

}  // namespace mfs
