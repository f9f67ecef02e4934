#pragma once

#include "mfs/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mfs {

/// Raw comma-separated table: a header and string cells, row order preserved.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws SchemaError naming the file's columns if absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Throws SchemaError for an unreadable file, an empty header or a ragged row (names the line).
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Parses a whole cell as a finite double; throws SchemaError naming row and column.
double parse_cell(const std::string& cell, std::size_t row, const std::string& column);

/// Shortest text that parses back to the identical double (never more than 17 digits).
std::string format_double(double value);

/// Benchmark dataset file: columns x1..xd (located by name), y and fidelity.
FidelityDataset load_dataset_csv(const std::filesystem::path& path);
void save_dataset_csv(const FidelityDataset& data, const std::filesystem::path& path);

/// `<problem>_<lf|mf|hf>.csv`
std::string dataset_file_name(const std::string& problem, FidelityLevel level);

}  // namespace mfs
