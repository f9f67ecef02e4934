#include "mfs/csv.hpp"

#include "mfs/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace mfs {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  s = s.substr(b, e - b);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool blank(const std::string& line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  std::string have;
  for (const auto& c : columns) have += (have.empty() ? "" : ", ") + c;
  throw SchemaError("missing column '" + name + "' (have: " + have + ")");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c == name) return true;
  }
  return false;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    if (table.columns.empty()) {
      table.columns = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != table.columns.size()) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.columns.size()) + " cells, found " +
                        std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.columns.empty()) throw SchemaError(path.string() + ": missing header line");
  return table;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path.string());
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  emit(table.columns);
  for (const auto& r : table.rows) emit(r);
  if (!out) throw SchemaError("failed writing " + path.string());
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw SchemaError("row " + std::to_string(row + 1) + ", column '" + column +
                      "': not a finite number: '" + cell + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

FidelityDataset load_dataset_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  std::vector<std::size_t> input_cols;
  for (int k = 1; table.has_column("x" + std::to_string(k)); ++k) {
    input_cols.push_back(table.column("x" + std::to_string(k)));
  }
  if (input_cols.empty()) throw SchemaError(path.string() + ": no input columns x1..xd");
  const std::size_t y_col = table.column("y");
  const bool has_fidelity = table.has_column("fidelity");

  FidelityDataset d;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  d.inputs.resize(n, static_cast<Eigen::Index>(input_cols.size()));
  d.targets.resize(n);
  for (std::size_t j = 0; j < input_cols.size(); ++j) d.input_names.push_back("x" + std::to_string(j + 1));
  std::optional<FidelityLevel> level;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    for (std::size_t j = 0; j < input_cols.size(); ++j) {
      d.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_cell(row[input_cols[j]], i, table.columns[input_cols[j]]);
    }
    d.targets(static_cast<Eigen::Index>(i)) = parse_cell(row[y_col], i, "y");
    if (has_fidelity) {
      const auto tag = parse_fidelity(row[table.column("fidelity")]);
      if (!tag) throw SchemaError("row " + std::to_string(i + 1) + ", column 'fidelity': unknown tag");
      if (level && *level != *tag) throw SchemaError(path.string() + ": mixed fidelity tags");
      level = tag;
    }
  }
  if (level) d.level = *level;
  return d;
}

void save_dataset_csv(const FidelityDataset& data, const std::filesystem::path& path) {
  data.validate();
  CsvTable table;
  for (Eigen::Index j = 0; j < data.dim(); ++j) table.columns.push_back(data.input_name(j));
  table.columns.emplace_back("y");
  table.columns.emplace_back("fidelity");
  const std::string tag(to_string(data.level));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(table.columns.size());
    for (Eigen::Index j = 0; j < data.dim(); ++j) row.push_back(format_double(data.inputs(i, j)));
    row.push_back(format_double(data.targets(i)));
    row.push_back(tag);
    table.rows.push_back(std::move(row));
  }
  write_csv(table, path);
}

std::string dataset_file_name(const std::string& problem, FidelityLevel level) {
  return problem + "_" + std::string(to_string(level)) + ".csv";
}

}  // namespace mfs
