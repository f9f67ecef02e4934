#include "mfs/benchmarks.hpp"
#include "mfs/csv.hpp"
#include "mfs/errors.hpp"
#include "mfs/onc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace mfs {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mfs_data_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

const char* kOncHeader =
    "heated_temperature,unheated_htc,air_viscosity,air_conductivity,helium_viscosity,"
    "helium_conductivity,glass_conductivity,glass_thickness,time_to_onc,temp_after_onc\n";

TEST(Csv, WellFormedBenchmarkFile) {
  const fs::path dir = scratch("wellformed");
  write_text(dir / "f_hf.csv", "x1,y,fidelity\n0.1,1.5,HF\n0.2,2.5,HF\n0.3,-3,HF\n");
  const FidelityDataset d = load_dataset_csv(dir / "f_hf.csv");
  ASSERT_EQ(d.rows(), 3);
  EXPECT_EQ(d.dim(), 1);
  EXPECT_EQ(d.targets(2), -3.0);
  EXPECT_EQ(d.level, FidelityLevel::HF);
}

TEST(Csv, PermutedHeaderRealignsByName) {
  const fs::path dir = scratch("permuted");
  write_text(dir / "a.csv", "x1,x2,y\n1,2,3\n4,5,6\n");
  write_text(dir / "b.csv", "y,x2,x1\n3,2,1\n6,5,4\n");
  const FidelityDataset a = load_dataset_csv(dir / "a.csv");
  const FidelityDataset b = load_dataset_csv(dir / "b.csv");
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.targets, b.targets);
}

TEST(Csv, ErrorsNameRowAndColumn) {
  const fs::path dir = scratch("errors");
  write_text(dir / "bad_cell.csv", "x1,y\n0.1,1\n0.2,abc\n");
  try {
    load_dataset_csv(dir / "bad_cell.csv");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos) << e.what();
  }
  write_text(dir / "no_y.csv", "x1,z\n0.1,1\n");
  try {
    load_dataset_csv(dir / "no_y.csv");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos) << e.what();
  }
  write_text(dir / "ragged.csv", "x1,y\n0.1,1\n0.2\n");
  EXPECT_THROW(read_csv(dir / "ragged.csv"), SchemaError);
  write_text(dir / "mixed.csv", "x1,y,fidelity\n0.1,1,LF\n0.2,1,HF\n");
  EXPECT_THROW(load_dataset_csv(dir / "mixed.csv"), SchemaError);
  EXPECT_THROW(load_dataset_csv(dir / "missing.csv"), SchemaError);
  EXPECT_THROW(parse_cell("nan", 0, "y"), SchemaError);
  EXPECT_THROW(parse_cell("1.5x", 0, "y"), SchemaError);
  EXPECT_EQ(parse_cell("1e-3", 0, "y"), 1e-3);
}

TEST(Csv, RoundTripIsBitwise) {
  const BenchmarkSpec spec = benchmark_by_name("hartmann6_2f");
  const FidelityDataset d = make_dataset(spec, FidelityLevel::LF, sample_uniform(spec, 50, 3));
  const fs::path dir = scratch("roundtrip");
  const fs::path p = dir / dataset_file_name("hartmann6_2f", FidelityLevel::LF);
  EXPECT_EQ(p.filename(), "hartmann6_2f_lf.csv");
  save_dataset_csv(d, p);
  const FidelityDataset back = load_dataset_csv(p);
  ASSERT_EQ(back.rows(), d.rows());
  EXPECT_EQ(std::memcmp(back.inputs.data(), d.inputs.data(), sizeof(double) * d.inputs.size()), 0);
  EXPECT_EQ(std::memcmp(back.targets.data(), d.targets.data(), sizeof(double) * d.targets.size()), 0);
  EXPECT_EQ(back.level, FidelityLevel::LF);
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 5e-324}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  EXPECT_EQ(format_double(873.15), "873.15");
}

TEST(Csv, EmptyDatasetWritesHeaderOnly) {
  FidelityDataset d;
  d.inputs.resize(0, 2);
  const fs::path dir = scratch("empty");
  save_dataset_csv(d, dir / "e.csv");
  EXPECT_EQ(count_lines(dir / "e.csv"), 1);
  EXPECT_EQ(load_dataset_csv(dir / "e.csv").rows(), 0);
}

TEST(Onc, ThousandRowsGiveThousandAndOneLines) {
  OncTable t;
  t.inputs = sample_onc_inputs(1000, 5);
  t.outputs = Matrix::Random(1000, 2);
  const fs::path dir = scratch("onc1000");
  save_onc_csv(t, dir / "onc_hf.csv");
  EXPECT_EQ(count_lines(dir / "onc_hf.csv"), 1001);
  const OncTable back = load_onc_csv(dir / "onc_hf.csv", FidelityLevel::HF, BoundsPolicy::Strict);
  EXPECT_EQ(back.inputs, t.inputs);
  EXPECT_EQ(back.outputs, t.outputs);
  EXPECT_TRUE(back.warnings.empty());
}

TEST(Onc, StrictBoundsErrorCitesFloor) {
  const fs::path dir = scratch("strict");
  write_text(dir / "onc_lf.csv", std::string(kOncHeader) +
                                      "1000,1,3e-5,0.05,3e-5,0.3,2,0.002,100,900\n"
                                      "500,1,3e-5,0.05,3e-5,0.3,2,0.002,100,900\n");
  try {
    load_onc_csv(dir / "onc_lf.csv", FidelityLevel::LF, BoundsPolicy::Strict);
    FAIL();
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("873.15"), std::string::npos) << msg;
    EXPECT_NE(msg.find("heated_temperature"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  }
  const OncTable warn = load_onc_csv(dir / "onc_lf.csv", FidelityLevel::LF);
  EXPECT_EQ(warn.rows(), 2);
  ASSERT_EQ(warn.issues.size(), 1u);
  EXPECT_EQ(warn.issues[0].row, 1u);
  EXPECT_FALSE(warn.warnings.empty());
}

TEST(Onc, PermutedHeaderAndMissingColumn) {
  const fs::path dir = scratch("onc_perm");
  write_text(dir / "a.csv", std::string(kOncHeader) + "1000,1,3e-5,0.05,3e-5,0.3,2,0.002,100,900\n");
  write_text(dir / "b.csv",
             "temp_after_onc,glass_thickness,heated_temperature,unheated_htc,air_viscosity,"
             "air_conductivity,helium_viscosity,helium_conductivity,glass_conductivity,time_to_onc\n"
             "900,0.002,1000,1,3e-5,0.05,3e-5,0.3,2,100\n");
  const OncTable a = load_onc_csv(dir / "a.csv", FidelityLevel::HF);
  const OncTable b = load_onc_csv(dir / "b.csv", FidelityLevel::HF);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.outputs, b.outputs);
  write_text(dir / "c.csv", "heated_temperature,time_to_onc,temp_after_onc\n1000,1,2\n");
  EXPECT_THROW(load_onc_csv(dir / "c.csv", FidelityLevel::HF), SchemaError);
}

TEST(Onc, ValidationPartitionsRows) {
  Matrix x = sample_onc_inputs(20, 1);
  x(3, 0) = 2000.0;
  x(7, 7) = 0.0;
  x(7, 1) = 50.0;
  const OncValidation v = validate_onc_inputs(x);
  EXPECT_EQ(v.accepted.size() + v.rejected.size(), 20u);
  ASSERT_EQ(v.rejected.size(), 2u);
  EXPECT_EQ(v.rejected[0].row, 3u);
  EXPECT_EQ(v.rejected[1].row, 7u);
}

TEST(Onc, SamplerBoundsDeterminismAndMean) {
  const Matrix x = sample_onc_inputs(10000, 123);
  EXPECT_EQ(x, sample_onc_inputs(10000, 123));
  const auto& cols = onc_input_columns();
  for (int j = 0; j < 8; ++j) {
    const auto& c = cols[static_cast<std::size_t>(j)];
    EXPECT_GE(x.col(j).minCoeff(), c.lower);
    EXPECT_LE(x.col(j).maxCoeff(), c.upper);
    const double mid = 0.5 * (c.lower + c.upper);
    const double se = (c.upper - c.lower) / std::sqrt(12.0) / std::sqrt(10000.0);
    EXPECT_LE(std::abs(x.col(j).mean() - mid), 3.0 * se) << c.name;
  }
  EXPECT_THROW(sample_onc_inputs(0, 1), PreconditionError);
}

TEST(Onc, InputSubsets) {
  OncTable t;
  t.inputs = sample_onc_inputs(5, 2);
  t.outputs = Matrix::Ones(5, 2);
  const FidelityDataset time = onc_dataset(t, OncOutput::TimeToOnc);
  const FidelityDataset temp = onc_dataset(t, OncOutput::TempAfterOnc);
  EXPECT_EQ(input_subset(time, OncOutput::TimeToOnc, InputSubset::Dominant).dim(), 1);
  EXPECT_EQ(input_subset(temp, OncOutput::TempAfterOnc, InputSubset::Dominant).dim(), 2);
  EXPECT_EQ(input_subset(time, OncOutput::TimeToOnc, InputSubset::All).dim(), 8);
  EXPECT_EQ(input_subset(time, OncOutput::TimeToOnc, InputSubset::NonDominant).dim(), 7);
  EXPECT_EQ(input_subset(temp, OncOutput::TempAfterOnc, InputSubset::NonDominant).dim(), 6);
  const FidelityDataset dom = input_subset(temp, OncOutput::TempAfterOnc, InputSubset::Dominant);
  EXPECT_EQ(dom.input_name(0), "heated_temperature");
  EXPECT_EQ(dom.input_name(1), "unheated_htc");
  EXPECT_EQ(dom.inputs.col(1), t.inputs.col(1));
  FidelityDataset unnamed = time;
  unnamed.input_names.clear();
  EXPECT_THROW(input_subset(unnamed, OncOutput::TimeToOnc, InputSubset::Dominant), SchemaError);
  EXPECT_THROW(parse_onc_output("pressure"), ConfigError);
}

}  // namespace
}  // namespace mfs
