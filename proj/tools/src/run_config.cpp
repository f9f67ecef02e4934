#include "mfs/cli/run_config.hpp"

#include "mfs/csv.hpp"
#include "mfs/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mfs::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': not an integer: '" + value + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    return parse_cell(value, 0, key);
  } catch (const SchemaError&) {
    throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + value + "'");
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  return out.str();
}

}  // namespace

std::vector<std::uint64_t> RunConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < seed_count; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
  return out;
}

std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  out << "command = " << c.command << '\n';
  if (!c.benchmark.empty()) out << "benchmark = " << c.benchmark << '\n';
  out << "dim = " << c.dim << '\n';
  if (!c.data_dir.empty()) out << "data_dir = " << c.data_dir.string() << '\n';
  if (!c.problem.empty()) out << "problem = " << c.problem << '\n';
  out << "output = " << c.output << '\n';
  out << "subset = " << c.subset << '\n';
  out << "strict_bounds = " << (c.strict_bounds ? "true" : "false") << '\n';
  if (!c.methods.empty()) out << "methods = " << join(c.methods) << '\n';
  out << "pairings = " << join(c.pairings) << '\n';
  out << "budgets = " << join(c.budgets) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "seeds = " << c.seed_count << '\n';
  out << "split_seed = " << c.split_seed << '\n';
  out << "data_seed = " << c.data_seed << '\n';
  out << "rows_per_level = " << c.rows_per_level << '\n';
  if (c.epochs) out << "epochs = " << *c.epochs << '\n';
  if (c.layers) out << "layers = " << *c.layers << '\n';
  if (c.width) out << "width = " << *c.width << '\n';
  if (c.learning_rate) out << "learning_rate = " << format_double(*c.learning_rate) << '\n';
  if (c.gp_restarts) out << "gp_restarts = " << *c.gp_restarts << '\n';
  out << "stage = " << c.stage << '\n';
  if (!c.from.empty()) out << "from = " << c.from.string() << '\n';
  out << "n_lf = " << c.n_lf << '\n';
  out << "n_mf = " << c.n_mf << '\n';
  out << "n_hf = " << c.n_hf << '\n';
  out << "out = " << c.out.string() << '\n';
  out << "jobs = " << c.jobs << '\n';
  out << "svg = " << (c.svg ? "true" : "false") << '\n';
  return out.str();
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "command") c.command = value;
    else if (key == "benchmark") c.benchmark = value;
    else if (key == "dim") c.dim = parse_integer<int>(key, value);
    else if (key == "data_dir") c.data_dir = value;
    else if (key == "problem") c.problem = value;
    else if (key == "output") c.output = value;
    else if (key == "subset") c.subset = value;
    else if (key == "strict_bounds") c.strict_bounds = parse_bool(key, value);
    else if (key == "methods") c.methods = split_list(value);
    else if (key == "pairings") c.pairings = split_list(value);
    else if (key == "budgets") {
      c.budgets.clear();
      for (const auto& b : split_list(value)) c.budgets.push_back(parse_integer<int>(key, b));
    }
    else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "seeds") c.seed_count = parse_integer<int>(key, value);
    else if (key == "split_seed") c.split_seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "data_seed") c.data_seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "rows_per_level") c.rows_per_level = parse_integer<int>(key, value);
    else if (key == "epochs") c.epochs = parse_integer<int>(key, value);
    else if (key == "layers") c.layers = parse_integer<int>(key, value);
    else if (key == "width") c.width = parse_integer<int>(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_real(key, value);
    else if (key == "gp_restarts") c.gp_restarts = parse_integer<int>(key, value);
    else if (key == "stage") c.stage = value;
    else if (key == "from") c.from = value;
    else if (key == "n_lf") c.n_lf = parse_integer<int>(key, value);
    else if (key == "n_mf") c.n_mf = parse_integer<int>(key, value);
    else if (key == "n_hf") c.n_hf = parse_integer<int>(key, value);
    else if (key == "out") c.out = value;
    else if (key == "jobs") c.jobs = parse_integer<int>(key, value);
    else if (key == "svg") c.svg = parse_bool(key, value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (c.seed_count < 1) throw ConfigError("seeds must be at least 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << serialize(config);
}

}  // namespace mfs::cli
