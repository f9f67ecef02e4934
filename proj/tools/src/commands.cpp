#include "mfs/cli/commands.hpp"

#include "mfs/benchmarks.hpp"
#include "mfs/csv.hpp"
#include "mfs/errors.hpp"
#include "mfs/grid_search.hpp"
#include "mfs/metrics.hpp"
#include "mfs/onc.hpp"
#include "mfs/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace mfs::cli {
namespace {

std::uint64_t level_seed(std::uint64_t data_seed, FidelityLevel level) {
  return data_seed * 3 + static_cast<std::uint64_t>(level);
}

bool variable_dim(const std::string& id) { return id == "rosenbrock3f" || id == "rastrigin3f"; }

MethodId require_method(const std::string& name) {
  if (auto m = parse_method(name)) return *m;
  std::string valid;
  for (const auto& n : method_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown method '" + name + "' (valid: " + valid + ")");
}

SettingsProvider settings_provider(const RunConfig& config) {
  return [config](MethodId id) {
    MethodSettings s = default_settings(id);
    const int layers = config.layers.value_or(static_cast<int>(s.network.layer_widths.size()));
    const int width = config.width.value_or(s.network.layer_widths.empty() ? 64 : s.network.layer_widths.back());
    const double lr = config.learning_rate.value_or(s.network.learning_rate);
    const int epochs = config.epochs.value_or(s.network.epochs);
    s.network = MlpConfig::uniform(layers, width, lr, epochs);
    if (config.gp_restarts) s.gp.restarts = *config.gp_restarts;
    return s;
  };
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

FidelityDataset generate_level(const BenchmarkSpec& spec, FidelityLevel level, int rows,
                               std::uint64_t data_seed) {
  return make_dataset(spec, level, sample_uniform(spec, rows, level_seed(data_seed, level)));
}

std::vector<FidelityLevel> union_levels(const std::vector<Pairing>& pairings) {
  std::set<FidelityLevel> levels;
  for (Pairing p : pairings) {
    for (FidelityLevel l : pairing_levels(p)) levels.insert(l);
  }
  return {levels.begin(), levels.end()};
}

GridPoint read_best_point(const std::filesystem::path& path, GridPoint p) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "method" || key == "stage" || key == "mean_rmse") continue;
    const double v = parse_cell(value, 0, key);
    if (key == "layers") p.layers = static_cast<int>(v);
    else if (key == "width") p.width = static_cast<int>(v);
    else if (key == "learning_rate") p.learning_rate = v;
    else if (key == "alpha") p.alpha = v;
    else if (key == "l2_lambda") p.l2_lambda = v;
    else if (key == "w_low") p.w_low = v;
    else if (key == "w_medium") p.w_medium = v;
    else if (key == "w_high") p.w_high = v;
  }
  return p;
}

std::string best_point_text(const GridResult& result) {
  const GridRow& w = result.winner();
  std::ostringstream out;
  out << "method = " << to_string(result.method) << '\n'
      << "stage = " << to_string(result.stage) << '\n'
      << "layers = " << w.point.layers << '\n'
      << "width = " << w.point.width << '\n'
      << "learning_rate = " << format_double(w.point.learning_rate) << '\n'
      << "alpha = " << format_double(w.point.alpha) << '\n'
      << "l2_lambda = " << format_double(w.point.l2_lambda) << '\n'
      << "w_low = " << format_double(w.point.w_low) << '\n'
      << "w_medium = " << format_double(w.point.w_medium) << '\n'
      << "w_high = " << format_double(w.point.w_high) << '\n'
      << "mean_rmse = " << format_double(w.mean_rmse) << '\n';
  return out.str();
}

}  // namespace

FidelitySources load_sources(const RunConfig& config, const std::vector<FidelityLevel>& levels) {
  FidelitySources sources;
  if (!config.benchmark.empty()) {
    if (config.subset != "all") throw ConfigError("input subsets apply to ONC data only");
    const BenchmarkSpec spec = benchmark_by_name(config.benchmark, config.dim);
    for (FidelityLevel level : levels) {
      if (!spec.has_level(level)) {
        throw ConfigError(spec.name + " has no " + std::string(to_string(level)) + " level");
      }
      sources.at(level) = generate_level(spec, level, config.rows_per_level, config.data_seed);
    }
    return sources;
  }
  if (config.data_dir.empty() || config.problem.empty()) {
    throw ConfigError("give either --benchmark or both --data and --problem");
  }
  const bool onc = config.problem == "onc";
  for (FidelityLevel level : levels) {
    const auto path = config.data_dir / dataset_file_name(config.problem, level);
    if (!std::filesystem::exists(path)) {
      throw PreconditionError("missing fidelity file: " + path.string());
    }
    if (onc) {
      const OncTable table =
          load_onc_csv(path, level, config.strict_bounds ? BoundsPolicy::Strict : BoundsPolicy::Warn);
      for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
      sources.at(level) = input_subset(onc_dataset(table, parse_onc_output(config.output)),
                                       parse_onc_output(config.output), parse_input_subset(config.subset));
    } else {
      if (config.subset != "all") throw ConfigError("input subsets apply to ONC data only");
      sources.at(level) = load_dataset_csv(path);
    }
  }
  return sources;
}

void cmd_generate(const RunConfig& config, std::ostream& log) {
  if (config.benchmark.empty()) throw ConfigError("generate needs --benchmark");
  const BenchmarkSpec spec = benchmark_by_name(config.benchmark, config.dim);
  if (config.n_mf > 0 && spec.levels == 2) {
    throw ConfigError(spec.name + " is a two-fidelity benchmark; --n-mf must be 0");
  }
  const bool defaults = config.n_lf == 0 && config.n_mf == 0 && config.n_hf == 0;
  std::filesystem::create_directories(config.out);
  for (FidelityLevel level : {FidelityLevel::LF, FidelityLevel::MF, FidelityLevel::HF}) {
    if (!spec.has_level(level)) continue;
    const int n = defaults ? config.rows_per_level
                           : (level == FidelityLevel::LF ? config.n_lf
                                                         : level == FidelityLevel::MF ? config.n_mf : config.n_hf);
    if (n <= 0) continue;
    const auto path = config.out / dataset_file_name(spec.name, level);
    save_dataset_csv(generate_level(spec, level, n, config.data_seed), path);
    log << "wrote " << path.string() << " (" << n << " rows)\n";
  }
}

void cmd_tune(const RunConfig& config, std::ostream& log) {
  if (config.methods.size() != 1) throw ConfigError("tune needs exactly one --method");
  const MethodId method = require_method(config.methods.front());
  const GridStage stage = parse_grid_stage(config.stage);
  validate_stage(method, stage);

  const int arity = method_fidelity_count(method);
  Pairing pairing = arity == 3 ? Pairing::LfMfHf : Pairing::LfHf;
  if (!config.pairings.empty()) {
    const Pairing requested = parse_pairing(config.pairings.front());
    if (pairing_fidelity_count(requested) == arity) pairing = requested;
  }
  const int budget = config.budgets.empty() ? 300 : config.budgets.front();

  std::vector<TuningProblem> problems;
  std::vector<std::string> names;
  if (!config.benchmark.empty()) {
    std::stringstream in(config.benchmark);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) names.push_back(item);
    }
  } else {
    names.push_back(config.problem);
  }
  for (const auto& name : names) {
    RunConfig one = config;
    if (!config.benchmark.empty()) one.benchmark = name;
    const FidelitySources sources = load_sources(one, pairing_levels(pairing));
    const SplitPlan plan = make_split_plan(sources, config.split_seed);
    problems.push_back(make_tuning_problem(name, sources, plan, pairing, budget, config.seed));
  }

  MethodSettings base = settings_provider(config)(method);
  base.network.seed = config.seed;
  GridPoint start = point_from_settings(base);
  if (!config.from.empty()) {
    start = read_best_point(config.from, start);
    base = apply_point(base, start, GridStage::Base);
    base.l2_lambda = start.l2_lambda;
    if (method_fidelity_count(method) == 3) {
      base.weights3f = MfWeights::three_fidelity(start.w_low, start.w_medium, start.w_high);
    }
  }
  GridSpec spec;
  if (config.epochs) spec.tuning_epochs = *config.epochs;
  const auto grid = expand_grid(spec, stage, start);
  log << "tuning " << to_string(method) << " (" << to_string(stage) << "): " << grid.size()
      << " candidates x " << problems.size() << " problems\n";
  const GridResult result = grid_search(method, stage, grid, problems, base, evaluate_candidate, config.jobs);

  std::filesystem::create_directories(config.out);
  const std::string stem = std::string(to_string(method)) + "_" + std::string(to_string(stage));
  write_grid_csv(result, config.out / ("grid_" + stem + ".csv"));
  write_text(config.out / ("best_" + stem + ".txt"), best_point_text(result));
  save_run_config(config, config.out / ("run_config_" + stem + ".txt"));
  log << best_point_text(result);
}

void cmd_cost_study(const RunConfig& config, std::ostream& log) {
  CostStudyConfig study;
  for (const auto& m : config.methods) study.methods.push_back(require_method(m));
  if (study.methods.empty()) throw ConfigError("cost-study needs --methods");
  study.pairings.clear();
  for (const auto& p : config.pairings) study.pairings.push_back(parse_pairing(p));
  study.budgets = config.budgets;
  study.seeds = config.seeds();
  study.split_seed = config.split_seed;
  study.subset = config.subset;
  study.output = config.output;
  study.epochs = config.epochs;
  study.settings = settings_provider(config);
  study.jobs = config.jobs;

  const FidelitySources sources = load_sources(config, union_levels(study.pairings));
  const SplitPlan plan = make_split_plan(sources, config.split_seed);
  const auto results = run_cost_study(sources, plan, study);

  std::filesystem::create_directories(config.out);
  write_results_csv(results, config.out / "results.csv");
  write_indices_csv(results, config.out / "train_indices.csv");
  write_split_csv(plan, config.out / "splits.csv");
  const auto summary = summarize(results);
  write_text(config.out / "report.md", render_markdown(summary));
  if (config.svg) write_text(config.out / "report.svg", render_svg(summary));
  save_run_config(config, config.out / "run_config.txt");
  for (const auto& r : results) {
    log << to_string(r.method) << ' ' << to_string(r.pairing) << ' ' << r.budget << " seed " << r.seed
        << ": rmse " << format_double(r.rmse) << ", r2 " << format_double(r.r2) << '\n';
  }
  log << "wrote " << results.size() << " runs to " << (config.out / "results.csv").string() << '\n';
}

void cmd_report(const std::filesystem::path& results, const std::filesystem::path& out_dir, bool svg,
                std::ostream& log) {
  const auto summary = summarize(read_results_csv(results));
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "report.md", render_markdown(summary));
  if (svg) write_text(out_dir / "report.svg", render_svg(summary));
  log << "wrote " << (out_dir / "report.md").string() << '\n';
}

EvalRecord cmd_eval(const std::string& model, const std::filesystem::path& test_file,
                    const std::vector<std::filesystem::path>& train_files, const RunConfig& config) {
  const FidelityDataset test = load_dataset_csv(test_file);
  Vector prediction;
  if (model == "mean") {
    prediction = Vector::Constant(test.rows(), test.targets.mean());
  } else if (model.rfind("constant:", 0) == 0) {
    prediction = Vector::Constant(test.rows(), parse_cell(model.substr(9), 0, "constant"));
  } else if (model.rfind("benchmark:", 0) == 0) {
    const std::string id = model.substr(10);
    const BenchmarkSpec spec = benchmark_by_name(id, variable_dim(id) ? static_cast<int>(test.dim()) : 0);
    const FidelityDataset exact = make_dataset(spec, test.level, test.inputs);
    prediction = exact.targets;
  } else {
    const MethodId method = require_method(model);
    std::vector<FidelityDataset> train;
    for (const auto& f : train_files) train.push_back(load_dataset_csv(f));
    MethodSettings settings = settings_provider(config)(method);
    settings.network.seed = config.seed;
    prediction = mf_predict(*fit_method(method, settings, train), test.inputs);
  }
  EvalRecord rec;
  rec.model = model;
  rec.rows = static_cast<std::size_t>(test.rows());
  rec.rmse = rmse(prediction, test.targets);
  rec.r2 = r2(prediction, test.targets);
  return rec;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multifidelity surrogate toolkit"};
  app.require_subcommand(1);

  // Every run option maps onto a RunConfig key; explicit flags override --config.
  struct Binding {
    CLI::App* owner;
    CLI::Option* option;
    std::string key;
    std::string value;
  };
  std::vector<std::unique_ptr<Binding>> bindings;
  std::string config_path;
  bool strict_bounds = false;
  bool svg = false;

  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    auto b = std::make_unique<Binding>();
    b->key = key;
    b->owner = sub;
    b->option = sub->add_option(flag, b->value, help);
    bindings.push_back(std::move(b));
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value run configuration to start from");
    bind(sub, "--seed", "seed", "base seed");
    bind(sub, "--out", "out", "output directory");
    bind(sub, "--epochs", "epochs", "epoch override");
    bind(sub, "--jobs", "jobs", "worker threads");
    bind(sub, "--benchmark", "benchmark", "benchmark id");
    bind(sub, "--dim", "dim", "dimension for rosenbrock3f / rastrigin3f");
    bind(sub, "--data", "data_dir", "directory holding <problem>_<level>.csv files");
    bind(sub, "--problem", "problem", "file prefix under --data (onc selects the ONC schema)");
    bind(sub, "--output", "output", "ONC output column");
    bind(sub, "--subset", "subset", "input subset: all, dominant, nondominant");
    bind(sub, "--data-seed", "data_seed", "seed for generated benchmark data");
    bind(sub, "--split-seed", "split_seed", "seed of the fixed train/test partition");
    bind(sub, "--rows", "rows_per_level", "rows generated per level");
    bind(sub, "--layers", "layers", "hidden layers override");
    bind(sub, "--width", "width", "hidden width override");
    bind(sub, "--lr", "learning_rate", "learning-rate override");
    bind(sub, "--gp-restarts", "gp_restarts", "optimizer starts per GP fit");
    sub->add_flag("--strict-bounds", strict_bounds, "reject ONC rows outside the input bounds");
  };

  auto* gen = app.add_subcommand("generate", "write benchmark datasets, one CSV per fidelity level");
  common(gen);
  bind(gen, "--n-lf", "n_lf", "LF rows");
  bind(gen, "--n-mf", "n_mf", "MF rows");
  bind(gen, "--n-hf", "n_hf", "HF rows");

  auto* tune = app.add_subcommand("tune", "grid-search one method");
  common(tune);
  bind(tune, "--method", "methods", "method id");
  bind(tune, "--stage", "stage", "base, alpha_lambda or weights3f");
  bind(tune, "--from", "from", "best-config file of a previous stage");
  bind(tune, "--pairing", "pairings", "fidelity pairing");
  bind(tune, "--budget", "budgets", "total budget of the tuning data");

  auto* study = app.add_subcommand("cost-study", "cost-matched study over budgets and pairings");
  common(study);
  bind(study, "--methods", "methods", "comma-separated method ids");
  bind(study, "--pairings", "pairings", "comma-separated pairings");
  bind(study, "--budgets", "budgets", "comma-separated budgets");
  bind(study, "--seeds", "seeds", "number of seeds (seed, seed+1, ...)");
  study->add_flag("--svg", svg, "also write report.svg");

  std::string model;
  std::string test_file;
  std::vector<std::string> train_files;
  auto* eval = app.add_subcommand("eval", "score a predictor on a dataset file");
  common(eval);
  eval->add_option("--model", model, "method id, benchmark:<id>, constant:<v> or mean")->required();
  eval->add_option("--test", test_file, "test dataset CSV")->required();
  eval->add_option("--train", train_files, "training CSVs, lowest fidelity first");

  std::string results_path;
  std::string report_out = "out";
  auto* report = app.add_subcommand("report", "rebuild the markdown report from a results ledger");
  report->add_option("--results", results_path, "results.csv")->required();
  report->add_option("--out", report_out, "output directory");
  report->add_flag("--svg", svg, "also write report.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (active == report) {
      cmd_report(results_path, report_out, svg, out);
      return 0;
    }
    std::string text = config_path.empty() ? std::string() : serialize(load_run_config(config_path));
    for (const auto& b : bindings) {
      if (b->owner == active && b->option->count() > 0) text += b->key + " = " + b->value + "\n";
    }
    if (strict_bounds) text += "strict_bounds = true\n";
    if (svg) text += "svg = true\n";
    RunConfig config = parse_run_config(text);
    config.command = active->get_name();

    if (active == gen) {
      cmd_generate(config, out);
    } else if (active == tune) {
      cmd_tune(config, out);
    } else if (active == study) {
      cmd_cost_study(config, out);
    } else if (active == eval) {
      std::vector<std::filesystem::path> train(train_files.begin(), train_files.end());
      const EvalRecord rec = cmd_eval(model, test_file, train, config);
      out << "model=" << rec.model << " rows=" << rec.rows << " rmse=" << format_double(rec.rmse)
          << " r2=" << format_double(rec.r2) << '\n';
      bool out_given = false;
      for (const auto& b : bindings) out_given |= b->owner == eval && b->key == "out" && b->option->count() > 0;
      if (out_given) {
        std::filesystem::create_directories(config.out);
        CsvTable t;
        t.columns = {"model", "rows", "rmse", "r2"};
        t.rows.push_back({rec.model, std::to_string(rec.rows), format_double(rec.rmse), format_double(rec.r2)});
        write_csv(t, config.out / "metrics.csv");
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mfs::cli
