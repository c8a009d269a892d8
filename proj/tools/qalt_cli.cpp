#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qalt/config.hpp"
#include "qalt/runner.hpp"

// Keep the BLAS single-threaded: parallelism happens at the run level, and
// per-run results must not depend on the worker count.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace {

struct Overrides {
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;

  void attach(CLI::App& cmd) {
    seed_opt = cmd.add_option("--seed", seed, "Master seed override");
    out_opt = cmd.add_option("--out-dir", out_dir,
                             "Output directory override");
    cmd.add_option("--workers", workers, "Parallel runs (repetitions fan out)")
        ->check(CLI::Range(1, 256));
  }

  void apply(qalt::ExperimentConfig& cfg) const {
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt->count() > 0) cfg.out_dir = out_dir;
  }
};

int execute(const qalt::ExperimentConfig& cfg, int workers) {
  const qalt::RunArtifacts art = qalt::run_experiment(cfg, workers);
  for (const auto& line : art.summaries) std::cout << line << "\n";
  std::cout << "wrote " << art.manifest_path << " and " << art.csv_paths.size()
            << " csv file(s) under " << art.run_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (openblas_set_num_threads) openblas_set_num_threads(1);

  CLI::App app{
      "qalt: alternating-minimization experiments on altered Hamiltonian "
      "families"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Execute a JSON config file");
  std::string config_path;
  run_cmd->add_option("config", config_path, "Path to the config file")
      ->required();
  Overrides run_over;
  run_over.attach(*run_cmd);

  auto* preset_cmd =
      app.add_subcommand("preset", "Resolve a named figure preset");
  std::string preset_name;
  {
    std::string names;
    for (const auto& n : qalt::preset_names()) {
      if (!names.empty()) names += " ";
      names += n;
    }
    preset_cmd->add_option("name", preset_name, "One of: " + names)
        ->required();
  }
  bool emit_config = false;
  bool run_preset = false;
  bool full = false;
  auto* emit_opt = preset_cmd->add_flag(
      "--emit-config", emit_config, "Print the resolved config JSON (default)");
  auto* run_opt =
      preset_cmd->add_flag("--run", run_preset, "Execute the preset");
  emit_opt->excludes(run_opt);
  preset_cmd->add_flag("--full", full,
                       "Full-size variant (fig9a: the complete L=10 sweep)");
  Overrides preset_over;
  preset_over.attach(*preset_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      qalt::ExperimentConfig cfg = qalt::load_config(config_path);
      run_over.apply(cfg);
      return execute(cfg, run_over.workers);
    }
    qalt::ExperimentConfig cfg = qalt::preset(preset_name, full);
    preset_over.apply(cfg);
    if (run_preset) return execute(cfg, preset_over.workers);
    std::cout << qalt::dump_config(cfg);
    return 0;
  } catch (const qalt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qalt::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qalt::DimCapError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return 3;
  } catch (const qalt::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
