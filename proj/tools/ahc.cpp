#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ahc/config.hpp"
#include "ahc/runner.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir, int jobs) {
  try {
    ahc::RunConfig config = ahc::load_config(config_path);
    if (const char* env = std::getenv("AHC_SEED_OVERRIDE")) {
      std::size_t used = 0;
      unsigned long long seed = 0;
      try {
        seed = std::stoull(env, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || env[used] != '\0') {
        std::cerr << "error: AHC_SEED_OVERRIDE must be a non-negative integer, got '" << env << "'\n";
        return 1;
      }
      ahc::override_seed(config, seed);
    }
    const ahc::RunOutput out = ahc::run_experiment(config, jobs);
    ahc::write_outputs(out_dir, out, config.output);
    std::cout << (out.passed ? "PASS " : "FAIL ") << ahc::to_string(config.experiment.kind) << " -> " << out_dir
              << '\n';
    return out.passed ? 0 : 2;
  } catch (const ahc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective surface tension of phase-transition energies in random media"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Summarize the results stored in an output directory");
  rep->add_option("--out", report_dir, "Output directory of a finished run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (*run) return run_command(config_path, out_dir, jobs);
  return ahc::report(report_dir, std::cout, std::cerr);
}
