// Command-line driver: offline training, static/adaptive evaluation, grid
// sweeps and synthetic trace generation.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "avac/harness.hpp"

namespace {

avac::ExperimentConfig load_config(const std::string& path, long seed_override,
                                   int degree_override) {
  avac::ExperimentConfig cfg = path.empty()
                                   ? avac::ExperimentConfig{}
                                   : avac::ExperimentConfig::from_file(path);
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  if (degree_override > 0) {
    cfg.degree = degree_override;
    cfg.validate();
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RRAM variability-aware controller simulator"};
  app.require_subcommand(1);

  std::string config_path;
  long seed_override = -1;
  int degree_override = 0;

  auto* train = app.add_subcommand("train", "generate training data and fit models");
  train->add_option("--config", config_path, "experiment config file");
  train->add_option("--seed", seed_override, "override experiment seed");
  train->add_option("--degree", degree_override, "model degree to persist")
      ->check(CLI::IsMember({3, 5}));

  auto* eval = app.add_subcommand("eval", "compare reference/static/adaptive");
  std::string models_dir;
  eval->add_option("--config", config_path, "experiment config file");
  eval->add_option("--models", models_dir, "directory with pg/eg model files")
      ->required();
  eval->add_option("--seed", seed_override, "override experiment seed");

  auto* sweep = app.add_subcommand("sweep", "grid of (W,B,pg,eg) for one window");
  std::string sweep_trace, sweep_out;
  bool full_grid = false;
  size_t window_index = 0;
  sweep->add_option("--config", config_path, "experiment config file");
  sweep->add_option("--trace", sweep_trace, "trace name or spec")->required();
  sweep->add_flag("--full-grid", full_grid, "all 120x80 cells");
  sweep->add_option("--window", window_index, "window index (default 0)");
  sweep->add_option("--out", sweep_out, "output CSV path");
  sweep->add_option("--seed", seed_override, "override experiment seed");

  auto* gen = app.add_subcommand("gen-trace", "write a synthetic trace file");
  std::string gen_profile, gen_out;
  size_t gen_length = 10000;
  uint64_t gen_seed = 1;
  gen->add_option("--profile", gen_profile,
                  "profile name (or staged:<name>)")
      ->required();
  gen->add_option("--length", gen_length, "number of accesses");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      auto cfg = load_config(config_path, seed_override, degree_override);
      avac::TrainResult r = avac::train_pipeline(cfg);
      std::cout << "wrote " << r.dataset_path << "\n"
                << "wrote " << r.pg_path << "\n"
                << "wrote " << r.eg_path << "\n";
    } else if (*eval) {
      auto cfg = load_config(config_path, seed_override, 0);
      avac::GainReport rep = avac::eval_pipeline(cfg, models_dir);
      for (const auto& tg : rep.traces) {
        std::cout << tg.trace << ": static pg " << tg.pg_static << " eg "
                  << tg.eg_static << " | adaptive pg " << tg.pg_adaptive
                  << " eg " << tg.eg_adaptive << "\n";
      }
      std::cout << "wrote " << rep.json_path << "\n"
                << "wrote " << rep.gains_csv_path << "\n"
                << "wrote " << rep.intervals_csv_path << "\n";
    } else if (*sweep) {
      auto cfg = load_config(config_path, seed_override, 0);
      // Bare profile names are the common case on this subcommand.
      std::string spec = sweep_trace;
      if (spec.find(':') == std::string::npos &&
          avac::builtin_profiles().count(spec))
        spec = "profile:" + spec;
      std::string path =
          avac::sweep_pipeline(cfg, spec, full_grid, window_index, sweep_out);
      std::cout << "wrote " << path << "\n";
    } else if (*gen) {
      avac::Trace t;
      if (gen_profile.rfind("staged:", 0) == 0) {
        std::string name = gen_profile.substr(7);
        t = avac::staged_trace(avac::staged_stages(name, gen_length, gen_seed),
                               name);
      } else {
        auto it = avac::builtin_profiles().find(gen_profile);
        if (it == avac::builtin_profiles().end())
          throw std::runtime_error("unknown profile: " + gen_profile);
        avac::SyntheticProfile p = it->second;
        p.length = gen_length;
        p.seed = gen_seed;
        t = avac::generate_synthetic(p, gen_profile);
      }
      avac::write_trace(t, gen_out);
      std::cout << "wrote " << gen_out << " (" << t.size() << " accesses)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
