#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tireforce/pipeline.hpp"

namespace {

// 0 ok, 2 configuration error, 3 data error, 4 training divergence.
enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kDiverged = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tire force estimation from inner-liner accelerometer signals"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  bool print_config = false;
  app.add_option("--config", config_path, "Configuration file (key = value lines)");
  app.add_option("--seed", seed, "Master RNG seed (overrides config)");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  auto* generate = app.add_subcommand("generate", "Run the synthetic tire rig");
  auto* preprocess = app.add_subcommand("preprocess", "Filter, detect, resample, normalize");
  auto* train = app.add_subcommand("train", "Train one estimator for one axis");
  auto* evaluate = app.add_subcommand("evaluate", "Score a trained estimator on the test split");
  auto* crossval = app.add_subcommand("crossval", "10-fold cross-validation per axis");
  auto* compare = app.add_subcommand("compare", "Train and score all methods on one axis");

  std::string gen_schedule;
  int gen_revolutions = 0, gen_conditions = 0;
  generate->add_option("--schedule", gen_schedule, "paper | smoke (overrides config)");
  generate->add_option("--revolutions", gen_revolutions, "Smoke schedule: revolutions per condition");
  generate->add_option("--conditions", gen_conditions, "Smoke schedule: number of conditions");

  std::string train_method = "mlp", train_axis = "fz";
  int train_n_trees = 0;
  train->add_option("--method", train_method, "mlp | forest | rnn");
  train->add_option("--axis", train_axis, "fx | fy | fz");
  train->add_option("--n-trees", train_n_trees, "Forest size (overrides config)");
  std::string eval_method = "mlp", eval_axis = "fz";
  evaluate->add_option("--method", eval_method, "mlp | forest | rnn | perfect");
  evaluate->add_option("--axis", eval_axis, "fx | fy | fz");
  std::string compare_axis = "fz";
  compare->add_option("--axis", compare_axis, "fx | fy | fz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    tireforce::RunConfig cfg;
    if (!config_path.empty()) cfg = tireforce::RunConfig::from_file(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.propagate_seed();

    if (print_config) {
      for (const auto& [k, v] : cfg.to_map()) std::cout << k << " = " << v << '\n';
      return kOk;
    }

    if (generate->parsed()) {
      if (!gen_schedule.empty()) cfg.apply_key("schedule", gen_schedule);
      if (gen_revolutions > 0) {
        cfg.schedule = "smoke";
        cfg.smoke_revolutions = gen_revolutions;
      }
      if (gen_conditions > 0) {
        cfg.schedule = "smoke";
        cfg.smoke_conditions = gen_conditions;
      }
      tireforce::run_generate(cfg);
    } else if (preprocess->parsed()) {
      tireforce::run_preprocess(cfg);
    } else if (train->parsed()) {
      if (train_n_trees > 0) cfg.forest.n_trees = train_n_trees;
      tireforce::run_train(cfg, train_method, tireforce::axis_from_string(train_axis));
    } else if (evaluate->parsed()) {
      tireforce::run_evaluate(cfg, eval_method, tireforce::axis_from_string(eval_axis));
    } else if (crossval->parsed()) {
      tireforce::run_crossval(cfg);
    } else if (compare->parsed()) {
      tireforce::run_compare(cfg, tireforce::axis_from_string(compare_axis));
    }
    return kOk;
  } catch (const tireforce::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const tireforce::TrainingDivergedError& e) {
    std::cerr << "training diverged at epoch " << e.epoch << ": " << e.what() << '\n';
    return kDiverged;
  } catch (const tireforce::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const tireforce::PatchNotFoundError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const tireforce::CorruptStreamError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  }
}
