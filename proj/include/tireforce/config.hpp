#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "tireforce/eval.hpp"
#include "tireforce/forest.hpp"
#include "tireforce/mlp.hpp"
#include "tireforce/rnn.hpp"
#include "tireforce/types.hpp"

namespace tireforce {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fully resolved run configuration. Every field has a documented default;
// unknown keys in a config file are rejected.
struct RunConfig {
  // Data generation
  std::string schedule = "paper";   // "paper" or "smoke"
  int smoke_conditions = 1;         // smoke schedule: number of conditions
  int smoke_revolutions = 10;       //   and revolutions per condition
  double noise_std = 5.0;           // m/s^2, used when snr_db == 0
  double snr_db = 20.0;             // per-channel SNR; 0 disables

  TireParams tire;

  // Preprocessing
  double cutoff_hz = 400.0;
  double window_half_deg = 17.5;    // 35.0 selects the half-span reading
  double grid_step_deg = 0.5;
  bool rescale_az = true;

  // Estimators
  MlpTrainConfig mlp;
  ForestConfig forest;
  RnnTrainConfig rnn;

  // Evaluation
  SplitSpec split;
  int cv_folds = 10;
  bool literal_nrms = false;

  // Run plumbing
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // Applies `seed` to all nested seeds and split. Call after parsing.
  void propagate_seed();

  static RunConfig from_file(const std::string& path);
  void apply_key(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
};

std::string hidden_layout_to_string(const std::vector<int>& layout);
std::vector<int> hidden_layout_from_string(const std::string& s);

}  // namespace tireforce
