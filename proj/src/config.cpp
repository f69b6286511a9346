#include "tireforce/config.hpp"

#include <fstream>
#include <sstream>

#include "tireforce/dataset_io.hpp"

namespace tireforce {

namespace {

double to_double(const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value: " + v);
  }
}

std::int64_t to_int(const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value: " + v);
  }
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean value: " + v);
}

}  // namespace

std::string hidden_layout_to_string(const std::vector<int>& layout) {
  std::string s;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(layout[i]);
  }
  return s;
}

std::vector<int> hidden_layout_from_string(const std::string& s) {
  std::vector<int> layout;
  std::istringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '-')) {
    const auto v = to_int(part);
    if (v < 1) throw ConfigError("layer sizes must be positive: " + s);
    layout.push_back(static_cast<int>(v));
  }
  if (layout.empty()) throw ConfigError("empty layer layout");
  return layout;
}

void RunConfig::apply_key(const std::string& key, const std::string& value) {
  if (key == "schedule") {
    if (value != "paper" && value != "smoke") throw ConfigError("schedule must be paper|smoke");
    schedule = value;
  } else if (key == "smoke_conditions") smoke_conditions = static_cast<int>(to_int(value));
  else if (key == "smoke_revolutions") smoke_revolutions = static_cast<int>(to_int(value));
  else if (key == "noise_std") noise_std = to_double(value);
  else if (key == "snr_db") snr_db = to_double(value);
  else if (key == "tire_unloaded_radius_m") tire.unloaded_radius_m = to_double(value);
  else if (key == "tire_effective_rolling_radius_m") tire.effective_rolling_radius_m = to_double(value);
  else if (key == "tire_vertical_stiffness_n_per_m") tire.vertical_stiffness_n_per_m = to_double(value);
  else if (key == "tire_cornering_stiffness_n_per_rad") tire.cornering_stiffness_n_per_rad = to_double(value);
  else if (key == "tire_longitudinal_stiffness_n") tire.longitudinal_stiffness_n = to_double(value);
  else if (key == "tire_friction_coefficient") tire.friction_coefficient = to_double(value);
  else if (key == "tire_inner_liner_radius_m") tire.inner_liner_radius_m = to_double(value);
  else if (key == "cutoff_hz") cutoff_hz = to_double(value);
  else if (key == "window_half_deg") window_half_deg = to_double(value);
  else if (key == "grid_step_deg") grid_step_deg = to_double(value);
  else if (key == "rescale_az") rescale_az = to_bool(value);
  else if (key == "mlp_hidden_layout") mlp.hidden_layout = hidden_layout_from_string(value);
  else if (key == "mlp_max_epochs") mlp.max_epochs = static_cast<int>(to_int(value));
  else if (key == "mlp_patience") mlp.patience = static_cast<int>(to_int(value));
  else if (key == "rprop_eta_plus") mlp.rprop.eta_plus = to_double(value);
  else if (key == "rprop_eta_minus") mlp.rprop.eta_minus = to_double(value);
  else if (key == "rprop_delta_init") mlp.rprop.delta_init = to_double(value);
  else if (key == "rprop_delta_min") mlp.rprop.delta_min = to_double(value);
  else if (key == "rprop_delta_max") mlp.rprop.delta_max = to_double(value);
  else if (key == "rf_n_trees") forest.n_trees = static_cast<int>(to_int(value));
  else if (key == "rf_mtry") forest.mtry = static_cast<int>(to_int(value));
  else if (key == "rf_min_leaf") forest.min_leaf = static_cast<int>(to_int(value));
  else if (key == "rf_max_depth") forest.max_depth = static_cast<int>(to_int(value));
  else if (key == "rf_bootstrap") forest.bootstrap = to_bool(value);
  else if (key == "rnn_hidden_layout") rnn.hidden_layout = hidden_layout_from_string(value);
  else if (key == "rnn_batch_size") rnn.batch_size = static_cast<int>(to_int(value));
  else if (key == "rnn_max_epochs") rnn.max_epochs = static_cast<int>(to_int(value));
  else if (key == "rnn_learning_rate") rnn.learning_rate = to_double(value);
  else if (key == "rnn_clip_norm") rnn.clip_norm = to_double(value);
  else if (key == "rnn_patience") rnn.patience = static_cast<int>(to_int(value));
  else if (key == "split_train") split.train_fraction = to_double(value);
  else if (key == "split_validation") split.validation_fraction = to_double(value);
  else if (key == "split_test") split.test_fraction = to_double(value);
  else if (key == "cv_folds") cv_folds = static_cast<int>(to_int(value));
  else if (key == "literal_nrms") literal_nrms = to_bool(value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(value));
  else if (key == "out_dir") out_dir = value;
  else throw ConfigError("unknown config key: " + key);
}

void RunConfig::propagate_seed() {
  mlp.seed = seed + 101;
  forest.seed = seed + 202;
  rnn.seed = seed + 303;
  split.rng_seed = seed + 404;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed line " + std::to_string(lineno) + " in " + path);
    auto trim = [](std::string s) {
      const auto b2 = s.find_first_not_of(" \t");
      const auto e2 = s.find_last_not_of(" \t");
      return b2 == std::string::npos ? std::string{} : s.substr(b2, e2 - b2 + 1);
    };
    cfg.apply_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.propagate_seed();
  return cfg;
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["schedule"] = schedule;
  m["smoke_conditions"] = std::to_string(smoke_conditions);
  m["smoke_revolutions"] = std::to_string(smoke_revolutions);
  m["noise_std"] = format_double(noise_std);
  m["snr_db"] = format_double(snr_db);
  m["tire_unloaded_radius_m"] = format_double(tire.unloaded_radius_m);
  m["tire_effective_rolling_radius_m"] = format_double(tire.effective_rolling_radius_m);
  m["tire_vertical_stiffness_n_per_m"] = format_double(tire.vertical_stiffness_n_per_m);
  m["tire_cornering_stiffness_n_per_rad"] = format_double(tire.cornering_stiffness_n_per_rad);
  m["tire_longitudinal_stiffness_n"] = format_double(tire.longitudinal_stiffness_n);
  m["tire_friction_coefficient"] = format_double(tire.friction_coefficient);
  m["tire_inner_liner_radius_m"] = format_double(tire.inner_liner_radius_m);
  m["cutoff_hz"] = format_double(cutoff_hz);
  m["window_half_deg"] = format_double(window_half_deg);
  m["grid_step_deg"] = format_double(grid_step_deg);
  m["rescale_az"] = rescale_az ? "true" : "false";
  m["mlp_hidden_layout"] = hidden_layout_to_string(mlp.hidden_layout);
  m["mlp_max_epochs"] = std::to_string(mlp.max_epochs);
  m["mlp_patience"] = std::to_string(mlp.patience);
  m["rprop_eta_plus"] = format_double(mlp.rprop.eta_plus);
  m["rprop_eta_minus"] = format_double(mlp.rprop.eta_minus);
  m["rprop_delta_init"] = format_double(mlp.rprop.delta_init);
  m["rprop_delta_min"] = format_double(mlp.rprop.delta_min);
  m["rprop_delta_max"] = format_double(mlp.rprop.delta_max);
  m["rf_n_trees"] = std::to_string(forest.n_trees);
  m["rf_mtry"] = std::to_string(forest.mtry);
  m["rf_min_leaf"] = std::to_string(forest.min_leaf);
  m["rf_max_depth"] = std::to_string(forest.max_depth);
  m["rf_bootstrap"] = forest.bootstrap ? "true" : "false";
  m["rnn_hidden_layout"] = hidden_layout_to_string(rnn.hidden_layout);
  m["rnn_batch_size"] = std::to_string(rnn.batch_size);
  m["rnn_max_epochs"] = std::to_string(rnn.max_epochs);
  m["rnn_learning_rate"] = format_double(rnn.learning_rate);
  m["rnn_clip_norm"] = format_double(rnn.clip_norm);
  m["rnn_patience"] = std::to_string(rnn.patience);
  m["split_train"] = format_double(split.train_fraction);
  m["split_validation"] = format_double(split.validation_fraction);
  m["split_test"] = format_double(split.test_fraction);
  m["cv_folds"] = std::to_string(cv_folds);
  m["literal_nrms"] = literal_nrms ? "true" : "false";
  m["seed"] = std::to_string(seed);
  m["out_dir"] = out_dir;
  return m;
}

}  // namespace tireforce
