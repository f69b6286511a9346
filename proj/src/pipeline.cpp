#include "tireforce/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace tireforce {

namespace {

constexpr const char* kToolVersion = "tireforce 1.0";

std::string schedule_hash(const TestSchedule& s) {
  // FNV-1a over a canonical serialization.
  std::ostringstream os;
  os << s.rng_seed << '|' << format_double(s.noise_std) << '|' << format_double(s.snr_db);
  for (const auto& e : s.entries) {
    os << '|' << format_double(e.condition.velocity_kph) << ','
       << format_double(e.condition.vertical_load_n) << ','
       << format_double(e.condition.slip_angle_deg) << ','
       << format_double(e.condition.drive_torque_nm) << ',' << to_string(e.condition.maneuver)
       << ',' << e.n_revolutions << ',' << static_cast<int>(e.sweep) << ','
       << format_double(e.sweep_min) << ',' << format_double(e.sweep_max);
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : os.str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

std::string raw_dir(const RunConfig& cfg) { return cfg.out_dir + "/raw"; }
std::string processed_dir(const RunConfig& cfg) { return cfg.out_dir + "/processed"; }
std::string models_dir(const RunConfig& cfg) { return cfg.out_dir + "/models"; }
std::string reports_dir(const RunConfig& cfg) { return cfg.out_dir + "/reports"; }

std::vector<PatchWindow> load_processed(const RunConfig& cfg) {
  return read_windows(processed_dir(cfg) + "/windows.csv");
}

struct AxisCounts {
  std::size_t fz = 0, fy = 0, fx = 0;
};

AxisCounts count_usable(const std::vector<RevolutionTrace>& traces) {
  AxisCounts c;
  c.fz = traces.size();
  for (const auto& t : traces) {
    if (t.condition.maneuver == ManeuverKind::Cornering) ++c.fy;
    if (t.condition.maneuver == ManeuverKind::Driving) ++c.fx;
  }
  return c;
}

void append_timing(const RunConfig& cfg, const std::string& line) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream f(cfg.out_dir + "/timings.txt", std::ios::app);
  f << line << '\n';
}

}  // namespace

TestSchedule schedule_from_config(const RunConfig& cfg) {
  if (cfg.schedule == "paper") {
    auto s = paper_schedule(cfg.seed, cfg.snr_db);
    if (cfg.snr_db == 0.0) s.noise_std = cfg.noise_std;
    return s;
  }
  // Smoke schedule: a few fixed free-rolling conditions.
  TestSchedule s;
  s.rng_seed = cfg.seed;
  s.snr_db = cfg.snr_db;
  s.noise_std = cfg.snr_db == 0.0 ? cfg.noise_std : 0.0;
  // Cycle the load first so even two conditions span distinct fz targets.
  const double loads[] = {2080, 4160, 6240};
  const double speeds[] = {30, 60, 90};
  for (int c = 0; c < cfg.smoke_conditions; ++c) {
    ScheduleEntry e;
    e.condition.velocity_kph = speeds[(c / 3) % 3];
    e.condition.vertical_load_n = loads[c % 3];
    e.condition.maneuver = ManeuverKind::FreeRolling;
    e.n_revolutions = cfg.smoke_revolutions;
    s.entries.push_back(e);
  }
  return s;
}

PreprocessOutcome preprocess_traces(const std::vector<RevolutionTrace>& traces,
                                    const RunConfig& cfg, bool parallel) {
  struct Slot {
    std::optional<PatchWindow> window;
    std::string error;
  };
  std::vector<Slot> slots(traces.size());

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(traces.size()); ++i) {
    auto& slot = slots[static_cast<std::size_t>(i)];
    try {
      RevolutionTrace t = lowpass_filter(traces[static_cast<std::size_t>(i)], cfg.cutoff_hz);
      if (cfg.rescale_az) t = centripetal_rescale(t);
      const auto markers = detect_contact_patch(t);
      auto w = angular_resample(t, markers, cfg.window_half_deg, cfg.grid_step_deg);
      w.trace_id = i;
      slot.window = std::move(w);
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  }

  PreprocessOutcome out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].window)
      out.windows.push_back(std::move(*slots[i].window));
    else
      out.skipped.push_back({static_cast<std::int64_t>(i), slots[i].error});
  }
  if (out.windows.empty()) throw DataError("no usable traces after preprocessing");

  // Normalization stats come from the training split only.
  const auto split = split_dataset(out.windows.size(), cfg.split);
  std::vector<PatchWindow> train_windows;
  train_windows.reserve(split.train.size());
  for (auto i : split.train) train_windows.push_back(out.windows[i]);
  out.stats = fit_minmax(train_windows);

  for (auto& w : out.windows) w = apply_minmax(w, out.stats);
  return out;
}

std::vector<PatchWindow> select_axis_windows(const std::vector<PatchWindow>& windows,
                                             ForceAxis axis) {
  if (axis == ForceAxis::Fz) return windows;
  std::vector<PatchWindow> out;
  const auto wanted = axis == ForceAxis::Fy ? ManeuverKind::Cornering : ManeuverKind::Driving;
  for (const auto& w : windows)
    if (w.condition.maneuver == wanted) out.push_back(w);
  return out;
}

FeatureDataset axis_dataset(const std::vector<PatchWindow>& windows, ForceAxis axis) {
  return build_feature_dataset(select_axis_windows(windows, axis), axis);
}

Trainer trainer_for(const std::string& method, const RunConfig& cfg) {
  if (method == "mlp") return make_mlp_trainer(cfg.mlp);
  if (method == "forest") return make_forest_trainer(cfg.forest);
  if (method == "rnn") return make_rnn_trainer(cfg.rnn);
  if (method == "perfect") {
    // Label-leak stub for harness sanity checks.
    return [](const FeatureDataset& full, const std::vector<std::size_t>&,
              const std::vector<std::size_t>& test_idx, std::uint64_t) {
      PredictionSeries s;
      for (auto i : test_idx) {
        s.measured.push_back(full.y[i]);
        s.estimated.push_back(full.y[i]);
      }
      return s;
    };
  }
  throw ConfigError("unknown method: " + method);
}

void run_generate(const RunConfig& cfg) {
  const auto schedule = schedule_from_config(cfg);
  const auto traces = generate_dataset(schedule, cfg.tire);
  write_raw_dataset(raw_dir(cfg), traces);

  const auto counts = count_usable(traces);
  std::map<std::string, std::string> manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["seed"] = std::to_string(cfg.seed);
  manifest["schedule"] = cfg.schedule;
  manifest["schedule_hash"] = schedule_hash(schedule);
  manifest["traces"] = std::to_string(traces.size());
  manifest["usable_fz"] = std::to_string(counts.fz);
  manifest["usable_fy"] = std::to_string(counts.fy);
  manifest["usable_fx"] = std::to_string(counts.fx);
  write_manifest(raw_dir(cfg) + "/manifest.txt", manifest);
}

void run_preprocess(const RunConfig& cfg) {
  const auto traces = read_raw_dataset(raw_dir(cfg));
  const auto outcome = preprocess_traces(traces, cfg);

  std::filesystem::create_directories(processed_dir(cfg));
  write_windows(processed_dir(cfg) + "/windows.csv", outcome.windows);
  save_stats(processed_dir(cfg) + "/stats.txt", outcome.stats);

  std::ofstream skipped(processed_dir(cfg) + "/skipped.log");
  for (const auto& s : outcome.skipped) skipped << s.trace_id << ' ' << s.reason << '\n';

  std::map<std::string, std::string> manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["windows"] = std::to_string(outcome.windows.size());
  manifest["skipped"] = std::to_string(outcome.skipped.size());
  manifest["cutoff_hz"] = format_double(cfg.cutoff_hz);
  manifest["window_half_deg"] = format_double(cfg.window_half_deg);
  manifest["grid_step_deg"] = format_double(cfg.grid_step_deg);
  manifest["rescale_az"] = cfg.rescale_az ? "true" : "false";
  write_manifest(processed_dir(cfg) + "/manifest.txt", manifest);
}

void run_train(const RunConfig& cfg, const std::string& method, ForceAxis axis) {
  const auto windows = load_processed(cfg);
  const auto ds = axis_dataset(windows, axis);
  if (ds.x.empty()) throw DataError("no windows usable for axis " + to_string(axis));

  const auto split = split_dataset(ds.x.size(), cfg.split);
  std::filesystem::create_directories(models_dir(cfg));
  const std::string stem = models_dir(cfg) + "/" + method + "_" + to_string(axis);

  std::map<std::string, std::string> manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["method"] = method;
  manifest["axis"] = to_string(axis);
  manifest["data_size"] = std::to_string(ds.x.size());
  const auto t0 = std::chrono::steady_clock::now();

  if (method == "mlp") {
    ChannelRange range{std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
    for (auto i : split.train) {
      range.min = std::min(range.min, ds.y[i]);
      range.max = std::max(range.max, ds.y[i]);
    }
    if (range.degenerate()) throw DataError("constant training target for axis " + to_string(axis));
    auto gather = [&](const std::vector<std::size_t>& rows) {
      std::pair<std::vector<std::vector<double>>, std::vector<double>> out;
      for (auto i : rows) {
        out.first.push_back(ds.x[i]);
        out.second.push_back(normalize_value(ds.y[i], range));
      }
      return out;
    };
    auto [tx, ty] = gather(split.train);
    auto [vx, vy] = gather(split.validation);
    const auto result = train_mlp(tx, ty, vx, vy, cfg.mlp);
    save_mlp(stem + ".model", {result.network, range, axis});
    write_history_csv(stem + "_history.csv", result.history);
    manifest["hidden_layout"] = hidden_layout_to_string(cfg.mlp.hidden_layout);
    manifest["max_epochs"] = std::to_string(cfg.mlp.max_epochs);
    manifest["patience"] = std::to_string(cfg.mlp.patience);
    manifest["best_epoch"] = std::to_string(result.best_epoch);
    manifest["best_validation_mse"] = format_double(result.best_validation_mse);
  } else if (method == "forest") {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& rows : {split.train, split.validation}) {
      for (auto i : rows) {
        x.push_back(ds.x[i]);
        y.push_back(ds.y[i]);
      }
    }
    const auto forest = train_forest(x, y, cfg.forest);
    save_forest(stem + ".model", {forest, axis});
    manifest["n_trees"] = std::to_string(cfg.forest.n_trees);
    manifest["mtry"] = std::to_string(cfg.forest.mtry);
    manifest["min_leaf"] = std::to_string(cfg.forest.min_leaf);
  } else if (method == "rnn") {
    auto sequences = build_sequences(ds);
    if (sequences.empty()) throw DataError("no entry has enough consecutive revolutions");
    std::vector<unsigned char> is_test(ds.x.size(), 0), is_val(ds.x.size(), 0);
    for (auto i : split.test) is_test[i] = 1;
    for (auto i : split.validation) is_val[i] = 1;

    std::vector<SequenceSample> train_set, val_set;
    ChannelRange range{std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
    for (const auto& s : sequences) {
      const auto row = static_cast<std::size_t>(s.final_row);
      if (is_test[row]) continue;
      if (!is_val[row]) {
        range.min = std::min(range.min, s.target);
        range.max = std::max(range.max, s.target);
      }
    }
    if (range.degenerate()) throw DataError("constant training target for axis " + to_string(axis));
    for (auto& s : sequences) {
      const auto row = static_cast<std::size_t>(s.final_row);
      if (is_test[row]) continue;
      SequenceSample copy = s;
      copy.target = normalize_value(copy.target, range);
      (is_val[row] ? val_set : train_set).push_back(std::move(copy));
    }
    const auto result = train_rnn(train_set, val_set, cfg.rnn);
    save_rnn(stem + ".model", {result.network, range, axis, kSequenceLength});
    write_history_csv(stem + "_history.csv", result.history);
    manifest["batch_size"] = std::to_string(cfg.rnn.batch_size);
    manifest["max_epochs"] = std::to_string(cfg.rnn.max_epochs);
    manifest["learning_rate"] = format_double(cfg.rnn.learning_rate);
    manifest["sequence_length"] = std::to_string(kSequenceLength);
    manifest["best_epoch"] = std::to_string(result.best_epoch);
  } else {
    throw ConfigError("unknown method: " + method);
  }

  write_manifest(stem + ".manifest", manifest);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  append_timing(cfg, "train " + method + " " + to_string(axis) + " " + format_double(secs) + " s");
}

void run_evaluate(const RunConfig& cfg, const std::string& method, ForceAxis axis) {
  const auto windows = load_processed(cfg);
  const auto ds = axis_dataset(windows, axis);
  if (ds.x.empty()) throw DataError("no windows usable for axis " + to_string(axis));
  const auto split = split_dataset(ds.x.size(), cfg.split);

  PredictionSeries series;
  const std::string stem = models_dir(cfg) + "/" + method + "_" + to_string(axis);
  if (method == "perfect") {
    for (auto i : split.test) {
      series.measured.push_back(ds.y[i]);
      series.estimated.push_back(ds.y[i]);
    }
  } else if (method == "mlp") {
    const auto model = load_mlp(stem + ".model");
    for (auto i : split.test) {
      series.measured.push_back(ds.y[i]);
      series.estimated.push_back(
          denormalize_value(forward(model.network, ds.x[i]), model.target_range));
    }
  } else if (method == "forest") {
    const auto model = load_forest(stem + ".model");
    for (auto i : split.test) {
      series.measured.push_back(ds.y[i]);
      series.estimated.push_back(model.forest.predict(ds.x[i]));
    }
  } else if (method == "rnn") {
    const auto model = load_rnn(stem + ".model");
    const auto sequences = build_sequences(ds, model.sequence_length);
    std::vector<unsigned char> is_test(ds.x.size(), 0);
    for (auto i : split.test) is_test[i] = 1;
    for (const auto& s : sequences) {
      if (!is_test[static_cast<std::size_t>(s.final_row)]) continue;
      series.measured.push_back(s.target);
      series.estimated.push_back(
          denormalize_value(predict_rnn(model.network, s), model.target_range));
    }
    if (series.measured.empty()) throw DataError("no test sequences for rnn evaluation");
  } else {
    throw ConfigError("unknown method: " + method);
  }

  const double score = nrms(series.measured, series.estimated, cfg.literal_nrms);
  std::filesystem::create_directories(reports_dir(cfg));
  write_plot_series(reports_dir(cfg) + "/" + method + "_" + to_string(axis) + "_test.csv", series);
  std::ofstream report(reports_dir(cfg) + "/evaluate_" + method + "_" + to_string(axis) + ".txt");
  report << "method=" << method << " axis=" << to_string(axis)
         << " nrms_pct=" << format_double(score) << " n_test=" << series.measured.size() << '\n';
  std::cout << method << ' ' << to_string(axis) << " NRMS " << score << " %\n";
}

void run_crossval(const RunConfig& cfg) {
  const auto windows = load_processed(cfg);
  std::filesystem::create_directories(reports_dir(cfg));
  std::ofstream folds(reports_dir(cfg) + "/crossval_folds.csv");
  folds << "axis,fold,nrms_pct\n";

  for (ForceAxis axis : {ForceAxis::Fx, ForceAxis::Fy, ForceAxis::Fz}) {
    const auto ds = axis_dataset(windows, axis);
    if (ds.x.size() < static_cast<std::size_t>(cfg.cv_folds)) continue;
    const auto cv = kfold_cv(ds, cfg.cv_folds, make_mlp_trainer(cfg.mlp), cfg.seed + 7);
    for (std::size_t f = 0; f < cv.fold_nrms_pct.size(); ++f)
      folds << to_string(axis) << ',' << f << ',' << format_double(cv.fold_nrms_pct[f]) << '\n';
    write_boxplot_csv(reports_dir(cfg) + "/crossval_box_" + to_string(axis) + ".csv", cv.summary);
    std::cout << "crossval " << to_string(axis) << " mean " << cv.summary.mean << " % ["
              << cv.summary.min << ", " << cv.summary.max << "]\n";
  }
}

void run_compare(const RunConfig& cfg, ForceAxis axis) {
  const auto windows = load_processed(cfg);
  const auto ds = axis_dataset(windows, axis);
  if (ds.x.empty()) throw DataError("no windows usable for axis " + to_string(axis));

  std::vector<std::pair<std::string, Trainer>> methods = {
      {"mlp", trainer_for("mlp", cfg)},
      {"forest", trainer_for("forest", cfg)},
      {"rnn", trainer_for("rnn", cfg)},
  };
  const auto report = compare_methods(ds, cfg.split, methods, cfg.seed + 13);

  std::filesystem::create_directories(reports_dir(cfg));
  std::ofstream out(reports_dir(cfg) + "/compare_" + to_string(axis) + ".csv");
  out << "method,axis,data_size,nrms_pct,diverged\n";
  for (const auto& m : report.methods) {
    out << m.method << ',' << to_string(axis) << ',' << m.data_size << ','
        << (m.diverged ? "nan" : format_double(m.nrms_pct)) << ',' << (m.diverged ? 1 : 0) << '\n';
    if (!m.diverged)
      write_plot_series(reports_dir(cfg) + "/compare_" + m.method + "_" + to_string(axis) + ".csv",
                        m.series);
    append_timing(cfg, "compare " + m.method + " " + to_string(axis) + " " +
                           format_double(m.train_seconds) + " s");
    std::cout << "compare " << to_string(axis) << ' ' << m.method << ' '
              << (m.diverged ? std::string("diverged") : format_double(m.nrms_pct) + " %") << '\n';
  }
}

}  // namespace tireforce
