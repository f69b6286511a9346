#pragma once

#include <string>
#include <vector>

#include "tireforce/config.hpp"
#include "tireforce/dataset_io.hpp"
#include "tireforce/eval.hpp"
#include "tireforce/model_io.hpp"
#include "tireforce/preprocess.hpp"
#include "tireforce/simulator.hpp"

namespace tireforce {

TestSchedule schedule_from_config(const RunConfig& cfg);

struct SkippedTrace {
  std::int64_t trace_id;
  std::string reason;
};

struct PreprocessOutcome {
  std::vector<PatchWindow> windows;  // normalized, in trace order
  MinMaxStats stats;                 // fitted on the training split only
  std::vector<SkippedTrace> skipped;
};

// Full preprocessing chain: low-pass filter, optional az speed rescale, patch
// detection, angular resample, then min-max normalization with stats fitted
// on the training rows of cfg.split. Traces with no detectable patch are
// skipped and reported.
PreprocessOutcome preprocess_traces(const std::vector<RevolutionTrace>& traces,
                                    const RunConfig& cfg, bool parallel = true);

// Windows usable for the given axis (fz: all, fy: cornering, fx: driving).
std::vector<PatchWindow> select_axis_windows(const std::vector<PatchWindow>& windows,
                                             ForceAxis axis);

FeatureDataset axis_dataset(const std::vector<PatchWindow>& windows, ForceAxis axis);

Trainer trainer_for(const std::string& method, const RunConfig& cfg);

// CLI subcommand bodies. All artifacts land under cfg.out_dir; wall-clock
// timings go to a separate timings file so every other artifact is a pure
// function of the configuration.
void run_generate(const RunConfig& cfg);
void run_preprocess(const RunConfig& cfg);
void run_train(const RunConfig& cfg, const std::string& method, ForceAxis axis);
void run_evaluate(const RunConfig& cfg, const std::string& method, ForceAxis axis);
void run_crossval(const RunConfig& cfg);
void run_compare(const RunConfig& cfg, ForceAxis axis);

}  // namespace tireforce
