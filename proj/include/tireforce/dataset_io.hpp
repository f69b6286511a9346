#pragma once

#include <map>
#include <string>
#include <vector>

#include "tireforce/eval.hpp"
#include "tireforce/preprocess.hpp"
#include "tireforce/types.hpp"

namespace tireforce {

// Raw dataset: per-sample rows in samples.csv, per-trace rows in traces.csv.
// All numbers are plain decimal with 17 significant digits, so regenerated
// files are byte-identical for the same seed.
void write_raw_dataset(const std::string& dir, const std::vector<RevolutionTrace>& traces);
std::vector<RevolutionTrace> read_raw_dataset(const std::string& dir);

// Processed dataset: one row per window with usability flags per axis and the
// 71x3 channel columns (ax_000.., ay_000.., az_000..).
void write_windows(const std::string& path, const std::vector<PatchWindow>& windows);
std::vector<PatchWindow> read_windows(const std::string& path);

// Measured-vs-estimated plot data (sample_index, measured_n, estimated_n).
void write_plot_series(const std::string& path, const PredictionSeries& series);

// Boxplot stats, one 6-column row: min q1 median q3 max mean.
void write_boxplot_csv(const std::string& path, const CvSummary& summary);

void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history);

// Flat key=value manifest.
void write_manifest(const std::string& path, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_manifest(const std::string& path);

std::string format_double(double v);

}  // namespace tireforce
