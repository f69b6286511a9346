#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tireforce/forest.hpp"
#include "tireforce/mlp.hpp"
#include "tireforce/preprocess.hpp"
#include "tireforce/rnn.hpp"

namespace tireforce {

// NRMS error in percent: RMS(measured - estimated) / max|measured| * 100.
// `literal_formula` switches to the unnormalized printed form (sum of squared
// errors over max|measured|), kept for inspection only.
double nrms(const std::vector<double>& measured, const std::vector<double>& estimated,
            bool literal_formula = false);

struct SplitSpec {
  double train_fraction = 0.70;
  double validation_fraction = 0.15;
  double test_fraction = 0.15;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train, validation, test;
};

// Random disjoint exhaustive partition; sizes within one of fraction * N.
SplitIndices split_dataset(std::size_t n, const SplitSpec& spec);

FeatureDataset subset(const FeatureDataset& ds, const std::vector<std::size_t>& indices);

// A trainer fits on fit_idx rows of the full dataset (carving its own
// validation subset when it needs one) and returns measured/estimated pairs
// for the test rows. The full dataset is passed, rather than subsets, because
// the recurrent estimator forms sequences over consecutive revolutions.
struct PredictionSeries {
  std::vector<double> measured;
  std::vector<double> estimated;
};

using Trainer = std::function<PredictionSeries(
    const FeatureDataset& full, const std::vector<std::size_t>& fit_idx,
    const std::vector<std::size_t>& test_idx, std::uint64_t seed)>;

// Fraction of the fit set carved off as validation: 15 / 85, so a 70/15/15
// split spec yields exactly 70% train and 15% validation.
inline constexpr double kValidationShare = 0.15 / 0.85;

Trainer make_mlp_trainer(MlpTrainConfig cfg);
Trainer make_forest_trainer(ForestConfig cfg);
Trainer make_rnn_trainer(RnnTrainConfig cfg);

struct CvSummary {
  double min, q1, median, q3, max, mean;
};

struct CvResult {
  std::vector<double> fold_nrms_pct;                     // k scores
  std::vector<std::vector<std::size_t>> fold_test_idx;   // exhaustive partition
  CvSummary summary;
};

// k-fold cross-validation; fold assignment from the master seed, trainer seed
// = master seed + fold index.
CvResult kfold_cv(const FeatureDataset& dataset, int k, const Trainer& trainer,
                  std::uint64_t seed);

CvSummary summarize(std::vector<double> scores);

struct MethodResult {
  std::string method;
  double nrms_pct = 0.0;
  double train_seconds = 0.0;
  std::size_t data_size = 0;
  PredictionSeries series;
  bool diverged = false;
  std::string error;
};

struct EvalReport {
  ForceAxis axis;
  SplitSpec split;
  std::vector<MethodResult> methods;
};

// Trains every method on the identical fit/test row partition and reports
// NRMS, wall time and data size per method. A method's training divergence is
// recorded and the comparison continues.
EvalReport compare_methods(const FeatureDataset& dataset, const SplitSpec& spec,
                           const std::vector<std::pair<std::string, Trainer>>& methods,
                           std::uint64_t seed);

}  // namespace tireforce
