#pragma once

#include <string>

#include "tireforce/eval.hpp"
#include "tireforce/forest.hpp"
#include "tireforce/mlp.hpp"
#include "tireforce/preprocess.hpp"
#include "tireforce/rnn.hpp"

namespace tireforce {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trained estimators are persisted as versioned text with full double
// precision, so a load -> predict round trip reproduces in-memory predictions
// exactly.

struct MlpModel {
  MlpNetwork network;
  ChannelRange target_range;  // min-max scaling applied to the target
  ForceAxis axis = ForceAxis::Fz;
};

struct ForestModel {
  Forest forest;
  ForceAxis axis = ForceAxis::Fz;
};

struct RnnModel {
  RnnNetwork network;
  ChannelRange target_range;
  ForceAxis axis = ForceAxis::Fz;
  int sequence_length = kSequenceLength;
};

void save_mlp(const std::string& path, const MlpModel& model);
MlpModel load_mlp(const std::string& path);

void save_forest(const std::string& path, const ForestModel& model);
ForestModel load_forest(const std::string& path);

void save_rnn(const std::string& path, const RnnModel& model);
RnnModel load_rnn(const std::string& path);

// Normalization stats: one "channel min max" line per channel.
void save_stats(const std::string& path, const MinMaxStats& stats);
MinMaxStats load_stats(const std::string& path);

}  // namespace tireforce
