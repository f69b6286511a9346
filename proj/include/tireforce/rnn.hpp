#pragma once

#include <cstdint>
#include <vector>

#include "tireforce/mlp.hpp"  // TrainingDivergedError, EpochRecord
#include "tireforce/preprocess.hpp"

namespace tireforce {

inline constexpr int kSequenceLength = 10;

// One training sample for the recurrent estimator: feature vectors of
// kSequenceLength consecutive revolutions from the same schedule entry, with
// the final revolution's force as target.
struct SequenceSample {
  std::vector<std::vector<double>> steps;
  double target = 0.0;
  std::int64_t entry_id = -1;
  std::int64_t final_row = -1;  // dataset row the target came from
};

// Sliding windows over consecutive revolutions; windows never straddle entry
// boundaries. Entries shorter than the sequence length contribute nothing.
std::vector<SequenceSample> build_sequences(const FeatureDataset& dataset,
                                            int length = kSequenceLength);

// Stacked Elman layers with logistic activation and a linear output head.
struct RnnLayer {
  int input_dim = 0;
  int hidden_dim = 0;
  std::vector<double> w_in;   // hidden x input, row-major
  std::vector<double> w_rec;  // hidden x hidden
  std::vector<double> bias;   // hidden
};

struct RnnNetwork {
  std::vector<RnnLayer> layers;       // sized 10 and 5 by default
  std::vector<double> head_w;         // last hidden size
  double head_b = 0.0;

  int input_dim() const { return layers.front().input_dim; }
};

inline const std::vector<int> kDefaultRnnLayout = {10, 5};

RnnNetwork init_rnn(int input_dim, const std::vector<int>& hidden_layout, std::uint64_t seed);

// Hidden state is zeroed at sequence start; output read at the final step.
double predict_rnn(const RnnNetwork& net, const SequenceSample& sequence);

struct RnnGradient {
  std::vector<RnnLayer> layers;  // same shapes, gradient values
  std::vector<double> head_w;
  double head_b = 0.0;
};

// Gradient of the mean squared error over the given sequences, by full
// backpropagation through time. Per-sequence gradients are summed in index
// order, so the OpenMP path matches the serial reference bit for bit.
RnnGradient bptt_gradient(const RnnNetwork& net, const std::vector<SequenceSample>& batch,
                          bool parallel = true);
RnnGradient bptt_gradient_serial(const RnnNetwork& net, const std::vector<SequenceSample>& batch);

struct RnnTrainConfig {
  std::vector<int> hidden_layout = kDefaultRnnLayout;
  int batch_size = 50;
  int max_epochs = 10000;
  double learning_rate = 0.001;
  double clip_norm = 5.0;
  int patience = 0;  // 0 disables early stopping (faithful full-budget run)
  std::uint64_t seed = 1;
  bool parallel = true;
};

struct RnnTrainResult {
  RnnNetwork network;
  std::vector<EpochRecord> history;
  double best_validation_mse = 0.0;
  int best_epoch = 0;
  std::size_t clip_events = 0;
};

// Minibatch SGD with deterministic shuffling. Returns the weights with the
// lowest validation MSE observed.
RnnTrainResult train_rnn(const std::vector<SequenceSample>& train,
                         const std::vector<SequenceSample>& validation,
                         const RnnTrainConfig& cfg);

double rnn_mse(const RnnNetwork& net, const std::vector<SequenceSample>& data);

}  // namespace tireforce
