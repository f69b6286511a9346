#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tireforce/preprocess.hpp"

namespace tireforce {

struct TrainingDivergedError : std::runtime_error {
  int epoch;
  TrainingDivergedError(const std::string& what, int epoch_index)
      : std::runtime_error(what), epoch(epoch_index) {}
};

// Feedforward network with logistic hidden units and a linear output unit.
// Default layout is input -> 10 -> 5 -> 1 hidden plus a single output unit;
// the alternative reading (10-5 hidden, 1 output) is just a shorter layout.
struct MlpNetwork {
  std::vector<int> layer_sizes;                 // [input, hidden..., output]
  std::vector<std::vector<double>> weights;     // per layer, row-major out x in
  std::vector<std::vector<double>> biases;      // per layer, out

  int input_dim() const { return layer_sizes.front(); }
  std::size_t n_layers() const { return weights.size(); }
  std::size_t parameter_count() const;
};

inline const std::vector<int> kDefaultHiddenLayout = {10, 5, 1};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
MlpNetwork init_network(int input_dim, const std::vector<int>& hidden_layout,
                        std::uint64_t seed);

double forward(const MlpNetwork& net, std::span<const double> x);

// Gradient in the same shape as the network parameters.
struct MlpGradient {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

MlpGradient zero_gradient(const MlpNetwork& net);

// Exact gradient of (1/N) * sum (forward(x) - y)^2 over the batch. The batch
// is reduced over fixed-size blocks summed in index order, so the OpenMP path
// is bit-identical to the serial reference.
MlpGradient batch_gradient(const MlpNetwork& net, const std::vector<std::vector<double>>& x,
                           const std::vector<double>& y, bool parallel = true);
MlpGradient batch_gradient_serial(const MlpNetwork& net,
                                  const std::vector<std::vector<double>>& x,
                                  const std::vector<double>& y);

// Rprop+ (with weight backtracking) per-parameter state.
struct RpropConfig {
  double eta_plus = 1.2;
  double eta_minus = 0.5;
  double delta_init = 0.1;
  double delta_min = 1e-6;
  double delta_max = 50.0;
};

struct RpropState {
  RpropConfig cfg;
  std::vector<std::vector<double>> step_w, step_b;        // per-parameter delta
  std::vector<std::vector<double>> prev_grad_w, prev_grad_b;
  std::vector<std::vector<double>> prev_delta_w, prev_delta_b;  // applied update
};

RpropState init_rprop(const MlpNetwork& net, const RpropConfig& cfg = {});

// One Rprop+ update in place. Depends only on gradient signs:
//   same sign      -> delta *= eta_plus (capped), step against the gradient
//   opposite sign  -> delta *= eta_minus (floored), revert previous step,
//                     swallow the gradient for one iteration
//   zero product   -> step against the gradient with unchanged delta
void rprop_step(MlpNetwork& net, const MlpGradient& grads, RpropState& state);

struct MlpTrainConfig {
  std::vector<int> hidden_layout = kDefaultHiddenLayout;
  int max_epochs = 10000;
  int patience = 500;          // epochs without validation improvement
  std::uint64_t seed = 1;
  RpropConfig rprop;
  bool parallel = true;
};

struct EpochRecord {
  double train_mse;
  double validation_mse;
};

struct MlpTrainResult {
  MlpNetwork network;                // weights at the best validation MSE
  std::vector<EpochRecord> history;
  double best_validation_mse;
  int best_epoch;
};

// Full-batch Rprop training; returns the weights with the lowest validation
// MSE seen. Throws TrainingDivergedError if the loss turns non-finite.
MlpTrainResult train_mlp(const std::vector<std::vector<double>>& train_x,
                         const std::vector<double>& train_y,
                         const std::vector<std::vector<double>>& val_x,
                         const std::vector<double>& val_y, const MlpTrainConfig& cfg);

double mse(const MlpNetwork& net, const std::vector<std::vector<double>>& x,
           const std::vector<double>& y);

}  // namespace tireforce
