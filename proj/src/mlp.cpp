#include "tireforce/mlp.hpp"

#include <cmath>

#include "tireforce/rng.hpp"

namespace tireforce {

namespace {

constexpr std::size_t kGradBlock = 256;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Forward pass keeping per-layer activations; activations[0] is the input.
void forward_activations(const MlpNetwork& net, std::span<const double> x,
                         std::vector<std::vector<double>>& activations) {
  if (static_cast<int>(x.size()) != net.input_dim())
    throw std::invalid_argument("feature dimension mismatch");
  activations.resize(net.n_layers() + 1);
  activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    const bool last = l + 1 == net.n_layers();
    auto& a = activations[l + 1];
    a.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double z = net.biases[l][static_cast<std::size_t>(o)];
      const double* wrow = net.weights[l].data() + static_cast<std::size_t>(o) * in;
      const double* prev = activations[l].data();
      for (int i = 0; i < in; ++i) z += wrow[i] * prev[i];
      a[static_cast<std::size_t>(o)] = last ? z : logistic(z);
    }
  }
}

// Accumulates the gradient of (forward(x) - y)^2 (unaveraged) into acc.
void accumulate_sample_gradient(const MlpNetwork& net, std::span<const double> x, double y,
                                MlpGradient& acc, std::vector<std::vector<double>>& activations,
                                std::vector<std::vector<double>>& deltas) {
  forward_activations(net, x, activations);
  const double pred = activations.back()[0];

  deltas.resize(net.n_layers());
  // Output layer: linear activation, d/dpred (pred - y)^2 = 2 (pred - y).
  deltas.back().assign(1, 2.0 * (pred - y));

  for (std::size_t l = net.n_layers() - 1; l-- > 0;) {
    const int out = net.layer_sizes[l + 1];
    const int next_out = net.layer_sizes[l + 2];
    auto& d = deltas[l];
    d.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double s = 0.0;
      for (int k = 0; k < next_out; ++k)
        s += net.weights[l + 1][static_cast<std::size_t>(k) * out + o] *
             deltas[l + 1][static_cast<std::size_t>(k)];
      const double a = activations[l + 1][static_cast<std::size_t>(o)];
      d[static_cast<std::size_t>(o)] = s * a * (1.0 - a);  // logistic derivative
    }
  }

  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    for (int o = 0; o < out; ++o) {
      const double d = deltas[l][static_cast<std::size_t>(o)];
      acc.biases[l][static_cast<std::size_t>(o)] += d;
      double* grow = acc.weights[l].data() + static_cast<std::size_t>(o) * in;
      const double* prev = activations[l].data();
      for (int i = 0; i < in; ++i) grow[i] += d * prev[i];
    }
  }
}

void add_into(MlpGradient& dst, const MlpGradient& src) {
  for (std::size_t l = 0; l < dst.weights.size(); ++l) {
    for (std::size_t i = 0; i < dst.weights[l].size(); ++i) dst.weights[l][i] += src.weights[l][i];
    for (std::size_t i = 0; i < dst.biases[l].size(); ++i) dst.biases[l][i] += src.biases[l][i];
  }
}

void scale(MlpGradient& g, double c) {
  for (auto& w : g.weights)
    for (auto& v : w) v *= c;
  for (auto& b : g.biases)
    for (auto& v : b) v *= c;
}

MlpGradient reduce_blocks(const MlpNetwork& net, const std::vector<std::vector<double>>& x,
                          const std::vector<double>& y, bool parallel) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("bad batch");
  const std::size_t n_blocks = (x.size() + kGradBlock - 1) / kGradBlock;
  std::vector<MlpGradient> blocks(n_blocks);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    auto& acc = blocks[static_cast<std::size_t>(b)];
    acc = zero_gradient(net);
    std::vector<std::vector<double>> activations, deltas;
    const std::size_t lo = static_cast<std::size_t>(b) * kGradBlock;
    const std::size_t hi = std::min(lo + kGradBlock, x.size());
    for (std::size_t i = lo; i < hi; ++i)
      accumulate_sample_gradient(net, x[i], y[i], acc, activations, deltas);
  }

  // Fixed reduction order, independent of thread count.
  MlpGradient total = std::move(blocks[0]);
  for (std::size_t b = 1; b < n_blocks; ++b) add_into(total, blocks[b]);
  scale(total, 1.0 / static_cast<double>(x.size()));
  return total;
}

}  // namespace

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

MlpNetwork init_network(int input_dim, const std::vector<int>& hidden_layout, std::uint64_t seed) {
  if (input_dim < 1) throw std::invalid_argument("input dimension must be positive");
  MlpNetwork net;
  net.layer_sizes.push_back(input_dim);
  for (int h : hidden_layout) {
    if (h < 1) throw std::invalid_argument("zero-size layer");
    net.layer_sizes.push_back(h);
  }
  net.layer_sizes.push_back(1);  // linear output unit

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(static_cast<std::size_t>(in) * out);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(static_cast<std::size_t>(out), 0.0);
  }
  return net;
}

double forward(const MlpNetwork& net, std::span<const double> x) {
  std::vector<std::vector<double>> activations;
  forward_activations(net, x, activations);
  return activations.back()[0];
}

MlpGradient zero_gradient(const MlpNetwork& net) {
  MlpGradient g;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

MlpGradient batch_gradient(const MlpNetwork& net, const std::vector<std::vector<double>>& x,
                           const std::vector<double>& y, bool parallel) {
  return reduce_blocks(net, x, y, parallel);
}

MlpGradient batch_gradient_serial(const MlpNetwork& net,
                                  const std::vector<std::vector<double>>& x,
                                  const std::vector<double>& y) {
  return reduce_blocks(net, x, y, false);
}

RpropState init_rprop(const MlpNetwork& net, const RpropConfig& cfg) {
  RpropState s;
  s.cfg = cfg;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    s.step_w.emplace_back(net.weights[l].size(), cfg.delta_init);
    s.step_b.emplace_back(net.biases[l].size(), cfg.delta_init);
    s.prev_grad_w.emplace_back(net.weights[l].size(), 0.0);
    s.prev_grad_b.emplace_back(net.biases[l].size(), 0.0);
    s.prev_delta_w.emplace_back(net.weights[l].size(), 0.0);
    s.prev_delta_b.emplace_back(net.biases[l].size(), 0.0);
  }
  return s;
}

namespace {

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

void rprop_update(double& w, double g, double& step, double& prev_g, double& prev_dw,
                  const RpropConfig& cfg) {
  const double prod = g * prev_g;
  if (prod > 0) {
    step = std::min(step * cfg.eta_plus, cfg.delta_max);
    const double dw = -sign(g) * step;
    w += dw;
    prev_dw = dw;
    prev_g = g;
  } else if (prod < 0) {
    step = std::max(step * cfg.eta_minus, cfg.delta_min);
    w -= prev_dw;  // backtrack
    prev_dw = 0.0;
    prev_g = 0.0;  // skip adaptation next iteration
  } else {
    const double dw = -sign(g) * step;
    w += dw;
    prev_dw = dw;
    prev_g = g;
  }
}

}  // namespace

void rprop_step(MlpNetwork& net, const MlpGradient& grads, RpropState& state) {
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].size(); ++i)
      rprop_update(net.weights[l][i], grads.weights[l][i], state.step_w[l][i],
                   state.prev_grad_w[l][i], state.prev_delta_w[l][i], state.cfg);
    for (std::size_t i = 0; i < net.biases[l].size(); ++i)
      rprop_update(net.biases[l][i], grads.biases[l][i], state.step_b[l][i],
                   state.prev_grad_b[l][i], state.prev_delta_b[l][i], state.cfg);
  }
}

double mse(const MlpNetwork& net, const std::vector<std::vector<double>>& x,
           const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = forward(net, x[i]) - y[i];
    s += e * e;
  }
  return s / static_cast<double>(x.size());
}

MlpTrainResult train_mlp(const std::vector<std::vector<double>>& train_x,
                         const std::vector<double>& train_y,
                         const std::vector<std::vector<double>>& val_x,
                         const std::vector<double>& val_y, const MlpTrainConfig& cfg) {
  if (train_x.empty() || val_x.empty()) throw std::invalid_argument("empty train/validation set");
  if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");

  MlpNetwork net = init_network(static_cast<int>(train_x[0].size()), cfg.hidden_layout, cfg.seed);
  RpropState state = init_rprop(net, cfg.rprop);

  MlpTrainResult result;
  result.network = net;
  result.best_validation_mse = std::numeric_limits<double>::infinity();
  result.best_epoch = 0;

  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const MlpGradient g = batch_gradient(net, train_x, train_y, cfg.parallel);
    rprop_step(net, g, state);

    const double train_mse = mse(net, train_x, train_y);
    const double val_mse = mse(net, val_x, val_y);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
      throw TrainingDivergedError("non-finite loss", epoch);
    result.history.push_back({train_mse, val_mse});

    if (val_mse < result.best_validation_mse) {
      result.best_validation_mse = val_mse;
      result.best_epoch = epoch;
      result.network = net;
      since_best = 0;
    } else if (++since_best >= cfg.patience && cfg.patience > 0) {
      break;
    }
  }
  return result;
}

}  // namespace tireforce
