#include "tireforce/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tireforce/rng.hpp"

namespace tireforce {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Hidden activations for every layer and step; states[l][t] has layer l's
// state after consuming step t. t = -1 (zero state) is implicit.
void unroll(const RnnNetwork& net, const SequenceSample& seq,
            std::vector<std::vector<std::vector<double>>>& states) {
  const auto steps = seq.steps.size();
  states.assign(net.layers.size(), {});
  for (std::size_t l = 0; l < net.layers.size(); ++l)
    states[l].assign(steps, std::vector<double>(static_cast<std::size_t>(net.layers[l].hidden_dim), 0.0));

  for (std::size_t t = 0; t < steps; ++t) {
    const std::vector<double>* input = &seq.steps[t];
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      const auto& layer = net.layers[l];
      if (static_cast<int>(input->size()) != layer.input_dim)
        throw std::invalid_argument("sequence feature dimension mismatch");
      auto& h = states[l][t];
      for (int o = 0; o < layer.hidden_dim; ++o) {
        double z = layer.bias[static_cast<std::size_t>(o)];
        const double* wrow = layer.w_in.data() + static_cast<std::size_t>(o) * layer.input_dim;
        for (int i = 0; i < layer.input_dim; ++i) z += wrow[i] * (*input)[static_cast<std::size_t>(i)];
        if (t > 0) {
          const double* urow = layer.w_rec.data() + static_cast<std::size_t>(o) * layer.hidden_dim;
          const auto& prev = states[l][t - 1];
          for (int i = 0; i < layer.hidden_dim; ++i) z += urow[i] * prev[static_cast<std::size_t>(i)];
        }
        h[static_cast<std::size_t>(o)] = logistic(z);
      }
      input = &states[l][t];
    }
  }
}

RnnGradient zero_like(const RnnNetwork& net) {
  RnnGradient g;
  for (const auto& l : net.layers) {
    RnnLayer z = l;
    std::fill(z.w_in.begin(), z.w_in.end(), 0.0);
    std::fill(z.w_rec.begin(), z.w_rec.end(), 0.0);
    std::fill(z.bias.begin(), z.bias.end(), 0.0);
    g.layers.push_back(std::move(z));
  }
  g.head_w.assign(net.head_w.size(), 0.0);
  g.head_b = 0.0;
  return g;
}

// Accumulates the (unaveraged) gradient of (pred - target)^2 for one sequence.
void accumulate_bptt(const RnnNetwork& net, const SequenceSample& seq, RnnGradient& acc) {
  std::vector<std::vector<std::vector<double>>> states;
  unroll(net, seq, states);
  const auto steps = seq.steps.size();
  const auto& final_h = states.back()[steps - 1];

  double pred = net.head_b;
  for (std::size_t i = 0; i < net.head_w.size(); ++i) pred += net.head_w[i] * final_h[i];
  const double dpred = 2.0 * (pred - seq.target);

  acc.head_b += dpred;
  for (std::size_t i = 0; i < net.head_w.size(); ++i) acc.head_w[i] += dpred * final_h[i];

  // dstate[l][t]: dLoss/dh_l(t), filled backwards in time.
  std::vector<std::vector<std::vector<double>>> dstate(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l)
    dstate[l].assign(steps, std::vector<double>(static_cast<std::size_t>(net.layers[l].hidden_dim), 0.0));
  for (std::size_t i = 0; i < net.head_w.size(); ++i)
    dstate.back()[steps - 1][i] = dpred * net.head_w[i];

  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t l = net.layers.size(); l-- > 0;) {
      const auto& layer = net.layers[l];
      const auto& h = states[l][t];
      const std::vector<double>& input = l == 0 ? seq.steps[t] : states[l - 1][t];

      // Through the logistic nonlinearity.
      std::vector<double> dz(static_cast<std::size_t>(layer.hidden_dim));
      for (int o = 0; o < layer.hidden_dim; ++o) {
        const auto k = static_cast<std::size_t>(o);
        dz[k] = dstate[l][t][k] * h[k] * (1.0 - h[k]);
      }

      auto& gl = acc.layers[l];
      for (int o = 0; o < layer.hidden_dim; ++o) {
        const auto k = static_cast<std::size_t>(o);
        gl.bias[k] += dz[k];
        double* gw = gl.w_in.data() + k * static_cast<std::size_t>(layer.input_dim);
        for (int i = 0; i < layer.input_dim; ++i) gw[i] += dz[k] * input[static_cast<std::size_t>(i)];
        if (t > 0) {
          double* gu = gl.w_rec.data() + k * static_cast<std::size_t>(layer.hidden_dim);
          const auto& prev = states[l][t - 1];
          for (int i = 0; i < layer.hidden_dim; ++i) gu[i] += dz[k] * prev[static_cast<std::size_t>(i)];
        }
      }

      // Into the previous time step of this layer.
      if (t > 0) {
        auto& dprev = dstate[l][t - 1];
        for (int i = 0; i < layer.hidden_dim; ++i) {
          double s = 0.0;
          for (int o = 0; o < layer.hidden_dim; ++o)
            s += layer.w_rec[static_cast<std::size_t>(o) * layer.hidden_dim + i] *
                 dz[static_cast<std::size_t>(o)];
          dprev[static_cast<std::size_t>(i)] += s;
        }
      }
      // Into the layer below at the same step.
      if (l > 0) {
        auto& dbelow = dstate[l - 1][t];
        for (int i = 0; i < layer.input_dim; ++i) {
          double s = 0.0;
          for (int o = 0; o < layer.hidden_dim; ++o)
            s += layer.w_in[static_cast<std::size_t>(o) * layer.input_dim + i] *
                 dz[static_cast<std::size_t>(o)];
          dbelow[static_cast<std::size_t>(i)] += s;
        }
      }
    }
  }
}

void add_into(RnnGradient& dst, const RnnGradient& src) {
  for (std::size_t l = 0; l < dst.layers.size(); ++l) {
    auto& d = dst.layers[l];
    const auto& s = src.layers[l];
    for (std::size_t i = 0; i < d.w_in.size(); ++i) d.w_in[i] += s.w_in[i];
    for (std::size_t i = 0; i < d.w_rec.size(); ++i) d.w_rec[i] += s.w_rec[i];
    for (std::size_t i = 0; i < d.bias.size(); ++i) d.bias[i] += s.bias[i];
  }
  for (std::size_t i = 0; i < dst.head_w.size(); ++i) dst.head_w[i] += src.head_w[i];
  dst.head_b += src.head_b;
}

template <typename F>
void for_each_param(RnnGradient& g, F f) {
  for (auto& l : g.layers) {
    for (auto& v : l.w_in) f(v);
    for (auto& v : l.w_rec) f(v);
    for (auto& v : l.bias) f(v);
  }
  for (auto& v : g.head_w) f(v);
  f(g.head_b);
}

}  // namespace

std::vector<SequenceSample> build_sequences(const FeatureDataset& dataset, int length) {
  if (length < 1) throw std::invalid_argument("sequence length must be positive");
  std::vector<SequenceSample> out;
  const auto n = dataset.x.size();
  std::size_t run_start = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool boundary = i == n || (i > run_start && dataset.entry_id[i] != dataset.entry_id[run_start]);
    if (!boundary) continue;
    const auto run_len = i - run_start;
    if (run_len >= static_cast<std::size_t>(length)) {
      for (std::size_t s = run_start; s + static_cast<std::size_t>(length) <= i; ++s) {
        SequenceSample sample;
        sample.steps.assign(dataset.x.begin() + static_cast<std::ptrdiff_t>(s),
                            dataset.x.begin() + static_cast<std::ptrdiff_t>(s + static_cast<std::size_t>(length)));
        sample.target = dataset.y[s + static_cast<std::size_t>(length) - 1];
        sample.entry_id = dataset.entry_id[run_start];
        sample.final_row = static_cast<std::int64_t>(s + static_cast<std::size_t>(length) - 1);
        out.push_back(std::move(sample));
      }
    }
    run_start = i;
  }
  return out;
}

RnnNetwork init_rnn(int input_dim, const std::vector<int>& hidden_layout, std::uint64_t seed) {
  if (input_dim < 1 || hidden_layout.empty()) throw std::invalid_argument("bad RNN layout");
  Rng rng(seed);
  RnnNetwork net;
  int in = input_dim;
  for (int h : hidden_layout) {
    if (h < 1) throw std::invalid_argument("zero-size layer");
    RnnLayer layer;
    layer.input_dim = in;
    layer.hidden_dim = h;
    const double bound_in = 1.0 / std::sqrt(static_cast<double>(in));
    const double bound_rec = 1.0 / std::sqrt(static_cast<double>(h));
    layer.w_in.resize(static_cast<std::size_t>(h) * in);
    for (auto& v : layer.w_in) v = rng.uniform(-bound_in, bound_in);
    layer.w_rec.resize(static_cast<std::size_t>(h) * h);
    for (auto& v : layer.w_rec) v = rng.uniform(-bound_rec, bound_rec);
    layer.bias.assign(static_cast<std::size_t>(h), 0.0);
    net.layers.push_back(std::move(layer));
    in = h;
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  net.head_w.resize(static_cast<std::size_t>(in));
  for (auto& v : net.head_w) v = rng.uniform(-bound, bound);
  net.head_b = 0.0;
  return net;
}

double predict_rnn(const RnnNetwork& net, const SequenceSample& sequence) {
  if (sequence.steps.empty()) throw std::invalid_argument("empty sequence");
  std::vector<std::vector<std::vector<double>>> states;
  unroll(net, sequence, states);
  const auto& final_h = states.back().back();
  double pred = net.head_b;
  for (std::size_t i = 0; i < net.head_w.size(); ++i) pred += net.head_w[i] * final_h[i];
  return pred;
}

RnnGradient bptt_gradient(const RnnNetwork& net, const std::vector<SequenceSample>& batch,
                          bool parallel) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<RnnGradient> per_sample(batch.size());

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch.size()); ++i) {
    auto& g = per_sample[static_cast<std::size_t>(i)];
    g = zero_like(net);
    accumulate_bptt(net, batch[static_cast<std::size_t>(i)], g);
  }

  RnnGradient total = std::move(per_sample[0]);
  for (std::size_t i = 1; i < per_sample.size(); ++i) add_into(total, per_sample[i]);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for_each_param(total, [inv](double& v) { v *= inv; });
  return total;
}

RnnGradient bptt_gradient_serial(const RnnNetwork& net, const std::vector<SequenceSample>& batch) {
  return bptt_gradient(net, batch, false);
}

double rnn_mse(const RnnNetwork& net, const std::vector<SequenceSample>& data) {
  double s = 0.0;
  for (const auto& seq : data) {
    const double e = predict_rnn(net, seq) - seq.target;
    s += e * e;
  }
  return s / static_cast<double>(data.size());
}

RnnTrainResult train_rnn(const std::vector<SequenceSample>& train,
                         const std::vector<SequenceSample>& validation,
                         const RnnTrainConfig& cfg) {
  if (train.empty() || validation.empty())
    throw std::invalid_argument("empty train/validation set");

  RnnNetwork net = init_rnn(static_cast<int>(train[0].steps[0].size()), cfg.hidden_layout, cfg.seed);

  RnnTrainResult result;
  result.network = net;
  result.best_validation_mse = std::numeric_limits<double>::infinity();

  Rng shuffle_rng(Rng::derive(cfg.seed, 0x5e0));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = shuffle_rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<SequenceSample> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train[order[i]]);

      RnnGradient g = bptt_gradient(net, batch, cfg.parallel);

      double norm_sq = 0.0;
      for_each_param(g, [&](double& v) { norm_sq += v * v; });
      if (cfg.clip_norm > 0 && norm_sq > cfg.clip_norm * cfg.clip_norm) {
        const double s = cfg.clip_norm / std::sqrt(norm_sq);
        for_each_param(g, [s](double& v) { v *= s; });
        ++result.clip_events;
      }

      // SGD step.
      auto step = [&](double& w, double grad) { w -= cfg.learning_rate * grad; };
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t i = 0; i < net.layers[l].w_in.size(); ++i)
          step(net.layers[l].w_in[i], g.layers[l].w_in[i]);
        for (std::size_t i = 0; i < net.layers[l].w_rec.size(); ++i)
          step(net.layers[l].w_rec[i], g.layers[l].w_rec[i]);
        for (std::size_t i = 0; i < net.layers[l].bias.size(); ++i)
          step(net.layers[l].bias[i], g.layers[l].bias[i]);
      }
      for (std::size_t i = 0; i < net.head_w.size(); ++i) step(net.head_w[i], g.head_w[i]);
      step(net.head_b, g.head_b);
    }

    const double train_mse = rnn_mse(net, train);
    const double val_mse = rnn_mse(net, validation);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
      throw TrainingDivergedError("non-finite loss", epoch);
    result.history.push_back({train_mse, val_mse});

    if (val_mse < result.best_validation_mse) {
      result.best_validation_mse = val_mse;
      result.best_epoch = epoch;
      result.network = net;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace tireforce
