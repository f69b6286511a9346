#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "tireforce/mlp.hpp"
#include "tireforce/rng.hpp"

using namespace tireforce;

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MlpNetwork random_net(int input_dim, const std::vector<int>& hidden, std::uint64_t seed) {
  return init_network(input_dim, hidden, seed);
}

// Central finite difference of the batch MSE with respect to one parameter.
double fd_gradient(MlpNetwork net, std::size_t layer, std::size_t index, bool bias,
                   const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const double h = 1e-6;
  auto& p = bias ? net.biases[layer][index] : net.weights[layer][index];
  const double saved = p;
  p = saved + h;
  const double up = mse(net, x, y);
  p = saved - h;
  const double down = mse(net, x, y);
  p = saved;
  return (up - down) / (2.0 * h);
}

}  // namespace

TEST_CASE("hand-computed 2-2-1 forward pass") {
  // x = (1, 2); first layer weights [[0.1, 0.2], [0.3, -0.1]], biases (0.05, -0.2);
  // output weights (0.5, -0.4), bias 0.1. Hidden logistic, output linear.
  MlpNetwork net;
  net.layer_sizes = {2, 2, 1};
  net.weights = {{0.1, 0.2, 0.3, -0.1}, {0.5, -0.4}};
  net.biases = {{0.05, -0.2}, {0.1}};

  const double h1 = logistic(0.1 * 1 + 0.2 * 2 + 0.05);
  const double h2 = logistic(0.3 * 1 - 0.1 * 2 - 0.2);
  const double expected = 0.5 * h1 - 0.4 * h2 + 0.1;
  const std::vector<double> x = {1.0, 2.0};
  CHECK(forward(net, x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("initialization: weights within +-1/sqrt(fan_in), biases zero") {
  const auto net = init_network(10, {4, 1}, 3);
  REQUIRE(net.layer_sizes == std::vector<int>{10, 4, 1, 1});
  const double bound0 = 1.0 / std::sqrt(10.0);
  for (double w : net.weights[0]) CHECK(std::fabs(w) <= bound0);
  for (const auto& layer : net.biases)
    for (double b : layer) CHECK(b == 0.0);
  // Deterministic per seed.
  const auto again = init_network(10, {4, 1}, 3);
  CHECK(net.weights[0] == again.weights[0]);
  const auto other = init_network(10, {4, 1}, 4);
  CHECK(net.weights[0] != other.weights[0]);
}

TEST_CASE("backprop gradient matches central finite differences") {
  Rng rng(99);
  int checked = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const int input_dim = 2 + static_cast<int>(rng.next_below(4));
    const auto net = random_net(input_dim, {3, 2}, rng.next_u64());
    const int n = 3 + static_cast<int>(rng.next_below(4));
    std::vector<std::vector<double>> x(n, std::vector<double>(input_dim));
    std::vector<double> y(n);
    for (auto& row : x)
      for (auto& v : row) v = rng.uniform(-1.0, 1.0);
    for (auto& v : y) v = rng.uniform(-1.0, 1.0);

    const auto grad = batch_gradient(net, x, y, false);
    // Spot-check a handful of parameters per instance.
    for (int probe = 0; probe < 3; ++probe) {
      const auto layer = rng.next_below(net.n_layers());
      const bool bias = rng.next_below(2) == 0;
      const auto& vec = bias ? grad.biases[layer] : grad.weights[layer];
      const auto index = rng.next_below(vec.size());
      const double analytic = vec[index];
      const double numeric = fd_gradient(net, layer, index, bias, x, y);
      const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
      CHECK(std::fabs(analytic - numeric) / scale < 1e-4);
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("rprop update depends only on gradient signs") {
  const auto net0 = random_net(4, {3, 1}, 7);
  std::vector<std::vector<double>> x(6, std::vector<double>(4, 0.0));
  std::vector<double> y(6);
  Rng rng(8);
  for (auto& row : x)
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
  for (auto& v : y) v = rng.uniform(-1.0, 1.0);

  auto run = [&](double grad_scale) {
    MlpNetwork net = net0;
    RpropState state = init_rprop(net);
    for (int step = 0; step < 5; ++step) {
      auto grad = batch_gradient(net, x, y, false);
      for (auto& layer : grad.weights)
        for (auto& g : layer) g *= grad_scale;
      for (auto& layer : grad.biases)
        for (auto& g : layer) g *= grad_scale;
      rprop_step(net, grad, state);
    }
    return net;
  };

  const auto a = run(1.0);
  const auto b = run(1000.0);  // rescaled gradients, same signs
  for (std::size_t l = 0; l < a.n_layers(); ++l) {
    CHECK(a.weights[l] == b.weights[l]);
    CHECK(a.biases[l] == b.biases[l]);
  }
}

TEST_CASE("rprop hand example: step sizes 0.1 then 0.12") {
  MlpNetwork net;
  net.layer_sizes = {1, 1};
  net.weights = {{1.0}};
  net.biases = {{0.0}};
  RpropState state = init_rprop(net);

  MlpGradient grad = zero_gradient(net);
  grad.weights[0][0] = 0.7;  // positive gradient, any magnitude
  grad.biases[0][0] = 0.0;

  rprop_step(net, grad, state);
  CHECK(net.weights[0][0] == doctest::Approx(1.0 - 0.1).epsilon(1e-15));

  grad.weights[0][0] = 0.3;  // same sign -> delta grows to 0.12
  rprop_step(net, grad, state);
  CHECK(net.weights[0][0] == doctest::Approx(1.0 - 0.1 - 0.12).epsilon(1e-15));
}

TEST_CASE("rprop sign flip backtracks the previous step") {
  MlpNetwork net;
  net.layer_sizes = {1, 1};
  net.weights = {{1.0}};
  net.biases = {{0.0}};
  RpropState state = init_rprop(net);

  MlpGradient grad = zero_gradient(net);
  grad.weights[0][0] = 1.0;
  rprop_step(net, grad, state);  // w = 0.9
  grad.weights[0][0] = -1.0;     // flip: revert to 1.0, shrink delta to 0.05
  rprop_step(net, grad, state);
  CHECK(net.weights[0][0] == doctest::Approx(1.0).epsilon(1e-15));
  grad.weights[0][0] = 1.0;  // product with swallowed zero gradient: step 0.05
  rprop_step(net, grad, state);
  CHECK(net.weights[0][0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("rprop step sizes stay within the configured bounds") {
  auto net = random_net(3, {2, 1}, 11);
  RpropConfig cfg;
  RpropState state = init_rprop(net, cfg);
  std::vector<std::vector<double>> x(8, std::vector<double>(3));
  std::vector<double> y(8);
  Rng rng(12);
  for (auto& row : x)
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
  for (auto& v : y) v = rng.uniform(-1.0, 1.0);

  for (int step = 0; step < 200; ++step) {
    rprop_step(net, batch_gradient(net, x, y, false), state);
    for (const auto& layer : state.step_w)
      for (double d : layer) {
        CHECK(d >= cfg.delta_min);
        CHECK(d <= cfg.delta_max);
      }
  }
}

TEST_CASE("training fits a linear toy problem") {
  // y = 0.3 * x1, learnable to high accuracy with the default layout.
  std::vector<std::vector<double>> x, vx;
  std::vector<double> y, vy;
  Rng rng(21);
  for (int i = 0; i < 120; ++i) {
    const double x1 = rng.uniform(-1.0, 1.0), x2 = rng.uniform(-1.0, 1.0);
    if (i < 90) {
      x.push_back({x1, x2});
      y.push_back(0.3 * x1);
    } else {
      vx.push_back({x1, x2});
      vy.push_back(0.3 * x1);
    }
  }
  MlpTrainConfig cfg;
  cfg.hidden_layout = {6, 1};
  cfg.max_epochs = 2000;
  cfg.seed = 5;
  const auto result = train_mlp(x, y, vx, vy, cfg);
  CHECK(result.best_validation_mse < 1e-4);
  CHECK(result.best_epoch >= 1);
  CHECK(!result.history.empty());
}

TEST_CASE("training throws TrainingDivergedError on a poisoned dataset") {
  std::vector<std::vector<double>> x = {{1.0}, {2.0}};
  std::vector<double> y = {std::numeric_limits<double>::quiet_NaN(), 1.0};
  MlpTrainConfig cfg;
  cfg.hidden_layout = {2, 1};
  cfg.max_epochs = 10;
  CHECK_THROWS_AS(train_mlp(x, y, x, y, cfg), TrainingDivergedError);
}
