// Benchmark of the OpenMP kernels against their serial reference
// implementations: dataset generation, the full-batch MLP gradient, and
// forest training. Also verifies that both paths produce identical output.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "tireforce/forest.hpp"
#include "tireforce/mlp.hpp"
#include "tireforce/rng.hpp"
#include "tireforce/simulator.hpp"

using namespace tireforce;

namespace {

template <typename F>
double time_seconds(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name, serial_s,
              parallel_s, serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

bool traces_equal(const std::vector<RevolutionTrace>& a, const std::vector<RevolutionTrace>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].samples.size() != b[i].samples.size()) return false;
    for (std::size_t j = 0; j < a[i].samples.size(); ++j) {
      const auto& s = a[i].samples[j];
      const auto& t = b[i].samples[j];
      if (s.ax != t.ax || s.ay != t.ay || s.az != t.az) return false;
    }
  }
  return true;
}

bool gradients_equal(const MlpGradient& a, const MlpGradient& b) {
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

bool forests_equal(const Forest& a, const Forest& b) {
  if (a.trees.size() != b.trees.size()) return false;
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    const auto& x = a.trees[t].nodes;
    const auto& y = b.trees[t].nodes;
    if (x.size() != y.size()) return false;
    for (std::size_t n = 0; n < x.size(); ++n) {
      if (x[n].feature != y[n].feature || x[n].threshold != y[n].threshold ||
          x[n].leaf_value != y[n].leaf_value)
        return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  TireParams tire;

  // Dataset generation: 60 revolutions across three conditions.
  TestSchedule schedule;
  schedule.rng_seed = 7;
  schedule.snr_db = 20.0;
  for (double v : {30.0, 60.0, 90.0}) {
    ScheduleEntry e;
    e.condition.velocity_kph = v;
    e.n_revolutions = 20;
    schedule.entries.push_back(e);
  }
  std::vector<RevolutionTrace> serial_traces, parallel_traces;
  const double gen_serial = time_seconds([&] { serial_traces = generate_dataset_serial(schedule, tire); });
  const double gen_parallel = time_seconds([&] { parallel_traces = generate_dataset(schedule, tire, true); });
  report("generate_dataset", gen_serial, gen_parallel, traces_equal(serial_traces, parallel_traces));

  // MLP batch gradient: 2000 rows of 142 features, default layout, 50 reps.
  Rng rng(11);
  const int n_rows = 2000, n_feat = 142;
  std::vector<std::vector<double>> x(n_rows, std::vector<double>(n_feat));
  std::vector<double> y(n_rows);
  for (auto& row : x)
    for (auto& v : row) v = rng.uniform(0.0, 1.0);
  for (auto& v : y) v = rng.uniform(0.0, 1.0);
  const auto net = init_network(n_feat, kDefaultHiddenLayout, 3);
  MlpGradient gs, gp;
  const double mlp_serial = time_seconds([&] {
    for (int r = 0; r < 50; ++r) gs = batch_gradient_serial(net, x, y);
  });
  const double mlp_parallel = time_seconds([&] {
    for (int r = 0; r < 50; ++r) gp = batch_gradient(net, x, y, true);
  });
  report("mlp_batch_gradient", mlp_serial, mlp_parallel, gradients_equal(gs, gp));

  // Forest training: 2000 rows, 40 trees.
  ForestConfig fc;
  fc.n_trees = 40;
  fc.seed = 5;
  Forest fs, fp;
  fc.parallel = false;
  const double rf_serial = time_seconds([&] { fs = train_forest_serial(x, y, fc); });
  fc.parallel = true;
  const double rf_parallel = time_seconds([&] { fp = train_forest(x, y, fc); });
  report("train_forest", rf_serial, rf_parallel, forests_equal(fs, fp));

  return 0;
}
