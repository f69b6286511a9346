#include "tireforce/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tireforce/rng.hpp"

namespace tireforce {

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  const ForestConfig& cfg;
  int mtry;
  Rng rng;
  RegressionTree tree;
  std::vector<int> feature_pool;

  TreeBuilder(const std::vector<std::vector<double>>& x_, const std::vector<double>& y_,
              const ForestConfig& cfg_, int mtry_, std::uint64_t seed)
      : x(x_), y(y_), cfg(cfg_), mtry(mtry_), rng(seed) {
    feature_pool.resize(x[0].size());
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
  }

  int build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth) {
    const auto n = hi - lo;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += y[idx[i]];
    const double mean = sum / static_cast<double>(n);

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    const bool depth_capped = cfg.max_depth > 0 && depth >= cfg.max_depth;
    if (n < 2 * static_cast<std::size_t>(cfg.min_leaf) || depth_capped) {
      tree.nodes[static_cast<std::size_t>(node_id)].leaf_value = mean;
      return node_id;
    }

    // Draw mtry features without replacement (partial Fisher-Yates).
    for (int i = 0; i < mtry; ++i) {
      const auto j = i + static_cast<int>(rng.next_below(feature_pool.size() - static_cast<std::size_t>(i)));
      std::swap(feature_pool[static_cast<std::size_t>(i)], feature_pool[static_cast<std::size_t>(j)]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = -1.0;
    std::vector<std::pair<double, double>> vals;  // (feature value, target)
    vals.reserve(n);

    for (int f = 0; f < mtry; ++f) {
      const int feature = feature_pool[static_cast<std::size_t>(f)];
      vals.clear();
      for (std::size_t i = lo; i < hi; ++i)
        vals.emplace_back(x[idx[i]][static_cast<std::size_t>(feature)], y[idx[i]]);
      std::sort(vals.begin(), vals.end());

      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += vals[i].second;
        const auto n_left = i + 1;
        if (n_left < static_cast<std::size_t>(cfg.min_leaf)) continue;
        if (n - n_left < static_cast<std::size_t>(cfg.min_leaf)) break;
        if (vals[i].first == vals[i + 1].first) continue;
        const double right_sum = sum - left_sum;
        // Variance reduction up to constants: sum of per-side squared means.
        const double score = left_sum * left_sum / static_cast<double>(n_left) +
                             right_sum * right_sum / static_cast<double>(n - n_left);
        if (score > best_score) {
          best_score = score;
          best_feature = feature;
          best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[static_cast<std::size_t>(node_id)].leaf_value = mean;
      return node_id;
    }

    const auto mid_it = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                                       idx.begin() + static_cast<std::ptrdiff_t>(hi),
                                       [&](std::size_t i) {
                                         return x[i][static_cast<std::size_t>(best_feature)] <=
                                                best_threshold;
                                       });
    const auto mid = static_cast<std::size_t>(std::distance(idx.begin(), mid_it));
    if (mid == lo || mid == hi) {  // numerical tie; give up on this node
      tree.nodes[static_cast<std::size_t>(node_id)].leaf_value = mean;
      return node_id;
    }

    tree.nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
    const int left = build(idx, lo, mid, depth + 1);
    const int right = build(idx, mid, hi, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left;
    tree.nodes[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }
};

RegressionTree build_tree(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                          const ForestConfig& cfg, int mtry, std::uint64_t seed) {
  TreeBuilder builder(x, y, cfg, mtry, seed);
  // Bootstrap resample: n draws with replacement.
  std::vector<std::size_t> idx(x.size());
  if (cfg.bootstrap) {
    for (auto& i : idx) i = builder.rng.next_below(x.size());
  } else {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  }
  builder.build(idx, 0, idx.size(), 0);
  return std::move(builder.tree);
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].left >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].leaf_value;
}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != feature_dim) throw std::invalid_argument("feature dimension mismatch");
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

Forest train_forest(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                    const ForestConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("bad training set");
  if (cfg.n_trees < 1) throw std::invalid_argument("need at least one tree");

  const int p = static_cast<int>(x[0].size());
  const int mtry = cfg.mtry > 0 ? cfg.mtry : (p + 2) / 3;

  Forest forest;
  forest.feature_dim = static_cast<std::size_t>(p);
  forest.y_min = *std::min_element(y.begin(), y.end());
  forest.y_max = *std::max_element(y.begin(), y.end());
  forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.n_trees));
  for (std::size_t t = 0; t < seeds.size(); ++t) seeds[t] = Rng::derive(cfg.seed, t);

#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (std::int64_t t = 0; t < cfg.n_trees; ++t) {
    forest.trees[static_cast<std::size_t>(t)] =
        build_tree(x, y, cfg, mtry, seeds[static_cast<std::size_t>(t)]);
  }
  return forest;
}

Forest train_forest_serial(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                           ForestConfig cfg) {
  cfg.parallel = false;
  return train_forest(x, y, cfg);
}

}  // namespace tireforce
