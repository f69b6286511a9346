#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tireforce/preprocess.hpp"

namespace tireforce {

// CART regression tree, preorder node list. left < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double leaf_value = 0.0;
  int left = -1;
  int right = -1;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> x) const;
};

struct ForestConfig {
  int n_trees = 100;
  int mtry = 0;        // 0 -> ceil(p / 3)
  int min_leaf = 5;
  int max_depth = 0;   // 0 -> unbounded
  bool bootstrap = true;
  std::uint64_t seed = 1;
  bool parallel = true;
};

struct Forest {
  std::vector<RegressionTree> trees;
  double y_min = 0.0;  // training-label range; predictions never leave it
  double y_max = 0.0;
  std::size_t feature_dim = 0;

  double predict(std::span<const double> x) const;
};

// Bagged CART with variance-reduction splits over mtry randomly chosen
// features per node. Per-tree seeds are fixed up front, so the parallel and
// serial paths build identical forests.
Forest train_forest(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                    const ForestConfig& cfg);
Forest train_forest_serial(const std::vector<std::vector<double>>& x,
                           const std::vector<double>& y, ForestConfig cfg);

}  // namespace tireforce
