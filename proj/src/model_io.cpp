#include "tireforce/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tireforce {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << std::setprecision(17);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path);
  return f;
}

void expect(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw DataError("malformed model file: expected " + token);
}

template <typename T>
T read(std::istream& in) {
  T v;
  if (!(in >> v)) throw DataError("malformed model file: truncated value");
  return v;
}

void write_vec(std::ostream& out, const std::vector<double>& v) {
  for (double x : v) out << x << ' ';
  out << '\n';
}

std::vector<double> read_vec(std::istream& in, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = read<double>(in);
  return v;
}

}  // namespace

void save_mlp(const std::string& path, const MlpModel& model) {
  auto f = open_out(path);
  f << "tireforce-mlp 1\n";
  f << "axis " << to_string(model.axis) << '\n';
  f << "activation logistic identity\n";
  f << "target_range " << model.target_range.min << ' ' << model.target_range.max << '\n';
  f << "layers " << model.network.layer_sizes.size();
  for (int s : model.network.layer_sizes) f << ' ' << s;
  f << '\n';
  for (std::size_t l = 0; l < model.network.n_layers(); ++l) {
    write_vec(f, model.network.weights[l]);
    write_vec(f, model.network.biases[l]);
  }
}

MlpModel load_mlp(const std::string& path) {
  auto f = open_in(path);
  expect(f, "tireforce-mlp");
  if (read<int>(f) != 1) throw DataError("unsupported mlp model version");
  expect(f, "axis");
  MlpModel model;
  model.axis = axis_from_string(read<std::string>(f));
  expect(f, "activation");
  read<std::string>(f);
  read<std::string>(f);
  expect(f, "target_range");
  model.target_range.min = read<double>(f);
  model.target_range.max = read<double>(f);
  expect(f, "layers");
  const auto n = read<std::size_t>(f);
  model.network.layer_sizes.resize(n);
  for (auto& s : model.network.layer_sizes) s = read<int>(f);
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const auto in = static_cast<std::size_t>(model.network.layer_sizes[l]);
    const auto out = static_cast<std::size_t>(model.network.layer_sizes[l + 1]);
    model.network.weights.push_back(read_vec(f, in * out));
    model.network.biases.push_back(read_vec(f, out));
  }
  return model;
}

void save_forest(const std::string& path, const ForestModel& model) {
  auto f = open_out(path);
  f << "tireforce-forest 1\n";
  f << "axis " << to_string(model.axis) << '\n';
  f << "feature_dim " << model.forest.feature_dim << '\n';
  f << "label_range " << model.forest.y_min << ' ' << model.forest.y_max << '\n';
  f << "trees " << model.forest.trees.size() << '\n';
  for (const auto& tree : model.forest.trees) {
    f << tree.nodes.size() << '\n';
    for (const auto& n : tree.nodes) {
      if (n.left < 0)
        f << "leaf " << n.leaf_value << '\n';
      else
        f << "split " << n.feature << ' ' << n.threshold << ' ' << n.left << ' ' << n.right << '\n';
    }
  }
}

ForestModel load_forest(const std::string& path) {
  auto f = open_in(path);
  expect(f, "tireforce-forest");
  if (read<int>(f) != 1) throw DataError("unsupported forest model version");
  expect(f, "axis");
  ForestModel model;
  model.axis = axis_from_string(read<std::string>(f));
  expect(f, "feature_dim");
  model.forest.feature_dim = read<std::size_t>(f);
  expect(f, "label_range");
  model.forest.y_min = read<double>(f);
  model.forest.y_max = read<double>(f);
  expect(f, "trees");
  const auto n_trees = read<std::size_t>(f);
  model.forest.trees.resize(n_trees);
  for (auto& tree : model.forest.trees) {
    const auto n_nodes = read<std::size_t>(f);
    tree.nodes.resize(n_nodes);
    for (auto& node : tree.nodes) {
      const auto kind = read<std::string>(f);
      if (kind == "leaf") {
        node.leaf_value = read<double>(f);
      } else if (kind == "split") {
        node.feature = read<int>(f);
        node.threshold = read<double>(f);
        node.left = read<int>(f);
        node.right = read<int>(f);
      } else {
        throw DataError("malformed forest node kind: " + kind);
      }
    }
  }
  return model;
}

void save_rnn(const std::string& path, const RnnModel& model) {
  auto f = open_out(path);
  f << "tireforce-rnn 1\n";
  f << "axis " << to_string(model.axis) << '\n';
  f << "cell elman logistic\n";
  f << "sequence_length " << model.sequence_length << '\n';
  f << "target_range " << model.target_range.min << ' ' << model.target_range.max << '\n';
  f << "layers " << model.network.layers.size() << '\n';
  for (const auto& l : model.network.layers) {
    f << l.input_dim << ' ' << l.hidden_dim << '\n';
    write_vec(f, l.w_in);
    write_vec(f, l.w_rec);
    write_vec(f, l.bias);
  }
  write_vec(f, model.network.head_w);
  f << model.network.head_b << '\n';
}

RnnModel load_rnn(const std::string& path) {
  auto f = open_in(path);
  expect(f, "tireforce-rnn");
  if (read<int>(f) != 1) throw DataError("unsupported rnn model version");
  expect(f, "axis");
  RnnModel model;
  model.axis = axis_from_string(read<std::string>(f));
  expect(f, "cell");
  read<std::string>(f);
  read<std::string>(f);
  expect(f, "sequence_length");
  model.sequence_length = read<int>(f);
  expect(f, "target_range");
  model.target_range.min = read<double>(f);
  model.target_range.max = read<double>(f);
  expect(f, "layers");
  const auto n = read<std::size_t>(f);
  model.network.layers.resize(n);
  for (auto& l : model.network.layers) {
    l.input_dim = read<int>(f);
    l.hidden_dim = read<int>(f);
    const auto h = static_cast<std::size_t>(l.hidden_dim);
    l.w_in = read_vec(f, h * static_cast<std::size_t>(l.input_dim));
    l.w_rec = read_vec(f, h * h);
    l.bias = read_vec(f, h);
  }
  const auto h_last = static_cast<std::size_t>(model.network.layers.back().hidden_dim);
  model.network.head_w = read_vec(f, h_last);
  model.network.head_b = read<double>(f);
  return model;
}

void save_stats(const std::string& path, const MinMaxStats& stats) {
  auto f = open_out(path);
  f << "ax " << stats.ax.min << ' ' << stats.ax.max << '\n';
  f << "ay " << stats.ay.min << ' ' << stats.ay.max << '\n';
  f << "az " << stats.az.min << ' ' << stats.az.max << '\n';
  f << "fx " << stats.fx.min << ' ' << stats.fx.max << '\n';
  f << "fy " << stats.fy.min << ' ' << stats.fy.max << '\n';
  f << "fz " << stats.fz.min << ' ' << stats.fz.max << '\n';
}

MinMaxStats load_stats(const std::string& path) {
  auto f = open_in(path);
  MinMaxStats stats;
  std::string name;
  while (f >> name) {
    ChannelRange r;
    r.min = read<double>(f);
    r.max = read<double>(f);
    if (name == "ax") stats.ax = r;
    else if (name == "ay") stats.ay = r;
    else if (name == "az") stats.az = r;
    else if (name == "fx") stats.fx = r;
    else if (name == "fy") stats.fy = r;
    else if (name == "fz") stats.fz = r;
    else throw DataError("unknown stats channel: " + name);
  }
  return stats;
}

}  // namespace tireforce
