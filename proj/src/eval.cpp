#include "tireforce/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tireforce/rng.hpp"

namespace tireforce {

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.next_below(i)]);
  return idx;
}

// Splits fit rows into train/validation with the trainer's validation share.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> carve_validation(
    const std::vector<std::size_t>& fit_idx, std::uint64_t seed) {
  auto order = fit_idx;
  Rng rng(Rng::derive(seed, 0xa11d));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(kValidationShare * static_cast<double>(order.size()))));
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  return {std::move(train), std::move(val)};
}

ChannelRange fit_target_range(const FeatureDataset& ds, const std::vector<std::size_t>& rows) {
  ChannelRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto i : rows) {
    r.min = std::min(r.min, ds.y[i]);
    r.max = std::max(r.max, ds.y[i]);
  }
  if (r.degenerate()) throw std::invalid_argument("degenerate target range");
  return r;
}

}  // namespace

double nrms(const std::vector<double>& measured, const std::vector<double>& estimated,
            bool literal_formula) {
  if (measured.empty() || measured.size() != estimated.size())
    throw std::invalid_argument("series must be nonempty and of equal length");
  double peak = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    peak = std::max(peak, std::fabs(measured[i]));
    const double e = measured[i] - estimated[i];
    sq += e * e;
  }
  if (peak == 0.0) throw std::domain_error("all-zero measured series: normalizer undefined");
  if (literal_formula) return sq / peak;
  return std::sqrt(sq / static_cast<double>(measured.size())) / peak * 100.0;
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0) || !(validation_fraction > 0) || !(test_fraction > 0))
    throw std::invalid_argument("split fractions must be positive");
  if (std::fabs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");
}

SplitIndices split_dataset(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  if (n < 10) throw std::invalid_argument("dataset too small to split");
  const auto idx = shuffled_indices(n, spec.rng_seed);
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(n)));
  SplitIndices out;
  out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                        idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
  return out;
}

FeatureDataset subset(const FeatureDataset& ds, const std::vector<std::size_t>& indices) {
  FeatureDataset out;
  out.axis = ds.axis;
  out.feature_dim = ds.feature_dim;
  for (auto i : indices) {
    out.x.push_back(ds.x[i]);
    out.y.push_back(ds.y[i]);
    out.entry_id.push_back(ds.entry_id[i]);
    out.trace_id.push_back(ds.trace_id[i]);
  }
  return out;
}

Trainer make_mlp_trainer(MlpTrainConfig cfg) {
  return [cfg](const FeatureDataset& full, const std::vector<std::size_t>& fit_idx,
               const std::vector<std::size_t>& test_idx, std::uint64_t seed) {
    auto [train_rows, val_rows] = carve_validation(fit_idx, seed);
    const ChannelRange range = fit_target_range(full, train_rows);

    auto gather = [&](const std::vector<std::size_t>& rows) {
      std::vector<std::vector<double>> x;
      std::vector<double> y;
      for (auto i : rows) {
        x.push_back(full.x[i]);
        y.push_back(normalize_value(full.y[i], range));
      }
      return std::pair{std::move(x), std::move(y)};
    };
    auto [tx, ty] = gather(train_rows);
    auto [vx, vy] = gather(val_rows);

    MlpTrainConfig c = cfg;
    c.seed = seed;
    const auto result = train_mlp(tx, ty, vx, vy, c);

    PredictionSeries series;
    for (auto i : test_idx) {
      series.measured.push_back(full.y[i]);
      series.estimated.push_back(denormalize_value(forward(result.network, full.x[i]), range));
    }
    return series;
  };
}

Trainer make_forest_trainer(ForestConfig cfg) {
  return [cfg](const FeatureDataset& full, const std::vector<std::size_t>& fit_idx,
               const std::vector<std::size_t>& test_idx, std::uint64_t seed) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (auto i : fit_idx) {
      x.push_back(full.x[i]);
      y.push_back(full.y[i]);
    }
    ForestConfig c = cfg;
    c.seed = seed;
    const Forest forest = train_forest(x, y, c);

    PredictionSeries series;
    for (auto i : test_idx) {
      series.measured.push_back(full.y[i]);
      series.estimated.push_back(forest.predict(full.x[i]));
    }
    return series;
  };
}

Trainer make_rnn_trainer(RnnTrainConfig cfg) {
  return [cfg](const FeatureDataset& full, const std::vector<std::size_t>& fit_idx,
               const std::vector<std::size_t>& test_idx, std::uint64_t seed) {
    // Sequences form over consecutive revolutions of the full dataset; each
    // sequence takes the role of its final (target) row.
    auto sequences = build_sequences(full);
    if (sequences.empty()) throw std::invalid_argument("no entry has enough revolutions for sequences");

    enum class Role : unsigned char { None, Fit, Test };
    std::vector<Role> role(full.x.size(), Role::None);
    for (auto i : fit_idx) role[i] = Role::Fit;
    for (auto i : test_idx) role[i] = Role::Test;

    std::vector<std::size_t> fit_seq, test_seq;
    for (std::size_t s = 0; s < sequences.size(); ++s) {
      const auto row = static_cast<std::size_t>(sequences[s].final_row);
      if (role[row] == Role::Fit) fit_seq.push_back(s);
      else if (role[row] == Role::Test) test_seq.push_back(s);
    }
    if (fit_seq.empty() || test_seq.empty())
      throw std::invalid_argument("sequence split left an empty side");

    auto [train_s, val_s] = carve_validation(fit_seq, seed);

    ChannelRange range{std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
    for (auto s : train_s) {
      range.min = std::min(range.min, sequences[s].target);
      range.max = std::max(range.max, sequences[s].target);
    }
    if (range.degenerate()) throw std::invalid_argument("degenerate target range");

    auto gather = [&](const std::vector<std::size_t>& ids) {
      std::vector<SequenceSample> out;
      for (auto s : ids) {
        out.push_back(sequences[s]);
        out.back().target = normalize_value(out.back().target, range);
      }
      return out;
    };
    const auto train_set = gather(train_s);
    const auto val_set = gather(val_s);

    RnnTrainConfig c = cfg;
    c.seed = seed;
    const auto result = train_rnn(train_set, val_set, c);

    PredictionSeries series;
    for (auto s : test_seq) {
      series.measured.push_back(sequences[s].target);
      series.estimated.push_back(
          denormalize_value(predict_rnn(result.network, sequences[s]), range));
    }
    return series;
  };
}

CvSummary summarize(std::vector<double> scores) {
  if (scores.empty()) throw std::invalid_argument("no scores");
  std::sort(scores.begin(), scores.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(scores.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, scores.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return (1.0 - t) * scores[lo] + t * scores[hi];
  };
  CvSummary s;
  s.min = scores.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = scores.back();
  s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  return s;
}

CvResult kfold_cv(const FeatureDataset& dataset, int k, const Trainer& trainer,
                  std::uint64_t seed) {
  const auto n = dataset.x.size();
  if (k < 2 || static_cast<std::size_t>(k) > n) throw std::invalid_argument("bad fold count");

  const auto order = shuffled_indices(n, seed);
  CvResult result;
  result.fold_test_idx.assign(static_cast<std::size_t>(k), {});
  for (std::size_t i = 0; i < n; ++i)
    result.fold_test_idx[i % static_cast<std::size_t>(k)].push_back(order[i]);

  for (int f = 0; f < k; ++f) {
    const auto& test_idx = result.fold_test_idx[static_cast<std::size_t>(f)];
    std::vector<std::size_t> fit_idx;
    fit_idx.reserve(n - test_idx.size());
    for (int g = 0; g < k; ++g) {
      if (g == f) continue;
      const auto& fold = result.fold_test_idx[static_cast<std::size_t>(g)];
      fit_idx.insert(fit_idx.end(), fold.begin(), fold.end());
    }
    const auto series = trainer(dataset, fit_idx, test_idx, seed + static_cast<std::uint64_t>(f));
    result.fold_nrms_pct.push_back(nrms(series.measured, series.estimated));
  }
  result.summary = summarize(result.fold_nrms_pct);
  return result;
}

EvalReport compare_methods(const FeatureDataset& dataset, const SplitSpec& spec,
                           const std::vector<std::pair<std::string, Trainer>>& methods,
                           std::uint64_t seed) {
  const auto split = split_dataset(dataset.x.size(), spec);
  // Trainers carve their own validation share out of the fit rows.
  std::vector<std::size_t> fit_idx = split.train;
  fit_idx.insert(fit_idx.end(), split.validation.begin(), split.validation.end());

  EvalReport report;
  report.axis = dataset.axis;
  report.split = spec;
  for (const auto& [name, trainer] : methods) {
    MethodResult r;
    r.method = name;
    r.data_size = dataset.x.size();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.series = trainer(dataset, fit_idx, split.test, seed);
      r.nrms_pct = nrms(r.series.measured, r.series.estimated);
    } catch (const TrainingDivergedError& e) {
      r.diverged = true;
      r.error = e.what();
    }
    r.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.methods.push_back(std::move(r));
  }
  return report;
}

}  // namespace tireforce
