#include "tireforce/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace tireforce {

namespace {

std::vector<double> channel_of(const RevolutionTrace& trace, int c) {
  std::vector<double> v(trace.samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& s = trace.samples[i];
    v[i] = c == 0 ? s.ax : (c == 1 ? s.ay : s.az);
  }
  return v;
}

void set_channel(RevolutionTrace& trace, int c, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto& s = trace.samples[i];
    (c == 0 ? s.ax : (c == 1 ? s.ay : s.az)) = v[i];
  }
}

void run_sections_in_place(std::vector<double>& x, const std::vector<BiquadCoeffs>& sections) {
  for (const auto& s : sections) {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double& xi : x) {
      const double y = s.b0 * xi + s.b1 * x1 + s.b2 * x2 - s.a1 * y1 - s.a2 * y2;
      x2 = x1;
      x1 = xi;
      y2 = y1;
      y1 = y;
      xi = y;
    }
  }
}

// Forward-backward filtering over a circularly extended copy, so one wheel
// revolution has no start/end transient.
std::vector<double> filtfilt_circular(const std::vector<double>& x,
                                      const std::vector<BiquadCoeffs>& sections) {
  const std::size_t n = x.size();
  std::vector<double> ext;
  ext.reserve(3 * n);
  for (int rep = 0; rep < 3; ++rep) ext.insert(ext.end(), x.begin(), x.end());

  run_sections_in_place(ext, sections);
  std::reverse(ext.begin(), ext.end());
  run_sections_in_place(ext, sections);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(n),
                             ext.begin() + static_cast<std::ptrdiff_t>(2 * n));
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid - 1), v.end());
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

}  // namespace

std::vector<BiquadCoeffs> butterworth_lowpass(double cutoff_hz, double sample_rate_hz, int order) {
  if (!(cutoff_hz > 0) || cutoff_hz >= sample_rate_hz / 2)
    throw std::invalid_argument("cutoff must lie in (0, Nyquist)");
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("order must be even and >= 2");

  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  std::vector<BiquadCoeffs> sections;
  for (int i = 0; i < order / 2; ++i) {
    // Damping of the i-th Butterworth pole pair.
    const double zeta = std::cos(std::numbers::pi * (2 * i + 1) / (2.0 * order));
    const double den = k * k + 2.0 * zeta * k + 1.0;
    BiquadCoeffs s;
    s.b0 = k * k / den;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (k * k - 1.0) / den;
    s.a2 = (k * k - 2.0 * zeta * k + 1.0) / den;
    sections.push_back(s);
  }
  return sections;
}

double zero_phase_gain(const std::vector<BiquadCoeffs>& sections, double freq_hz,
                       double sample_rate_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const std::complex<double> z = std::polar(1.0, -w);
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z + s.b2 * z * z) / (1.0 + s.a1 * z + s.a2 * z * z);
  }
  const double mag = std::abs(h);
  return mag * mag;  // forward + backward pass
}

RevolutionTrace lowpass_filter(const RevolutionTrace& trace, double cutoff_hz) {
  if (trace.samples.empty()) throw std::invalid_argument("empty trace");
  // Scale the cutoff with the revolution rate so the angular response is
  // speed invariant; cap just below Nyquist for very fast traces.
  const double rev_hz = trace.sample_rate_hz / static_cast<double>(trace.samples.size());
  const double effective = std::min(cutoff_hz * rev_hz / kFilterReferenceRevHz,
                                    0.45 * trace.sample_rate_hz);
  const auto sections = butterworth_lowpass(effective, trace.sample_rate_hz);
  RevolutionTrace out = trace;
  for (int c = 0; c < 3; ++c) {
    set_channel(out, c, filtfilt_circular(channel_of(trace, c), sections));
  }
  return out;
}

std::vector<RevolutionTrace> segment_revolutions(const std::vector<TraceSample>& stream,
                                                 double sample_rate_hz, SegmentReport* report) {
  std::vector<RevolutionTrace> traces;
  SegmentReport rep;

  std::vector<TraceSample> current;
  double mean_step = 0.0;
  std::size_t step_count = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!current.empty()) {
      const double prev = current.back().angle_deg;
      const double cur = stream[i].angle_deg;
      if (cur < prev) {
        if (prev - cur <= 180.0)
          throw CorruptStreamError("encoder angle not monotone modulo 360");
        // Wrap: close the current revolution if it actually spans one.
        const double step = step_count ? mean_step / static_cast<double>(step_count) : 0.0;
        const double span = prev - current.front().angle_deg + step;
        if (span >= 360.0 - 2.0 * step) {
          RevolutionTrace t;
          t.samples = std::move(current);
          t.sample_rate_hz = sample_rate_hz;
          traces.push_back(std::move(t));
        } else {
          rep.discarded_samples += current.size();
        }
        current.clear();
      } else {
        mean_step += cur - prev;
        ++step_count;
      }
    }
    current.push_back(stream[i]);
  }
  if (!current.empty()) {
    const double step = step_count ? mean_step / static_cast<double>(step_count) : 0.0;
    const double span = current.back().angle_deg - current.front().angle_deg + step;
    if (span >= 360.0 - 2.0 * step) {
      RevolutionTrace t;
      t.samples = std::move(current);
      t.sample_rate_hz = sample_rate_hz;
      traces.push_back(std::move(t));
    } else {
      rep.discarded_samples += current.size();
    }
  }
  rep.complete_revolutions = traces.size();
  if (report) *report = rep;
  return traces;
}

PatchMarkers detect_contact_patch(const RevolutionTrace& trace) {
  const std::size_t n = trace.samples.size();
  if (n < 8) throw PatchNotFoundError("trace too short");

  std::vector<double> ax = channel_of(trace, 0);
  const double med = median_of(ax);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::fabs(ax[i] - med);
  const double mad = median_of(dev);
  const double threshold = 3.0 * mad;

  std::size_t i_entry = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (ax[i] > ax[i_entry]) i_entry = i;
  }
  if (!(ax[i_entry] > threshold) || ax[i_entry] <= 0)
    throw PatchNotFoundError("no positive peak above prominence threshold");

  // Opposite-sign extremum following the entry peak, searched circularly over
  // the half revolution after it.
  std::size_t i_exit = i_entry;
  double best = 0.0;
  for (std::size_t off = 1; off <= n / 2; ++off) {
    const std::size_t i = (i_entry + off) % n;
    if (ax[i] < best) {
      best = ax[i];
      i_exit = i;
    }
  }
  if (!(-best > threshold))
    throw PatchNotFoundError("no negative peak above prominence threshold");

  PatchMarkers m;
  m.entry_angle_deg = trace.samples[i_entry].angle_deg;
  m.exit_angle_deg = trace.samples[i_exit].angle_deg;
  if (m.exit_angle_deg <= m.entry_angle_deg) m.exit_angle_deg += 360.0;
  m.center_angle_deg = 0.5 * (m.entry_angle_deg + m.exit_angle_deg);
  if (m.center_angle_deg >= 360.0) m.center_angle_deg -= 360.0;
  return m;
}

RevolutionTrace centripetal_rescale(const RevolutionTrace& trace) {
  const std::vector<double> az = channel_of(trace, 2);
  const double level = median_of(az);
  if (!(level > 0)) throw std::invalid_argument("non-positive centripetal level in az");
  RevolutionTrace out = trace;
  for (auto& s : out.samples) s.az /= level;
  return out;
}

PatchWindow angular_resample(const RevolutionTrace& trace, const PatchMarkers& markers,
                             double half_span_deg, double grid_step_deg) {
  const std::size_t n = trace.samples.size();
  if (n < 2) throw std::invalid_argument("trace too short to resample");
  if (!(half_span_deg > 0) || !(grid_step_deg > 0))
    throw std::invalid_argument("window span and step must be positive");

  PatchWindow w;
  w.condition = trace.condition;
  w.label = trace.label;
  w.entry_id = trace.entry_id;

  // Interpolate circularly: angle queries are reduced mod 360 and bracketed by
  // neighboring raw samples, the last interval wrapping to the first sample.
  auto interpolate = [&](double query_deg, auto field) {
    double q = std::fmod(query_deg, 360.0);
    if (q < 0) q += 360.0;
    // Largest sample angle <= q.
    auto it = std::upper_bound(trace.samples.begin(), trace.samples.end(), q,
                               [](double v, const TraceSample& s) { return v < s.angle_deg; });
    std::size_t i0, i1;
    double a0, a1;
    if (it == trace.samples.begin()) {
      i0 = n - 1;
      i1 = 0;
      a0 = trace.samples[i0].angle_deg - 360.0;
      a1 = trace.samples[i1].angle_deg;
    } else {
      i0 = static_cast<std::size_t>(std::distance(trace.samples.begin(), it)) - 1;
      i1 = (i0 + 1) % n;
      a0 = trace.samples[i0].angle_deg;
      a1 = trace.samples[i1].angle_deg;
      if (i1 == 0) a1 += 360.0;
    }
    const double t = (a1 > a0) ? (q - a0) / (a1 - a0) : 0.0;
    return (1.0 - t) * field(trace.samples[i0]) + t * field(trace.samples[i1]);
  };

  if (markers.exit_angle_deg <= markers.center_angle_deg)
    throw std::invalid_argument("invalid patch markers");
  if (half_span_deg > 180.0)
    throw std::invalid_argument("window exceeds available angular coverage");

  const auto points = static_cast<std::size_t>(std::llround(2.0 * half_span_deg / grid_step_deg)) + 1;
  w.angles_deg.resize(points);
  w.ax.resize(points);
  w.ay.resize(points);
  w.az.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double a = markers.center_angle_deg - half_span_deg + grid_step_deg * static_cast<double>(i);
    w.angles_deg[i] = a;
    w.ax[i] = interpolate(a, [](const TraceSample& s) { return s.ax; });
    w.ay[i] = interpolate(a, [](const TraceSample& s) { return s.ay; });
    w.az[i] = interpolate(a, [](const TraceSample& s) { return s.az; });
  }
  return w;
}

MinMaxStats fit_minmax(const std::vector<PatchWindow>& training_windows) {
  if (training_windows.empty()) throw std::invalid_argument("empty training set");

  auto fit_channel = [&](auto accessor) {
    ChannelRange r{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
    for (const auto& w : training_windows) {
      for (double v : accessor(w)) {
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
      }
    }
    return r;
  };

  MinMaxStats stats;
  stats.ax = fit_channel([](const PatchWindow& w) { return w.ax; });
  stats.ay = fit_channel([](const PatchWindow& w) { return w.ay; });
  stats.az = fit_channel([](const PatchWindow& w) { return w.az; });
  // A single flat channel is legitimate (ay is identically zero on a purely
  // free-rolling dataset) and normalizes to a constant; an entirely flat
  // window set carries no information and is rejected.
  if (stats.ax.degenerate() && stats.ay.degenerate() && stats.az.degenerate())
    throw std::invalid_argument("degenerate signal channel (max == min)");

  auto fit_label = [&](auto accessor) {
    ChannelRange r{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
    for (const auto& w : training_windows) {
      r.min = std::min(r.min, accessor(w.label));
      r.max = std::max(r.max, accessor(w.label));
    }
    return r;
  };
  stats.fx = fit_label([](const ForceLabel& l) { return l.fx_n; });
  stats.fy = fit_label([](const ForceLabel& l) { return l.fy_n; });
  stats.fz = fit_label([](const ForceLabel& l) { return l.fz_n; });
  return stats;
}

PatchWindow apply_minmax(const PatchWindow& window, const MinMaxStats& stats) {
  if (stats.ax.degenerate() && stats.ay.degenerate() && stats.az.degenerate())
    throw std::invalid_argument("degenerate normalization stats");
  auto scaled = [](double x, const ChannelRange& r) {
    return r.degenerate() ? 0.0 : normalize_value(x, r);
  };
  PatchWindow out = window;
  for (std::size_t k = 0; k < window.points(); ++k) {
    out.ax[k] = scaled(window.ax[k], stats.ax);
    out.ay[k] = scaled(window.ay[k], stats.ay);
    out.az[k] = scaled(window.az[k], stats.az);
  }
  return out;
}

std::string to_string(ForceAxis axis) {
  switch (axis) {
    case ForceAxis::Fx: return "fx";
    case ForceAxis::Fy: return "fy";
    case ForceAxis::Fz: return "fz";
  }
  throw std::logic_error("unknown axis");
}

ForceAxis axis_from_string(const std::string& s) {
  if (s == "fx") return ForceAxis::Fx;
  if (s == "fy") return ForceAxis::Fy;
  if (s == "fz") return ForceAxis::Fz;
  throw std::invalid_argument("unknown axis: " + s);
}

double label_for_axis(const ForceLabel& label, ForceAxis axis) {
  switch (axis) {
    case ForceAxis::Fx: return label.fx_n;
    case ForceAxis::Fy: return label.fy_n;
    case ForceAxis::Fz: return label.fz_n;
  }
  throw std::logic_error("unknown axis");
}

const ChannelRange& range_for_axis(const MinMaxStats& stats, ForceAxis axis) {
  switch (axis) {
    case ForceAxis::Fx: return stats.fx;
    case ForceAxis::Fy: return stats.fy;
    case ForceAxis::Fz: return stats.fz;
  }
  throw std::logic_error("unknown axis");
}

std::vector<double> build_features(const PatchWindow& w, ForceAxis axis) {
  std::vector<double> x;
  x.reserve((axis == ForceAxis::Fy ? 3 : 2) * w.points());
  x.insert(x.end(), w.ax.begin(), w.ax.end());
  if (axis == ForceAxis::Fy) x.insert(x.end(), w.ay.begin(), w.ay.end());
  x.insert(x.end(), w.az.begin(), w.az.end());
  return x;
}

FeatureDataset build_feature_dataset(const std::vector<PatchWindow>& normalized_windows,
                                     ForceAxis axis) {
  FeatureDataset ds;
  ds.axis = axis;
  const std::size_t points = normalized_windows.empty() ? kWindowPoints
                                                        : normalized_windows.front().points();
  ds.feature_dim = (axis == ForceAxis::Fy ? 3u : 2u) * points;
  for (const auto& w : normalized_windows) {
    ds.x.push_back(build_features(w, axis));
    ds.y.push_back(label_for_axis(w.label, axis));
    ds.entry_id.push_back(w.entry_id);
    ds.trace_id.push_back(w.trace_id);
  }
  return ds;
}

}  // namespace tireforce
