#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tireforce/types.hpp"

namespace tireforce {

struct PatchNotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptStreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Low-pass filter

// One second-order section (direct form I), plus the 4th-order Butterworth
// design used throughout: two cascaded sections from the bilinear transform
// of the analog prototype.
struct BiquadCoeffs {
  double b0, b1, b2, a1, a2;
};

// Cutoff must be below Nyquist; throws std::invalid_argument otherwise.
std::vector<BiquadCoeffs> butterworth_lowpass(double cutoff_hz, double sample_rate_hz,
                                              int order = 4);

// Amplitude gain of the zero-phase (forward-backward) cascade at `freq_hz`:
// |H|^2 of the single pass, 0.5 at the cutoff for the 4th-order design.
// Serves as the response oracle in tests.
double zero_phase_gain(const std::vector<BiquadCoeffs>& sections, double freq_hz,
                       double sample_rate_hz);

// Nominal revolution rate (60 km/h on the reference 0.29 m rolling radius) at
// which the low-pass cutoff is specified.
inline constexpr double kFilterReferenceRevHz = (60.0 / 3.6) / (2.0 * std::numbers::pi * 0.29);

// Zero-phase low-pass of all three channels. The revolution is treated as
// circular, so there are no edge transients at the 0/360 boundary. `cutoff_hz`
// is specified at the nominal revolution rate; for a trace spinning at a
// different rate the effective cutoff scales proportionally, so the filter's
// response over the wheel angle - and therefore every feature extracted
// downstream - is independent of vehicle speed.
RevolutionTrace lowpass_filter(const RevolutionTrace& trace, double cutoff_hz = 400.0);

// ---------------------------------------------------------------------------
// Revolution segmentation

struct SegmentReport {
  std::size_t complete_revolutions = 0;
  std::size_t discarded_samples = 0;
};

// Splits a continuous encoder-stamped stream at the 360 -> 0 wrap points.
// A trailing partial revolution is discarded and counted in the report.
// An angle decrease that is not a wrap throws CorruptStreamError.
std::vector<RevolutionTrace> segment_revolutions(const std::vector<TraceSample>& stream,
                                                 double sample_rate_hz, SegmentReport* report);

// ---------------------------------------------------------------------------
// Contact patch

struct PatchMarkers {
  double entry_angle_deg;   // point B
  double center_angle_deg;  // point C, circular midpoint of B and D
  double exit_angle_deg;    // point D; unwrapped, may exceed 360
};

// Entry = dominant positive ax extremum, exit = the dominant negative one
// following it. Both peaks must exceed 3x the median absolute deviation of
// the channel; otherwise PatchNotFoundError.
PatchMarkers detect_contact_patch(const RevolutionTrace& trace);

// Divides az by its own median over the revolution, which for a rolling wheel
// equals the centripetal level outside the patch. Makes the az profile
// independent of rotation speed before resampling.
RevolutionTrace centripetal_rescale(const RevolutionTrace& trace);

// ---------------------------------------------------------------------------
// Angular resampling

inline constexpr int kWindowPoints = 71;       // 35 deg total span at 0.5 deg
inline constexpr double kWindowHalfDeg = 17.5;
inline constexpr double kGridStepDeg = 0.5;

struct PatchWindow {
  std::vector<double> angles_deg;  // center - half_span .. center + half_span
  std::vector<double> ax;
  std::vector<double> ay;
  std::vector<double> az;
  OperatingCondition condition;
  ForceLabel label;
  std::int64_t entry_id = -1;
  std::int64_t trace_id = -1;

  std::size_t points() const { return angles_deg.size(); }
};

// Linear interpolation of all channels onto the fixed angular grid around the
// patch center. Wraps across 0/360 when the window does. The default span is
// 35 deg total (71 points); the alternative reading of the window (35 deg to
// each side of center) is selected by a larger half_span.
PatchWindow angular_resample(const RevolutionTrace& trace, const PatchMarkers& markers,
                             double half_span_deg = kWindowHalfDeg,
                             double grid_step_deg = kGridStepDeg);

// ---------------------------------------------------------------------------
// Normalization and feature assembly

struct ChannelRange {
  double min = 0.0;
  double max = 0.0;
  bool degenerate() const { return !(max > min); }
};

struct MinMaxStats {
  ChannelRange ax, ay, az;      // signal channels
  ChannelRange fx, fy, fz;      // label channels, used for target scaling
};

// Per-channel min/max over the given (training) windows. Throws
// std::invalid_argument if empty or if every signal channel is degenerate.
// A single flat channel (ay on free-rolling-only data) is tolerated.
MinMaxStats fit_minmax(const std::vector<PatchWindow>& training_windows);

// Affine map of each signal channel via (x - min) / (max - min). Values
// outside the training range land outside [0, 1] and are not clipped; a
// degenerate channel maps to the constant 0.
PatchWindow apply_minmax(const PatchWindow& window, const MinMaxStats& stats);

inline double normalize_value(double x, const ChannelRange& r) {
  return (x - r.min) / (r.max - r.min);
}
inline double denormalize_value(double x, const ChannelRange& r) {
  return r.min + x * (r.max - r.min);
}

enum class ForceAxis { Fx, Fy, Fz };

std::string to_string(ForceAxis axis);
ForceAxis axis_from_string(const std::string& s);

// Raw label component for the axis.
double label_for_axis(const ForceLabel& label, ForceAxis axis);
const ChannelRange& range_for_axis(const MinMaxStats& stats, ForceAxis axis);

// Fx/Fz: [ax | az], 142 features. Fy: [ax | ay | az], 213 features.
std::vector<double> build_features(const PatchWindow& normalized_window, ForceAxis axis);

// Row-oriented learning dataset for one target axis.
struct FeatureDataset {
  ForceAxis axis = ForceAxis::Fz;
  std::size_t feature_dim = 0;
  std::vector<std::vector<double>> x;
  std::vector<double> y;                  // raw (denormalized) targets, N
  std::vector<std::int64_t> entry_id;     // schedule entry per row
  std::vector<std::int64_t> trace_id;
};

FeatureDataset build_feature_dataset(const std::vector<PatchWindow>& normalized_windows,
                                     ForceAxis axis);

}  // namespace tireforce
