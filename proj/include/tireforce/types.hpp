#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tireforce {

enum class ManeuverKind { FreeRolling, Cornering, Driving };

std::string to_string(ManeuverKind kind);
ManeuverKind maneuver_from_string(const std::string& s);

struct TireParams {
  double unloaded_radius_m = 0.30;
  double effective_rolling_radius_m = 0.29;
  double vertical_stiffness_n_per_m = 750e3;
  double cornering_stiffness_n_per_rad = 78450.0;
  double longitudinal_stiffness_n = 80e3;
  double friction_coefficient = 1.1;
  double inner_liner_radius_m = 0.25;

  void validate() const;  // throws std::invalid_argument on violation
};

struct OperatingCondition {
  double velocity_kph = 60.0;
  double inflation_pressure_kpa = 220.0;
  double vertical_load_n = 4160.0;
  double slip_angle_deg = 0.0;
  double drive_torque_nm = 0.0;
  ManeuverKind maneuver = ManeuverKind::FreeRolling;

  void validate() const;
};

struct ForceLabel {
  double fx_n = 0.0;
  double fy_n = 0.0;
  double fz_n = 0.0;
};

struct TraceSample {
  double angle_deg;  // [0, 360), strictly increasing within a trace
  double ax;
  double ay;
  double az;
};

struct RevolutionTrace {
  std::vector<TraceSample> samples;
  double sample_rate_hz = 10000.0;
  OperatingCondition condition;
  ForceLabel label;
  // Index of the schedule entry this revolution came from; sequences for the
  // recurrent estimator must not straddle entry boundaries.
  std::int64_t entry_id = -1;
};

enum class SweepKind { None, LoadTriangle, SlipTriangle };

struct ScheduleEntry {
  OperatingCondition condition;
  int n_revolutions = 1;
  SweepKind sweep = SweepKind::None;
  double sweep_min = 0.0;
  double sweep_max = 0.0;
};

struct TestSchedule {
  std::vector<ScheduleEntry> entries;
  std::uint64_t rng_seed = 1;
  // Noise model: either a fixed standard deviation in m/s^2 applied to all
  // channels, or per-channel noise at the given SNR (dB, signal RMS over
  // noise RMS). snr_db > 0 takes precedence over noise_std.
  double noise_std = 5.0;
  double snr_db = 0.0;

  std::size_t total_revolutions() const;
};

}  // namespace tireforce
