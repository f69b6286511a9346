#include "tireforce/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tireforce/rng.hpp"

namespace tireforce {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double smoothstep01(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}

// 1 inside the patch, 0 outside, smooth edges of width w.
double patch_indicator(double u_deg, double half_angle_deg, double w_deg) {
  const double entry = smoothstep01((u_deg + half_angle_deg) / w_deg + 0.5);
  const double exit = smoothstep01((half_angle_deg - u_deg) / w_deg + 0.5);
  return entry * exit;
}

}  // namespace

std::string to_string(ManeuverKind kind) {
  switch (kind) {
    case ManeuverKind::FreeRolling: return "free_rolling";
    case ManeuverKind::Cornering: return "cornering";
    case ManeuverKind::Driving: return "driving";
  }
  throw std::logic_error("unknown maneuver");
}

ManeuverKind maneuver_from_string(const std::string& s) {
  if (s == "free_rolling") return ManeuverKind::FreeRolling;
  if (s == "cornering") return ManeuverKind::Cornering;
  if (s == "driving") return ManeuverKind::Driving;
  throw std::invalid_argument("unknown maneuver: " + s);
}

void TireParams::validate() const {
  if (unloaded_radius_m <= 0 || effective_rolling_radius_m <= 0 || inner_liner_radius_m <= 0)
    throw std::invalid_argument("tire radii must be positive");
  if (effective_rolling_radius_m > unloaded_radius_m)
    throw std::invalid_argument("effective rolling radius must not exceed unloaded radius");
  if (vertical_stiffness_n_per_m <= 0 || cornering_stiffness_n_per_rad <= 0 ||
      longitudinal_stiffness_n <= 0)
    throw std::invalid_argument("tire stiffnesses must be positive");
  if (friction_coefficient <= 0)
    throw std::invalid_argument("friction coefficient must be positive");
}

void OperatingCondition::validate() const {
  if (velocity_kph <= 0) throw std::invalid_argument("velocity must be positive");
  if (vertical_load_n <= 0) throw std::invalid_argument("vertical load must be positive");
  switch (maneuver) {
    case ManeuverKind::FreeRolling:
      if (slip_angle_deg != 0.0 || drive_torque_nm != 0.0)
        throw std::invalid_argument("free rolling requires zero slip and torque");
      break;
    case ManeuverKind::Cornering:
      if (slip_angle_deg == 0.0 || drive_torque_nm != 0.0)
        throw std::invalid_argument("cornering requires nonzero slip and zero torque");
      break;
    case ManeuverKind::Driving:
      if (drive_torque_nm == 0.0 || slip_angle_deg != 0.0)
        throw std::invalid_argument("driving requires nonzero torque and zero slip");
      break;
  }
}

std::size_t TestSchedule::total_revolutions() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += static_cast<std::size_t>(e.n_revolutions);
  return n;
}

ForceLabel ground_truth_forces(const OperatingCondition& cond, const TireParams& tire) {
  cond.validate();
  tire.validate();

  ForceLabel label;
  label.fz_n = cond.vertical_load_n;
  const double mu_fz = tire.friction_coefficient * label.fz_n;

  if (cond.slip_angle_deg != 0.0) {
    const double t = tire.cornering_stiffness_n_per_rad * std::tan(cond.slip_angle_deg * kDegToRad);
    const double abs_t = std::fabs(t);
    if (abs_t >= 3.0 * mu_fz) {
      label.fy_n = -std::copysign(mu_fz, t);
    } else {
      label.fy_n = -t * (1.0 - abs_t / (3.0 * mu_fz) + t * t / (27.0 * mu_fz * mu_fz));
    }
  }

  if (cond.drive_torque_nm != 0.0) {
    const double fx = cond.drive_torque_nm / tire.effective_rolling_radius_m;
    label.fx_n = std::clamp(fx, -mu_fz, mu_fz);
  }
  return label;
}

double contact_half_angle_deg(double fz_n, const TireParams& tire) {
  if (fz_n < 0) throw std::invalid_argument("vertical load must be non-negative");
  const double r = tire.unloaded_radius_m;
  const double deflection = fz_n / tire.vertical_stiffness_n_per_m;
  if (deflection >= r) throw std::domain_error("unphysical load: deflection exceeds tire radius");
  const double half_length = std::sqrt(2.0 * r * deflection - deflection * deflection);
  return std::asin(half_length / r) / kDegToRad;
}

RevolutionTrace simulate_revolution(const OperatingCondition& cond, const TireParams& tire,
                                    std::uint64_t seed, double noise_std, double snr_db,
                                    const SignalModel& model) {
  const ForceLabel label = ground_truth_forces(cond, tire);
  const double half_angle = contact_half_angle_deg(label.fz_n, tire);

  const double v_mps = cond.velocity_kph / 3.6;
  const double omega = v_mps / tire.effective_rolling_radius_m;
  const double period_s = 2.0 * std::numbers::pi / omega;
  const double sample_rate = 10000.0;
  const auto n = static_cast<std::size_t>(std::llround(sample_rate * period_s));

  RevolutionTrace trace;
  trace.sample_rate_hz = sample_rate;
  trace.condition = cond;
  trace.label = label;
  trace.samples.resize(n);

  const double centripetal = omega * omega * tire.inner_liner_radius_m;
  const double spike_amp = model.spike_base_amplitude + model.spike_gain_per_n * std::fabs(label.fx_n);
  const double sigma = model.spike_sigma_deg;
  const double lateral_level = model.lateral_gain * label.fy_n / label.fz_n;

  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 360.0 * static_cast<double>(i) / static_cast<double>(n);
    const double u = angle - 180.0;  // patch centered at 180 deg
    const double patch = patch_indicator(u, half_angle, model.transition_width_deg);

    const double de = (u + half_angle) / sigma;  // entry spike, positive
    const double dx = (u - half_angle) / sigma;  // exit spike, negative
    trace.samples[i].angle_deg = angle;
    trace.samples[i].ax = spike_amp * (std::exp(-0.5 * de * de) - std::exp(-0.5 * dx * dx));
    trace.samples[i].ay = lateral_level * patch;
    trace.samples[i].az = centripetal * (1.0 - patch);
  }

  double std_ax = noise_std, std_ay = noise_std, std_az = noise_std;
  if (snr_db > 0.0) {
    double sx = 0, sy = 0, sz = 0;
    for (const auto& s : trace.samples) {
      sx += s.ax * s.ax;
      sy += s.ay * s.ay;
      sz += s.az * s.az;
    }
    const double scale = 1.0 / std::pow(10.0, snr_db / 20.0);
    std_ax = std::sqrt(sx / static_cast<double>(n)) * scale;
    std_ay = std::sqrt(sy / static_cast<double>(n)) * scale;
    std_az = std::sqrt(sz / static_cast<double>(n)) * scale;
  }
  if (std_ax > 0 || std_ay > 0 || std_az > 0) {
    Rng rng(seed);
    for (auto& s : trace.samples) {
      s.ax += std_ax * rng.next_gaussian();
      s.ay += std_ay * rng.next_gaussian();
      s.az += std_az * rng.next_gaussian();
    }
  }
  return trace;
}

OperatingCondition condition_at(const ScheduleEntry& entry, int rev_in_entry) {
  OperatingCondition cond = entry.condition;
  if (entry.sweep != SweepKind::None && entry.n_revolutions > 1) {
    const double mid = (entry.n_revolutions - 1) / 2.0;
    const double frac = 1.0 - std::fabs(rev_in_entry - mid) / mid;
    const double value = entry.sweep_min + (entry.sweep_max - entry.sweep_min) * frac;
    if (entry.sweep == SweepKind::LoadTriangle) {
      cond.vertical_load_n = value;
    } else {
      cond.slip_angle_deg = value;
      cond.maneuver = value == 0.0 ? ManeuverKind::FreeRolling : ManeuverKind::Cornering;
    }
  }
  return cond;
}

std::vector<RevolutionTrace> generate_dataset_serial(const TestSchedule& schedule,
                                                     const TireParams& tire,
                                                     const SignalModel& model) {
  if (schedule.entries.empty()) throw std::invalid_argument("schedule must be nonempty");
  std::vector<RevolutionTrace> traces;
  traces.reserve(schedule.total_revolutions());
  std::uint64_t global_index = 0;
  for (std::size_t e = 0; e < schedule.entries.size(); ++e) {
    const auto& entry = schedule.entries[e];
    if (entry.n_revolutions < 1) throw std::invalid_argument("entry needs >= 1 revolutions");
    for (int r = 0; r < entry.n_revolutions; ++r, ++global_index) {
      const auto cond = condition_at(entry, r);
      auto trace = simulate_revolution(cond, tire, Rng::derive(schedule.rng_seed, global_index),
                                       schedule.noise_std, schedule.snr_db, model);
      trace.entry_id = static_cast<std::int64_t>(e);
      traces.push_back(std::move(trace));
    }
  }
  return traces;
}

std::vector<RevolutionTrace> generate_dataset(const TestSchedule& schedule, const TireParams& tire,
                                              bool parallel, const SignalModel& model) {
  if (!parallel) return generate_dataset_serial(schedule, tire, model);
  if (schedule.entries.empty()) throw std::invalid_argument("schedule must be nonempty");

  // Flatten (entry, rev) pairs so revolutions can be generated independently.
  struct Item {
    std::size_t entry;
    int rev;
  };
  std::vector<Item> items;
  items.reserve(schedule.total_revolutions());
  for (std::size_t e = 0; e < schedule.entries.size(); ++e) {
    if (schedule.entries[e].n_revolutions < 1)
      throw std::invalid_argument("entry needs >= 1 revolutions");
    for (int r = 0; r < schedule.entries[e].n_revolutions; ++r) items.push_back({e, r});
  }

  std::vector<RevolutionTrace> traces(items.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
    const auto& entry = schedule.entries[items[i].entry];
    const auto cond = condition_at(entry, items[i].rev);
    traces[i] = simulate_revolution(cond, tire,
                                    Rng::derive(schedule.rng_seed, static_cast<std::uint64_t>(i)),
                                    schedule.noise_std, schedule.snr_db, model);
    traces[i].entry_id = static_cast<std::int64_t>(items[i].entry);
  }
  return traces;
}

TestSchedule paper_schedule(std::uint64_t seed, double snr_db) {
  TestSchedule s;
  s.rng_seed = seed;
  s.snr_db = snr_db;
  s.noise_std = 0.0;

  const double speeds_fr[] = {30, 60, 90};
  const double loads[] = {2080, 4160, 6240};
  const double speeds_cd[] = {30, 60};
  const double slips[] = {1, 1.5, 2, 2.5, 3, 3.5, 4, 5, 6};
  const double torques[] = {207, 218, 343, 400, 442, 526, 565, 650};

  // Free rolling: 7 x 400 + 2 x 399 fixed + 3 x 56 load sweeps = 3766 revs;
  // the two zero-slip revolutions of the slip sweep below bring the free
  // rolling total to 3768.
  int fr_count = 0;
  for (double v : speeds_fr) {
    for (double fz : loads) {
      ScheduleEntry e;
      e.condition.velocity_kph = v;
      e.condition.vertical_load_n = fz;
      e.condition.maneuver = ManeuverKind::FreeRolling;
      e.n_revolutions = (fr_count < 2) ? 399 : 400;
      ++fr_count;
      s.entries.push_back(e);
    }
    ScheduleEntry sweep;
    sweep.condition.velocity_kph = v;
    sweep.condition.maneuver = ManeuverKind::FreeRolling;
    sweep.sweep = SweepKind::LoadTriangle;
    sweep.sweep_min = 2000;
    sweep.sweep_max = 6000;
    sweep.n_revolutions = 56;
    s.entries.push_back(sweep);
  }

  // Cornering: 106 x 25 + 2 x 26 fixed + one 13-rev slip sweep = 2715 revs,
  // of which the two zero-slip sweep revolutions degrade to free rolling,
  // leaving 2713 cornering revolutions.
  int corner_count = 0;
  for (double v : speeds_cd) {
    for (double fz : loads) {
      for (double a : slips) {
        for (double sign : {1.0, -1.0}) {
          ScheduleEntry e;
          e.condition.velocity_kph = v;
          e.condition.vertical_load_n = fz;
          e.condition.slip_angle_deg = sign * a;
          e.condition.maneuver = ManeuverKind::Cornering;
          e.n_revolutions = (corner_count < 2) ? 26 : 25;
          ++corner_count;
          s.entries.push_back(e);
        }
      }
    }
  }
  {
    ScheduleEntry sweep;
    sweep.condition.velocity_kph = 60;
    sweep.condition.vertical_load_n = 4160;
    sweep.condition.slip_angle_deg = -6;
    sweep.condition.maneuver = ManeuverKind::Cornering;
    sweep.sweep = SweepKind::SlipTriangle;
    sweep.sweep_min = -6;
    sweep.sweep_max = 6;
    sweep.n_revolutions = 13;
    s.entries.push_back(sweep);
  }

  // Driving: 16 x 22 = 352 revs.
  for (double v : speeds_cd) {
    for (double t : torques) {
      ScheduleEntry e;
      e.condition.velocity_kph = v;
      e.condition.vertical_load_n = 2080;
      e.condition.drive_torque_nm = t;
      e.condition.maneuver = ManeuverKind::Driving;
      e.n_revolutions = 22;
      s.entries.push_back(e);
    }
  }
  return s;
}

}  // namespace tireforce
