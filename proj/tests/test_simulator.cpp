#include <cmath>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "tireforce/simulator.hpp"

using namespace tireforce;

namespace {

TireParams default_tire() { return TireParams{}; }

}  // namespace

TEST_CASE("lateral force saturates at mu * Fz for large slip") {
  // 6 deg slip at 2080 N with the default (large) cornering stiffness drives
  // the cubic law past saturation: |Fy| = 1.1 * 2080 = 2288 N.
  OperatingCondition cond;
  cond.slip_angle_deg = 6.0;
  cond.vertical_load_n = 2080.0;
  cond.maneuver = ManeuverKind::Cornering;
  const auto label = ground_truth_forces(cond, default_tire());
  CHECK(label.fy_n == doctest::Approx(-2288.0).epsilon(1e-12));

  cond.slip_angle_deg = -6.0;
  const auto mirrored = ground_truth_forces(cond, default_tire());
  CHECK(mirrored.fy_n == doctest::Approx(2288.0).epsilon(1e-12));
}

TEST_CASE("lateral force follows the cubic law below saturation") {
  OperatingCondition cond;
  cond.slip_angle_deg = 1.0;
  cond.vertical_load_n = 6240.0;
  cond.maneuver = ManeuverKind::Cornering;
  const auto tire = default_tire();
  const auto label = ground_truth_forces(cond, tire);

  const double mu_fz = tire.friction_coefficient * cond.vertical_load_n;
  const double t = tire.cornering_stiffness_n_per_rad * std::tan(1.0 * M_PI / 180.0);
  const double expected = -t * (1.0 - t / (3.0 * mu_fz) + t * t / (27.0 * mu_fz * mu_fz));
  CHECK(label.fy_n == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::fabs(label.fy_n) < mu_fz);
}

TEST_CASE("longitudinal force is torque over rolling radius, clamped") {
  OperatingCondition cond;
  cond.drive_torque_nm = 343.0;
  cond.vertical_load_n = 2080.0;
  cond.maneuver = ManeuverKind::Driving;
  TireParams tire = default_tire();
  tire.unloaded_radius_m = 0.32;
  tire.effective_rolling_radius_m = 0.31;
  const auto label = ground_truth_forces(cond, tire);
  CHECK(label.fx_n == doctest::Approx(343.0 / 0.31).epsilon(1e-12));  // ~1106.5 N
  CHECK(label.fx_n < tire.friction_coefficient * cond.vertical_load_n);

  // Far above the friction limit the force clamps at mu * Fz.
  cond.drive_torque_nm = 5000.0;
  const auto clamped = ground_truth_forces(cond, tire);
  CHECK(clamped.fx_n == doctest::Approx(1.1 * 2080.0).epsilon(1e-12));
}

TEST_CASE("contact half angle from ring geometry") {
  // R = 0.3 m, deflection 0.01 m -> a = sqrt(0.0059) ~ 0.0768 m, ~14.84 deg.
  TireParams tire = default_tire();
  tire.unloaded_radius_m = 0.3;
  tire.vertical_stiffness_n_per_m = 100.0;  // Fz = 1 N gives exactly 0.01 m
  const double deg = contact_half_angle_deg(1.0, tire);
  const double expected = std::asin(std::sqrt(0.0059) / 0.3) * 180.0 / M_PI;
  CHECK(deg == doctest::Approx(expected).epsilon(1e-12));
  CHECK(deg == doctest::Approx(14.84).epsilon(1e-3));

  CHECK(contact_half_angle_deg(0.0, tire) == 0.0);
  CHECK_THROWS_AS(contact_half_angle_deg(100.0, tire), std::domain_error);  // d >= R
}

TEST_CASE("condition validation rejects inconsistent maneuvers") {
  OperatingCondition cond;
  cond.maneuver = ManeuverKind::FreeRolling;
  cond.slip_angle_deg = 1.0;
  CHECK_THROWS_AS(cond.validate(), std::invalid_argument);

  cond.slip_angle_deg = 0.0;
  cond.maneuver = ManeuverKind::Cornering;
  CHECK_THROWS_AS(cond.validate(), std::invalid_argument);

  cond.maneuver = ManeuverKind::Driving;
  CHECK_THROWS_AS(cond.validate(), std::invalid_argument);
}

TEST_CASE("noiseless ax spikes sit one contact half angle either side of center") {
  OperatingCondition cond;
  cond.velocity_kph = 60.0;
  cond.vertical_load_n = 4160.0;
  const auto tire = default_tire();
  const auto trace = simulate_revolution(cond, tire, 1, 0.0, 0.0);

  std::size_t imax = 0, imin = 0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (trace.samples[i].ax > trace.samples[imax].ax) imax = i;
    if (trace.samples[i].ax < trace.samples[imin].ax) imin = i;
  }
  const double half = contact_half_angle_deg(4160.0, tire);
  const double step = 360.0 / static_cast<double>(trace.samples.size());
  const double spacing = trace.samples[imin].angle_deg - trace.samples[imax].angle_deg;
  CHECK(std::fabs(spacing - 2.0 * half) <= 2.0 * step);
  CHECK(std::fabs(trace.samples[imax].angle_deg - (180.0 - half)) <= step);
  CHECK(std::fabs(trace.samples[imin].angle_deg - (180.0 + half)) <= step);
}

TEST_CASE("az sits at the centripetal level outside the patch and collapses inside") {
  OperatingCondition cond;
  cond.velocity_kph = 90.0;
  const auto tire = default_tire();
  const auto trace = simulate_revolution(cond, tire, 1, 0.0, 0.0);

  const double omega = (90.0 / 3.6) / tire.effective_rolling_radius_m;
  const double centripetal = omega * omega * tire.inner_liner_radius_m;
  // Top of the wheel (angle 0) is far from the patch; patch center is 180.
  CHECK(trace.samples.front().az == doctest::Approx(centripetal).epsilon(1e-9));
  const auto mid = trace.samples[trace.samples.size() / 2];
  CHECK(std::fabs(mid.angle_deg - 180.0) < 0.5);
  CHECK(std::fabs(mid.az) < 1e-9 * centripetal);
}

TEST_CASE("sample count follows rotation period at 10 kHz") {
  OperatingCondition cond;
  cond.velocity_kph = 60.0;
  const auto tire = default_tire();
  const auto trace = simulate_revolution(cond, tire, 1);
  const double period = 2.0 * M_PI * tire.effective_rolling_radius_m / (60.0 / 3.6);
  CHECK(trace.samples.size() == static_cast<std::size_t>(std::llround(10000.0 * period)));
  CHECK(trace.sample_rate_hz == 10000.0);
  // Angles strictly increasing in [0, 360).
  for (std::size_t i = 1; i < trace.samples.size(); ++i)
    CHECK(trace.samples[i].angle_deg > trace.samples[i - 1].angle_deg);
  CHECK(trace.samples.back().angle_deg < 360.0);
}

TEST_CASE("same seed reproduces the noisy trace bit for bit") {
  OperatingCondition cond;
  const auto tire = default_tire();
  const auto a = simulate_revolution(cond, tire, 42, 0.0, 20.0);
  const auto b = simulate_revolution(cond, tire, 42, 0.0, 20.0);
  const auto c = simulate_revolution(cond, tire, 43, 0.0, 20.0);
  REQUIRE(a.samples.size() == b.samples.size());
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    identical = identical && a.samples[i].ax == b.samples[i].ax &&
                a.samples[i].ay == b.samples[i].ay && a.samples[i].az == b.samples[i].az;
    differs = differs || a.samples[i].ax != c.samples[i].ax;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("per-channel SNR noise matches the requested level") {
  OperatingCondition cond;
  cond.slip_angle_deg = 3.0;
  cond.maneuver = ManeuverKind::Cornering;
  const auto tire = default_tire();
  const auto clean = simulate_revolution(cond, tire, 1, 0.0, 0.0);
  const auto noisy = simulate_revolution(cond, tire, 1, 0.0, 20.0);

  double signal = 0, noise = 0;
  for (std::size_t i = 0; i < clean.samples.size(); ++i) {
    signal += clean.samples[i].az * clean.samples[i].az;
    const double d = noisy.samples[i].az - clean.samples[i].az;
    noise += d * d;
  }
  const double snr_db = 10.0 * std::log10(signal / noise);
  CHECK(snr_db == doctest::Approx(20.0).epsilon(0.02));
}

TEST_CASE("triangular sweeps rise to the midpoint and return") {
  ScheduleEntry entry;
  entry.condition.maneuver = ManeuverKind::FreeRolling;
  entry.sweep = SweepKind::LoadTriangle;
  entry.sweep_min = 2000;
  entry.sweep_max = 6000;
  entry.n_revolutions = 9;
  CHECK(condition_at(entry, 0).vertical_load_n == doctest::Approx(2000.0));
  CHECK(condition_at(entry, 4).vertical_load_n == doctest::Approx(6000.0));
  CHECK(condition_at(entry, 8).vertical_load_n == doctest::Approx(2000.0));
  CHECK(condition_at(entry, 2).vertical_load_n == condition_at(entry, 6).vertical_load_n);

  ScheduleEntry slip;
  slip.condition.maneuver = ManeuverKind::Cornering;
  slip.condition.slip_angle_deg = -6;
  slip.sweep = SweepKind::SlipTriangle;
  slip.sweep_min = -6;
  slip.sweep_max = 6;
  slip.n_revolutions = 13;
  CHECK(condition_at(slip, 0).slip_angle_deg == doctest::Approx(-6.0));
  CHECK(condition_at(slip, 6).slip_angle_deg == doctest::Approx(6.0));
  // Zero crossings degrade to free rolling so the condition stays valid.
  CHECK(condition_at(slip, 3).maneuver == ManeuverKind::FreeRolling);
  CHECK(condition_at(slip, 9).maneuver == ManeuverKind::FreeRolling);
}

TEST_CASE("paper-mirroring schedule yields the published data sizes") {
  const auto schedule = paper_schedule(1);
  std::map<ManeuverKind, std::size_t> counts;
  for (const auto& e : schedule.entries)
    for (int r = 0; r < e.n_revolutions; ++r) ++counts[condition_at(e, r).maneuver];

  CHECK(schedule.total_revolutions() == 6833);
  CHECK(counts[ManeuverKind::Cornering] == 2713);
  CHECK(counts[ManeuverKind::Driving] == 352);
  CHECK(counts[ManeuverKind::FreeRolling] == 6833 - 2713 - 352);
}

TEST_CASE("generate_dataset expands the schedule in order with entry ids") {
  TestSchedule schedule;
  schedule.rng_seed = 5;
  schedule.noise_std = 0.0;
  ScheduleEntry a, b;
  a.condition.velocity_kph = 30;
  a.n_revolutions = 3;
  b.condition.velocity_kph = 90;
  b.n_revolutions = 2;
  schedule.entries = {a, b};

  const auto traces = generate_dataset(schedule, default_tire());
  REQUIRE(traces.size() == 5);
  for (int i = 0; i < 3; ++i) {
    CHECK(traces[i].entry_id == 0);
    CHECK(traces[i].condition.velocity_kph == 30);
  }
  for (int i = 3; i < 5; ++i) {
    CHECK(traces[i].entry_id == 1);
    CHECK(traces[i].condition.velocity_kph == 90);
  }
}
