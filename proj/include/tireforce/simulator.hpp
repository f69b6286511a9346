#pragma once

#include <cstdint>
#include <vector>

#include "tireforce/types.hpp"

namespace tireforce {

// Ground-truth tire forces for one operating condition.
//
// Lateral: cubic brush saturation law,
//   Fy = -Ca*tan(a) * [1 - |Ca*tan(a)|/(3 mu Fz) + (Ca*tan(a))^2/(27 mu^2 Fz^2)]
// clamped to -sign(a) * mu * Fz past the saturation slip angle.
// Longitudinal: Fx = torque / effective rolling radius, clamped to mu * Fz.
ForceLabel ground_truth_forces(const OperatingCondition& cond, const TireParams& tire);

// Half angle (degrees) subtended by the contact patch at the wheel center.
// From ring geometry: deflection d = Fz/kz, half length a = sqrt(2Rd - d^2),
// half angle = asin(a/R). Throws on d >= R (unphysical load).
double contact_half_angle_deg(double fz_n, const TireParams& tire);

// Signal model knobs for the synthetic inner-liner accelerometer.
struct SignalModel {
  double spike_base_amplitude = 30.0;   // m/s^2, ax boundary spike at Fx = 0
  double spike_gain_per_n = 0.05;       // m/s^2 per N of |Fx|
  double spike_sigma_deg = 1.2;         // angular width of boundary spikes
  double lateral_gain = 50.0;           // m/s^2 at fy/fz = 1 inside the patch
  double transition_width_deg = 1.5;    // az collapse edge width
};

// One synthetic wheel revolution. The patch is centered at 180 deg; az sits at
// the centripetal level w^2 * r_liner outside the patch and collapses toward 0
// inside it; ax carries an entry spike and an opposite-sign exit spike at
// +-contact_half_angle around the center; ay inside the patch scales with
// fy/fz. Deterministic given (cond, tire, seed).
RevolutionTrace simulate_revolution(const OperatingCondition& cond, const TireParams& tire,
                                    std::uint64_t seed, double noise_std = 0.0,
                                    double snr_db = 0.0,
                                    const SignalModel& model = SignalModel{});

// Expands a schedule into one trace per scheduled revolution, in order.
// Triangular sweep entries interpolate load or slip angle linearly up to the
// entry midpoint and back down. Each revolution's noise stream is derived from
// (schedule seed, global revolution index), so the serial and parallel paths
// produce bit-identical datasets.
std::vector<RevolutionTrace> generate_dataset(const TestSchedule& schedule,
                                              const TireParams& tire,
                                              bool parallel = true,
                                              const SignalModel& model = SignalModel{});

// Serial reference for generate_dataset; kept for the consistency tests and
// the kernel benchmark.
std::vector<RevolutionTrace> generate_dataset_serial(const TestSchedule& schedule,
                                                     const TireParams& tire,
                                                     const SignalModel& model = SignalModel{});

// Schedule mirroring the published test matrix: free rolling at 30/60/90 kph
// over loads 2080/4160/6240 N plus triangular load sweeps; cornering at 30/60
// kph over three loads and slip angles +-1..+-6 deg plus a triangular slip
// sweep; driving at 30/60 kph, 2080 N, torques 207..650 Nm. Sized to yield
// 6833 total / 2713 cornering / 352 driving revolutions.
TestSchedule paper_schedule(std::uint64_t seed, double snr_db = 20.0);

// Condition for schedule entry `entry`, revolution `rev_in_entry` (applies the
// triangular sweep if any).
OperatingCondition condition_at(const ScheduleEntry& entry, int rev_in_entry);

}  // namespace tireforce
