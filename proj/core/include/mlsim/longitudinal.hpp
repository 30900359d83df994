#pragma once

#include "mlsim/rng.hpp"

namespace mlsim {

/// Car-following parameter set (shared by automated and human vehicles, with
/// different values).
struct IdmParams {
  double max_accel = 2.0;       // a, m/s^2
  double comfort_decel = 2.0;   // b, m/s^2, > 0
  double coolness = 0.99;       // c in [0, 1]
  double accel_exponent = 4.0;  // delta
  double desired_speed = kmh_to_ms(105.0);  // m/s
  double min_gap = 1.0;         // s0, m
  double time_gap = 1.0;        // T, s
};

/// Gap below which interaction terms are evaluated at this floor instead,
/// so pathological states cannot blow up the division.
inline constexpr double kGapFloor = 0.1;  // m

/// Physical emergency braking limit applied to every commanded acceleration.
inline constexpr double kMaxBrake = 8.0;  // m/s^2

/// CACC control parameter set (a=b=2, c=0.99, delta=4, v_des=105 km/h, s0=1 m)
/// with the supplied time gap.
IdmParams cacc_params(double time_gap);

/// Human driver set: a=1.4, b=2.0, T=1.4 s, s0=2 m, delta=4, per-vehicle
/// desired speed supplied by the caller.
IdmParams human_params(double desired_speed_ms);

/// Draw a human desired speed: N(105, 5^2) km/h truncated to [90, 120] km/h,
/// returned in m/s.
double draw_human_desired_speed(RngStream& heterogeneity);

/// Desired (minimal) gap s* = s0 + max(0, vT + v*dv / (2*sqrt(a*b))),
/// where dv = v - v_lead is the approach rate. Floored at s0.
double desired_gap(double v, double approach_rate, const IdmParams& p);

/// Free-road acceleration a*(1 - (v/v_des)^delta).
double free_accel(double v, const IdmParams& p);

/// Full IDM acceleration with a leader present:
/// a*(1 - (v/v_des)^delta - (s*/gap)^2). Gap must be positive.
double idm_accel(double v, double v_lead, double gap, const IdmParams& p);

/// Interaction-only IDM term a*(1 - (s*/gap)^2); used by the CACC gap
/// controller, where the speed target is enforced separately.
double idm_gap_accel(double v, double v_lead, double gap, const IdmParams& p);

/// Constant-acceleration heuristic. accel_lead is the leader's current
/// acceleration; the effective leader acceleration is min(accel_lead, a).
double cah_accel(double v, double v_lead, double accel_lead, double gap, const IdmParams& p);

/// The E-IDM switching rule applied to a precomputed (idm, cah) pair:
/// idm >= cah -> idm; otherwise (1-c)*idm + c*(cah + b*tanh((idm-cah)/b)).
double eidm_blend(double accel_idm, double accel_cah, const IdmParams& p);

/// E-IDM acceleration for a human-driven vehicle (full IDM term inside the
/// switching rule). No leader -> free_accel.
double eidm_accel(double v, double v_lead, double accel_lead, double gap, const IdmParams& p);

/// CACC automated-following command: min(free-speed term, E-IDM switching on
/// the gap-interaction term). At equilibrium behind a slower-or-equal leader
/// this regulates the gap to exactly s0 + vT. closing_boost is a bounded
/// overspeed margin used to close an excess gap (approach or intra-platoon
/// tightening); it fades out linearly as the gap reaches its target, so the
/// equilibrium point itself is unaffected.
double cacc_following_accel(double v, double v_lead, double accel_lead, double gap,
                            const IdmParams& p, double closing_boost = 0.0);

/// Clamp a commanded acceleration to the physical envelope [-kMaxBrake, a].
double clamp_commanded(double accel, const IdmParams& p);

}  // namespace mlsim
