#include "mlsim/longitudinal.hpp"

#include <algorithm>
#include <cmath>

namespace mlsim {

IdmParams cacc_params(double time_gap) {
  IdmParams p;
  p.max_accel = 2.0;
  p.comfort_decel = 2.0;
  p.coolness = 0.99;
  p.accel_exponent = 4.0;
  p.desired_speed = kmh_to_ms(105.0);
  p.min_gap = 1.0;
  p.time_gap = time_gap;
  return p;
}

IdmParams human_params(double desired_speed_ms) {
  IdmParams p;
  p.max_accel = 1.4;
  p.comfort_decel = 2.0;
  p.coolness = 0.99;
  p.accel_exponent = 4.0;
  p.desired_speed = desired_speed_ms;
  p.min_gap = 2.0;
  p.time_gap = 1.4;
  return p;
}

double draw_human_desired_speed(RngStream& heterogeneity) {
  return kmh_to_ms(heterogeneity.normal_truncated(105.0, 5.0, 90.0, 120.0));
}

double desired_gap(double v, double approach_rate, const IdmParams& p) {
  double dyn = v * p.time_gap +
               v * approach_rate / (2.0 * std::sqrt(p.max_accel * p.comfort_decel));
  return p.min_gap + std::max(0.0, dyn);
}

double free_accel(double v, const IdmParams& p) {
  return p.max_accel * (1.0 - std::pow(v / p.desired_speed, p.accel_exponent));
}

double idm_accel(double v, double v_lead, double gap, const IdmParams& p) {
  if (gap <= 0.0) throw SimulationFault("idm_accel: non-positive gap with leader present");
  double g = std::max(gap, kGapFloor);
  double s_star = desired_gap(v, v - v_lead, p);
  double ratio = s_star / g;
  return p.max_accel *
         (1.0 - std::pow(v / p.desired_speed, p.accel_exponent) - ratio * ratio);
}

double idm_gap_accel(double v, double v_lead, double gap, const IdmParams& p) {
  if (gap <= 0.0) throw SimulationFault("idm_gap_accel: non-positive gap with leader present");
  double g = std::max(gap, kGapFloor);
  double s_star = desired_gap(v, v - v_lead, p);
  double ratio = s_star / g;
  return p.max_accel * (1.0 - ratio * ratio);
}

double cah_accel(double v, double v_lead, double accel_lead, double gap, const IdmParams& p) {
  if (gap <= 0.0) throw SimulationFault("cah_accel: non-positive gap with leader present");
  double g = std::max(gap, kGapFloor);
  double a_hat = std::min(accel_lead, p.max_accel);
  if (v_lead * (v - v_lead) <= -2.0 * g * a_hat) {
    double denom = v_lead * v_lead - 2.0 * g * a_hat;
    if (std::abs(denom) >= 1e-9) return v * v * a_hat / denom;
  }
  double dv = v - v_lead;
  double theta = dv > 0.0 ? 1.0 : 0.0;  // Heaviside: no penalty when not closing
  return a_hat - theta * dv * dv / (2.0 * g);
}

double eidm_blend(double accel_idm, double accel_cah, const IdmParams& p) {
  if (accel_idm >= accel_cah) return accel_idm;
  double b = p.comfort_decel;
  return (1.0 - p.coolness) * accel_idm +
         p.coolness * (accel_cah + b * std::tanh((accel_idm - accel_cah) / b));
}

double eidm_accel(double v, double v_lead, double accel_lead, double gap, const IdmParams& p) {
  double a_idm = idm_accel(v, v_lead, gap, p);
  double a_cah = cah_accel(v, v_lead, accel_lead, gap, p);
  return eidm_blend(a_idm, a_cah, p);
}

double cacc_following_accel(double v, double v_lead, double accel_lead, double gap,
                            const IdmParams& p, double closing_boost) {
  double a_gap = idm_gap_accel(v, v_lead, gap, p);
  double a_cah = cah_accel(v, v_lead, accel_lead, gap, p);
  double speed_cap = p.desired_speed;
  if (closing_boost > 0.0) {
    double target = p.min_gap + v * p.time_gap;
    double over = std::clamp((gap - target) / std::max(target, 1.0), 0.0, 1.0);
    speed_cap += closing_boost * over;
  }
  IdmParams capped = p;
  capped.desired_speed = speed_cap;
  return std::min(free_accel(v, capped), eidm_blend(a_gap, a_cah, p));
}

double clamp_commanded(double accel, const IdmParams& p) {
  return std::clamp(accel, -kMaxBrake, p.max_accel);
}

}  // namespace mlsim
