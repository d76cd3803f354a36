// SPDX-License-Identifier: Apache-2.0
#include "smevca/kinematics.hpp"

#include <algorithm>
#include <stdexcept>

#include "smevca/units.hpp"

namespace smevca {

double travel_time(double distance_mi, double speed_mps) {
  if (!(speed_mps > 0)) {
    throw std::domain_error("travel_time: speed must be > 0");
  }
  if (distance_mi < 0) {
    throw std::domain_error("travel_time: distance must be >= 0");
  }
  return distance_mi / speed_mps;
}

double traversal_charge(double distance_mi, double mileage_mi_per_kwh) {
  if (!(mileage_mi_per_kwh > 0)) {
    throw std::domain_error("traversal_charge: mileage must be > 0");
  }
  if (distance_mi < 0) {
    throw std::domain_error("traversal_charge: distance must be >= 0");
  }
  return distance_mi / mileage_mi_per_kwh;
}

double required_charge(double target_fraction, double battery_full_kwh,
                       double residual_kwh, double traversal_kwh) {
  // Raw gap to the target level after the approach drive; callers decide
  // what a non-positive value means (no charge needed).
  return target_fraction * battery_full_kwh - (residual_kwh - traversal_kwh);
}

double charging_duration(double required_kwh, double cp_rate_kw,
                         double ev_reception_kw, double quantum_s) {
  if (!(cp_rate_kw > 0) || !(ev_reception_kw > 0)) {
    throw std::domain_error("charging_duration: rates must be > 0");
  }
  if (!(quantum_s > 0)) {
    throw std::domain_error("charging_duration: quantum must be > 0");
  }
  if (required_kwh <= 0) {
    return 0.0;
  }
  const double rate = std::min(cp_rate_kw, ev_reception_kw);
  return ceil_to_quantum(required_kwh / rate, quantum_s);
}

double sla_window(double charging_duration_s, double sla_wait_s,
                  double free_after_s, double travel_time_s) {
  if (free_after_s == 0.0) {
    return charging_duration_s + sla_wait_s;
  }
  if (free_after_s <= travel_time_s + sla_wait_s) {
    // CP clears while the EV approaches (or within its tolerated wait):
    // the busy tail eats into the window.  When free_after < travel the
    // correction is negative and the window exceeds the idle-CP one.
    return charging_duration_s + sla_wait_s - (free_after_s - travel_time_s);
  }
  return 0.0;  // still busy beyond what the EV tolerates
}

EdgeEstimate edge_estimate(const Subscriber& ev, const ChargePoint& cp,
                           double detour_mi, const Scenario& sc) {
  EdgeEstimate e;
  e.detour_mi = detour_mi;
  e.travel_time_s = travel_time(detour_mi, ev.avg_speed_mps);
  e.traversal_charge_kwh = traversal_charge(detour_mi, ev.mileage_mi_per_kwh);
  e.required_charge_kwh =
      required_charge(ev.target_fraction, sc.battery_full_kwh,
                      ev.residual_charge_kwh, e.traversal_charge_kwh);
  e.charging_duration_s = charging_duration(
      e.required_charge_kwh, cp.rate_kw, ev.reception_rate_kw,
      sc.time_quantum_s);
  e.sla_window_s = ceil_to_quantum(
      sla_window(e.charging_duration_s, ev.sla_wait_s, cp.free_after_s,
                 e.travel_time_s),
      sc.time_quantum_s);
  return e;
}

}  // namespace smevca
