// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "smevca/domain.hpp"

namespace smevca {

/// Everything the matching layer needs to know about one (EV, CP) edge.
/// Durations are in seconds and already rounded up to the scenario time
/// quantum where noted.
struct EdgeEstimate {
  double travel_time_s = 0.0;        // detour distance at the EV's speed
  double traversal_charge_kwh = 0.0; // energy spent driving the detour
  double required_charge_kwh = 0.0;  // energy to reach the target level;
                                     // may be <= 0 (EV already full enough)
  double charging_duration_s = 0.0;  // quantized; 0 when no charge needed
  double sla_window_s = 0.0;         // quantized deadline (complete - arrive)
  double detour_mi = 0.0;
};

/// distance / speed.  Throws std::domain_error unless speed > 0.
double travel_time(double distance_mi, double speed_mps);

/// distance / mileage.  Throws std::domain_error unless mileage > 0.
double traversal_charge(double distance_mi, double mileage_mi_per_kwh);

/// target_fraction * battery_full - (residual - traversal).  The raw value
/// is preserved: a negative result means the EV needs no charge.
double required_charge(double target_fraction, double battery_full_kwh,
                       double residual_kwh, double traversal_kwh);

/// required / min(cp rate, ev reception), rounded up to the quantum.
/// Throws std::domain_error unless both rates and the quantum are > 0.
double charging_duration(double required_kwh, double cp_rate_kw,
                         double ev_reception_kw, double quantum_s);

/// Tolerated duration between arrival and completion:
///   CP idle now                -> duration + tolerated wait
///   CP frees up mid-approach   -> duration + wait - (free_after - travel)
///   CP frees up after that     -> 0 (EV cannot be served in time)
/// The middle branch covers free_after <= travel_time too, in which case
/// the window exceeds duration + wait.  Not quantized here.
double sla_window(double charging_duration_s, double sla_wait_s,
                  double free_after_s, double travel_time_s);

/// Full per-edge evaluation at `detour_mi`, quantized per sc.time_quantum_s.
EdgeEstimate edge_estimate(const Subscriber& ev, const ChargePoint& cp,
                           double detour_mi, const Scenario& sc);

}  // namespace smevca
