// SPDX-License-Identifier: Apache-2.0
// Per-edge physics: travel time, traversal cost, charge demand, charging
// duration, and the service window.  Frozen values were computed by hand
// from the closed-form definitions before the implementation existed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smevca/kinematics.hpp"
#include "smevca/rng.hpp"
#include "smevca/units.hpp"

using namespace smevca;

namespace {

Subscriber table_ev() {
  Subscriber ev;
  ev.id = 0;
  ev.position = {0, 0};
  ev.residual_charge_kwh = 20.0;
  ev.avg_speed_mps = mph_to_mi_per_s(30.0);
  ev.mileage_mi_per_kwh = 4.0;
  ev.reception_rate_kw = kwh_per_min_to_kw_s(2.0);
  ev.target_fraction = 0.8;
  ev.fast_quota_kwh = 60.0;
  ev.sla_wait_s = 900.0;
  return ev;
}

ChargePoint fast_cp(double free_after = 0.0) {
  ChargePoint cp;
  cp.id = 0;
  cp.charge_type = ChargeType::fast;
  cp.network = Network::in;
  cp.rate_kw = kwh_per_min_to_kw_s(2.0);
  cp.quota = 2;
  cp.free_after_s = free_after;
  return cp;
}

Scenario shell() {
  Scenario sc;
  sc.battery_full_kwh = 60.0;
  sc.time_quantum_s = 1.0;
  return sc;
}

}  // namespace

TEST_CASE("travel_time") {
  CHECK(travel_time(1.5, mph_to_mi_per_s(30.0)) == doctest::Approx(180.0));
  CHECK(travel_time(0.125, mph_to_mi_per_s(30.0)) == doctest::Approx(15.0));
  CHECK(travel_time(0.0, mph_to_mi_per_s(30.0)) == 0.0);
  CHECK_THROWS_AS(travel_time(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(travel_time(-1.0, 1.0), std::domain_error);
}

TEST_CASE("traversal_charge") {
  CHECK(traversal_charge(1.0, 4.0) == doctest::Approx(0.25));
  CHECK(traversal_charge(0.0, 4.0) == 0.0);
  CHECK_THROWS_AS(traversal_charge(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(traversal_charge(-0.5, 4.0), std::domain_error);
}

TEST_CASE("required_charge keeps the raw value") {
  // 0.8 * 60 - (20 - 0.25) = 28.25
  CHECK(required_charge(0.8, 60.0, 20.0, 0.25) == doctest::Approx(28.25));
  CHECK(required_charge(0.8, 60.0, 20.0, 0.0) == doctest::Approx(28.0));
  // Already above target: negative demand is reported, not clamped.
  CHECK(required_charge(0.5, 60.0, 55.0, 0.0) == doctest::Approx(-25.0));
}

TEST_CASE("charging_duration quantizes upward at the effective rate") {
  const double fast = kwh_per_min_to_kw_s(2.0);
  const double reg = kwh_per_min_to_kw_s(1.0);
  // 28.25 kWh at 2 kWh/min = 847.5 s -> 848.
  CHECK(charging_duration(28.25, fast, fast, 1.0) == 848.0);
  // 10 kWh at min(1, 2) = 1 kWh/min = 600 s exactly (no bump from noise).
  CHECK(charging_duration(10.0, reg, fast, 1.0) == 600.0);
  CHECK(charging_duration(0.0, fast, fast, 1.0) == 0.0);
  CHECK(charging_duration(-3.0, fast, fast, 1.0) == 0.0);
  CHECK_THROWS_AS(charging_duration(1.0, 0.0, fast, 1.0), std::domain_error);
  CHECK_THROWS_AS(charging_duration(1.0, fast, fast, 0.0), std::domain_error);
}

TEST_CASE("charging_duration excess is below one quantum") {
  SplitMix64 rng(2024);
  const double fast = kwh_per_min_to_kw_s(2.0);
  for (int i = 0; i < 1000; ++i) {
    const double psi = rng.uniform_real(0.01, 50.0);
    const double d = charging_duration(psi, fast, fast, 1.0);
    const double exact = psi / fast;
    CHECK(d >= exact - 1e-6);
    CHECK(d < exact + 1.0);
    CHECK(d == static_cast<double>(static_cast<long long>(d)));  // integral
  }
}

TEST_CASE("sla_window branches") {
  // Idle CP: window = duration + tolerated wait.
  CHECK(sla_window(600.0, 900.0, 0.0, 180.0) == doctest::Approx(1500.0));
  // CP frees exactly when the EV arrives: same window.
  CHECK(sla_window(600.0, 900.0, 180.0, 180.0) == doctest::Approx(1500.0));
  // Busy tail eats into the window.
  CHECK(sla_window(600.0, 900.0, 500.0, 180.0) == doctest::Approx(1180.0));
  // CP frees before the EV even arrives: window exceeds duration + wait.
  CHECK(sla_window(600.0, 900.0, 100.0, 180.0) == doctest::Approx(1580.0));
  // Busy beyond travel + tolerated wait: unusable.
  CHECK(sla_window(600.0, 900.0, 1200.0, 180.0) == 0.0);
}

TEST_CASE("sla_window is non-increasing in the busy tail") {
  double prev = sla_window(600.0, 900.0, 1e-9, 180.0);
  for (double free_after = 100.0; free_after <= 1400.0; free_after += 100.0) {
    const double w = sla_window(600.0, 900.0, free_after, 180.0);
    CHECK(w <= prev + 1e-9);
    prev = w;
  }
}

TEST_CASE("edge_estimate composes the chain (1 mile fixture)") {
  const Scenario sc = shell();
  const EdgeEstimate e = edge_estimate(table_ev(), fast_cp(), 1.0, sc);
  CHECK(e.detour_mi == 1.0);
  CHECK(e.travel_time_s == doctest::Approx(120.0));
  CHECK(e.traversal_charge_kwh == doctest::Approx(0.25));
  CHECK(e.required_charge_kwh == doctest::Approx(28.25));
  CHECK(e.charging_duration_s == 848.0);
  CHECK(e.sla_window_s == 1748.0);  // 848 + 900, idle CP
}

TEST_CASE("edge_estimate with a co-located CP") {
  const Scenario sc = shell();
  const EdgeEstimate e = edge_estimate(table_ev(), fast_cp(), 0.0, sc);
  CHECK(e.travel_time_s == 0.0);
  CHECK(e.traversal_charge_kwh == 0.0);
  CHECK(e.required_charge_kwh == doctest::Approx(28.0));
}

TEST_CASE("edge_estimate never rejects an unusable edge") {
  const Scenario sc = shell();
  // CP busy far beyond the EV's tolerance: window collapses to 0 but the
  // record is still produced for upstream filtering.
  const EdgeEstimate e = edge_estimate(table_ev(), fast_cp(5000.0), 1.0, sc);
  CHECK(e.sla_window_s == 0.0);
  CHECK(e.required_charge_kwh == doctest::Approx(28.25));
}

TEST_CASE("edge_estimate is pure") {
  const Scenario sc = shell();
  const EdgeEstimate a = edge_estimate(table_ev(), fast_cp(), 0.625, sc);
  const EdgeEstimate b = edge_estimate(table_ev(), fast_cp(), 0.625, sc);
  CHECK(a.travel_time_s == b.travel_time_s);
  CHECK(a.required_charge_kwh == b.required_charge_kwh);
  CHECK(a.charging_duration_s == b.charging_duration_s);
  CHECK(a.sla_window_s == b.sla_window_s);
}

TEST_CASE("idle-CP identity: window = duration + wait exactly") {
  const Scenario sc = shell();
  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Subscriber ev = table_ev();
    ev.residual_charge_kwh = rng.uniform_real(10.0, 37.0);
    ev.sla_wait_s = rng.uniform_real(300.0, 1500.0);
    const EdgeEstimate e =
        edge_estimate(ev, fast_cp(), rng.uniform_real(0.0, 2.0), sc);
    if (e.required_charge_kwh > 0) {
      // The window is quantized upward, so it sits within one quantum of
      // the exact duration + wait.
      const double exact = e.charging_duration_s + ev.sla_wait_s;
      CHECK(e.sla_window_s >= exact - 1e-9);
      CHECK(e.sla_window_s < exact + 1.0);
    }
  }
}
