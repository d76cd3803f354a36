// SPDX-License-Identifier: Apache-2.0
// Domain types: unit conversions, quantum rounding, scenario validation,
// and the scenario JSON round trip.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "smevca/domain.hpp"
#include "smevca/units.hpp"

using namespace smevca;

namespace {

// Minimal hand-built scenario that passes every invariant.
Scenario tiny_scenario() {
  Scenario sc;
  sc.battery_full_kwh = 60.0;
  sc.batch_time_s = 0.0;
  sc.time_quantum_s = 1.0;
  sc.seed = 99;

  Subscriber ev;
  ev.id = 0;
  ev.position = {2, 3};
  ev.residual_charge_kwh = 20.0;
  ev.avg_speed_mps = mph_to_mi_per_s(30.0);
  ev.mileage_mi_per_kwh = 4.0;
  ev.reception_rate_kw = kwh_per_min_to_kw_s(2.0);
  ev.target_fraction = 0.8;
  ev.fast_quota_kwh = 30.0;
  ev.sla_wait_s = 900.0;
  sc.subscribers.push_back(ev);
  ev.id = 1;
  ev.position = {10, 10};
  sc.subscribers.push_back(ev);

  ChargePoint cp;
  cp.id = 0;
  cp.position = {4, 4};
  cp.charge_type = ChargeType::fast;
  cp.network = Network::in;
  cp.rate_kw = kwh_per_min_to_kw_s(2.0);
  cp.quota = 2;
  cp.free_after_s = 0.0;
  sc.charge_points.push_back(cp);
  cp.id = 1;
  cp.position = {12, 6};
  cp.charge_type = ChargeType::regular;
  cp.network = Network::partner;
  cp.rate_kw = kwh_per_min_to_kw_s(1.0);
  sc.charge_points.push_back(cp);
  return sc;
}

bool any_mentions(const std::vector<std::string>& msgs,
                  const std::string& needle) {
  for (const auto& m : msgs) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("unit conversions round-trip exactly") {
  for (double v : {1.0, 30.0, 72.5}) {
    CHECK(mi_per_s_to_mph(mph_to_mi_per_s(v)) == doctest::Approx(v).epsilon(1e-9));
    CHECK(kw_s_to_kwh_per_min(kwh_per_min_to_kw_s(v)) ==
          doctest::Approx(v).epsilon(1e-9));
    CHECK(seconds_to_minutes(minutes_to_seconds(v)) ==
          doctest::Approx(v).epsilon(1e-9));
  }
  CHECK(mph_to_mi_per_s(30.0) == doctest::Approx(30.0 / 3600.0));
  CHECK(kwh_per_min_to_kw_s(2.0) == doctest::Approx(2.0 / 60.0));
}

TEST_CASE("ceil_to_quantum rounds up but tolerates float noise") {
  CHECK(ceil_to_quantum(847.5, 1.0) == 848.0);
  CHECK(ceil_to_quantum(600.0, 1.0) == 600.0);
  // A few ulp above an exact multiple must not cost a whole quantum.
  CHECK(ceil_to_quantum(600.0000000000001, 1.0) == 600.0);
  CHECK(ceil_to_quantum(600.1, 1.0) == 601.0);
  CHECK(ceil_to_quantum(0.0, 1.0) == 0.0);
  CHECK(ceil_to_quantum(-5.0, 1.0) == 0.0);
  CHECK(ceil_to_quantum(12.2, 5.0) == 15.0);
  CHECK(ceil_to_quantum(10.0, 5.0) == 10.0);
}

TEST_CASE("enum names") {
  CHECK(std::string(to_string(ChargeType::fast)) == "fast");
  CHECK(std::string(to_string(ChargeType::regular)) == "regular");
  CHECK(std::string(to_string(Network::in)) == "in");
  CHECK(std::string(to_string(Network::partner)) == "partner");
}

TEST_CASE("validate_scenario accepts a well-formed scenario") {
  CHECK(validate_scenario(tiny_scenario()).empty());
}

TEST_CASE("validate_scenario names the offending entity") {
  Scenario sc = tiny_scenario();

  SUBCASE("zero quota") {
    sc.charge_points[1].quota = 0;
    const auto v = validate_scenario(sc);
    REQUIRE(v.size() == 1);
    CHECK(any_mentions(v, "charge point 1"));
    CHECK(any_mentions(v, "quota"));
  }
  SUBCASE("residual above full battery") {
    sc.subscribers[0].residual_charge_kwh = 70.0;
    const auto v = validate_scenario(sc);
    REQUIRE(v.size() == 1);
    CHECK(any_mentions(v, "subscriber 0"));
    CHECK(any_mentions(v, "battery_full_kwh"));
  }
  SUBCASE("duplicate subscriber id") {
    sc.subscribers[1].id = 0;
    const auto v = validate_scenario(sc);
    CHECK(any_mentions(v, "duplicate id"));
  }
  SUBCASE("position outside the grid") {
    sc.subscribers[0].position = {17, 3};
    CHECK(any_mentions(validate_scenario(sc), "outside grid"));
  }
  SUBCASE("nonpositive speed") {
    sc.subscribers[1].avg_speed_mps = 0.0;
    CHECK(any_mentions(validate_scenario(sc), "avg_speed_mps"));
  }
  SUBCASE("target fraction out of range") {
    sc.subscribers[0].target_fraction = 0.0;
    CHECK(any_mentions(validate_scenario(sc), "target_fraction"));
    sc.subscribers[0].target_fraction = 1.2;
    CHECK(any_mentions(validate_scenario(sc), "target_fraction"));
  }
  SUBCASE("zero time quantum") {
    sc.time_quantum_s = 0.0;
    CHECK(any_mentions(validate_scenario(sc), "time_quantum_s"));
  }
  SUBCASE("negative free_after") {
    sc.charge_points[0].free_after_s = -1.0;
    CHECK(any_mentions(validate_scenario(sc), "free_after_s"));
  }
  SUBCASE("independent violations are all reported") {
    sc.charge_points[1].quota = 0;
    sc.subscribers[0].residual_charge_kwh = 70.0;
    CHECK(validate_scenario(sc).size() == 2);
  }
}

TEST_CASE("validate_scenario is pure") {
  const Scenario sc = tiny_scenario();
  CHECK(validate_scenario(sc) == validate_scenario(sc));
}

TEST_CASE("scenario JSON round trip is byte-stable") {
  const Scenario sc = tiny_scenario();
  const std::string first = scenario_to_json(sc);
  const Scenario back = scenario_from_json(first);
  CHECK(scenario_to_json(back) == first);

  // Spot-check values survive exactly.
  CHECK(back.subscribers.size() == 2);
  CHECK(back.charge_points.size() == 2);
  CHECK(back.seed == 99);
  CHECK(back.subscribers[0].residual_charge_kwh == 20.0);
  CHECK(back.subscribers[0].avg_speed_mps == sc.subscribers[0].avg_speed_mps);
  CHECK(back.charge_points[0].charge_type == ChargeType::fast);
  CHECK(back.charge_points[1].network == Network::partner);
  CHECK(back.charge_points[1].position == GridPos{12, 6});
}

TEST_CASE("malformed scenario JSON raises") {
  CHECK_THROWS_AS(scenario_from_json("{"), std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json("{}"), std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json(R"({"subscribers": []})"),
                  std::runtime_error);
}

TEST_CASE("save/load through a file") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "smevca_domain_rt.json";
  const Scenario sc = tiny_scenario();
  save_scenario(sc, path.string());
  const Scenario back = load_scenario(path.string());
  CHECK(scenario_to_json(back) == scenario_to_json(sc));
  fs::remove(path);

  CHECK_THROWS_AS(load_scenario("/nonexistent/nowhere.json"),
                  std::runtime_error);
}

TEST_CASE("committed example scenario loads cleanly") {
  const std::string path = std::string(SMEVCA_TEST_DATA) +
                           "/scenario_example.json";
  const Scenario sc = load_scenario(path);
  CHECK(validate_scenario(sc).empty());
  CHECK(sc.subscribers.size() == 8);
  CHECK(sc.charge_points.size() == 30);

  int in_fast = 0, in_reg = 0, par_fast = 0, par_reg = 0;
  for (const ChargePoint& cp : sc.charge_points) {
    CHECK(cp.quota == 2);
    if (cp.network == Network::in) {
      (cp.charge_type == ChargeType::fast ? in_fast : in_reg)++;
    } else {
      (cp.charge_type == ChargeType::fast ? par_fast : par_reg)++;
    }
  }
  CHECK(in_fast == 5);
  CHECK(in_reg == 10);
  CHECK(par_fast == 5);
  CHECK(par_reg == 10);
}
