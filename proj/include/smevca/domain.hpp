// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smevca {

/// Intersection on the city grid.  Coordinates are integer intersection
/// indices in [0, blocks_per_side]; physical distance comes from
/// GridSpec::block_length_mi.
struct GridPos {
  int x = 0;
  int y = 0;

  friend bool operator==(const GridPos&, const GridPos&) = default;
};

struct GridSpec {
  int blocks_per_side = 16;
  double block_length_mi = 0.125;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Subscribed EV requesting a charge in the current batch.
/// Units: kWh, miles, seconds (speeds in miles/second, rates in kWh/second).
struct Subscriber {
  int id = 0;
  GridPos position;
  double residual_charge_kwh = 0.0;  // battery level at batch time
  double avg_speed_mps = 0.0;        // miles per second
  double mileage_mi_per_kwh = 0.0;   // miles driven per kWh consumed
  double reception_rate_kw = 0.0;    // max charge acceptance, kWh per second
  double target_fraction = 0.0;      // desired fill level as fraction of full
  double fast_quota_kwh = 0.0;       // subscription allowance at fast CPs
  double sla_wait_s = 0.0;           // max tolerated wait beyond charging
};

enum class ChargeType { regular = 0, fast = 1 };
enum class Network { in = 0, partner = 1 };

/// A charging point.  `quota` is the number of EVs it may hold across its
/// waiting list in one batch; `free_after_s` is when its current session
/// ends (0 = idle now).
struct ChargePoint {
  int id = 0;
  GridPos position;
  ChargeType charge_type = ChargeType::regular;
  Network network = Network::in;
  double rate_kw = 0.0;  // kWh per second
  int quota = 1;
  double free_after_s = 0.0;
};

struct Scenario {
  std::vector<Subscriber> subscribers;
  std::vector<ChargePoint> charge_points;
  double battery_full_kwh = 60.0;
  GridSpec grid;
  double batch_time_s = 0.0;    // when requests are collected and solved
  double time_quantum_s = 1.0;  // durations are rounded up to this grid
  std::uint64_t seed = 0;
};

/// Returns one human-readable message per violated invariant; empty means
/// the scenario is well-formed.  Pure: never mutates, never throws.
std::vector<std::string> validate_scenario(const Scenario& sc);

std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

/// File I/O wrappers; throw std::runtime_error on unreadable/unwritable
/// paths or malformed content.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

const char* to_string(ChargeType t);
const char* to_string(Network n);

}  // namespace smevca
