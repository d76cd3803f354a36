// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace smevca {

// Canonical internal units: seconds, kWh, miles.  Everything user-facing
// (mph, kWh/min, minutes) is converted at the boundary with these helpers.

constexpr double mph_to_mi_per_s(double mph) { return mph / 3600.0; }
constexpr double mi_per_s_to_mph(double v) { return v * 3600.0; }

constexpr double kwh_per_min_to_kw_s(double r) { return r / 60.0; }
constexpr double kw_s_to_kwh_per_min(double r) { return r * 60.0; }

constexpr double minutes_to_seconds(double m) { return m * 60.0; }
constexpr double seconds_to_minutes(double s) { return s / 60.0; }

/// Smallest multiple of `quantum` that is >= `value`, with a small
/// tolerance so that values a few ulp above an exact multiple do not get
/// bumped a full quantum (e.g. 600.0000000000001 -> 600, 847.5 -> 848).
inline double ceil_to_quantum(double value, double quantum) {
  const double q = std::ceil(value / quantum - 1e-9);
  return (q <= 0.0 ? 0.0 : q) * quantum;
}

}  // namespace smevca
