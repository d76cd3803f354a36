// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "smevca/coalition.hpp"
#include "smevca/preferences.hpp"

namespace smevca {

/// Outcome of the deferred-acceptance rounds.  All containers are indexed
/// by EV id / CP id (ids are validated to be dense ordinals 0..n-1).
struct MatchState {
  std::vector<std::optional<int>> mu_ev;   // per EV: matched CP id
  std::vector<std::vector<int>> mu_cp;     // per CP: EV ids in serving order
  std::vector<std::size_t> cursors;        // per EV: next rank to propose to
  int rounds = 0;
  std::int64_t proposals_sent = 0;
};

struct ScheduleEntry {
  int ev_id = 0;
  int cp_id = 0;
  double depart_s = 0.0;    // batch time (all EVs set out together)
  double arrive_s = 0.0;    // depart + travel
  double start_s = 0.0;     // when charging begins
  double complete_s = 0.0;  // start + charging duration
  double wait_s = 0.0;      // start - arrive
};

/// Per-CP serialization of the final waiting lists, one entry per matched
/// EV, ordered by CP id then serving position.
struct Schedule {
  std::vector<ScheduleEntry> entries;
};

struct ConstraintReport {
  bool uniqueness_ok = true;        // no EV matched twice
  bool capacity_ok = true;          // every CP within quota
  std::vector<int> sla_violations;  // EV ids whose service window is exceeded
};

/// Delivered energy split by network side; the in-network share is the
/// platform's objective.
struct ChargeSplit {
  double in_network_kwh = 0.0;
  double partner_kwh = 0.0;
  double total_kwh() const { return in_network_kwh + partner_kwh; }
};

/// Runs synchronous proposal/selection rounds until no unmatched EV has a
/// CP left to try.  `rng` is consumed only by the random strategy.
/// `observer`, when set, is invoked after every completed round.
/// Throws std::invalid_argument on malformed profiles (unknown or
/// duplicated CP ids, profile list not aligned with subscribers).
MatchState run_matching(
    const Scenario& sc, const std::vector<PreferenceProfile>& profiles,
    Strategy strategy, SplitMix64& rng,
    const std::function<void(const MatchState&)>& observer = {});

/// For each CP, serves its waiting list in order: the first EV starts at
/// max(its arrival, the CP's free_after); each later EV starts when the
/// previous completes, but never before its own arrival.
Schedule build_schedule(const MatchState& state, const Scenario& sc);

/// Checks one-CP-per-EV, quota, and the per-member service window.
///
/// The window check runs in service time: a member's sla_window_s budgets
/// the total charging the CP performs for the queue up to and including
/// that member (the window formula already deducts travel and any busy
/// time the CP carries into the batch).  For each CP the charging
/// durations are summed in serving order, and a member is flagged when
/// the running sum exceeds its own window (tolerance 1e-6 s).  This is
/// exactly the feasibility invariant the coalition selectors maintain,
/// so it is queue-order independent; wall-clock arrival jitter between
/// queue members is visible in build_schedule's timestamps instead.
ConstraintReport verify_constraints(const MatchState& state,
                                    const Scenario& sc);

/// (ev_id, cp_id) pairs where the EV strictly prefers cp over its match
/// and cp's selection rule, offered its current list plus that EV, would
/// admit the EV.  Empty result == stable outcome for `strategy`.
std::vector<std::pair<int, int>> find_blocking_pairs(
    const MatchState& state, const Scenario& sc,
    const std::vector<PreferenceProfile>& profiles, Strategy strategy,
    SplitMix64& rng);

/// Total requested energy (sum of per-edge charge demands) implied by the
/// final matching; the in-network share is the solver's objective.
ChargeSplit objective_value(const MatchState& state, const Scenario& sc);

/// Energy actually transferred under the service model: each CP serves its
/// waiting list in order, and a member charges until full or until its own
/// service window runs out, whichever comes first, then departs.  Members
/// of window-respecting queues (always, for the window-aware strategies)
/// receive their full demand, so this equals objective_value for them; a
/// member that hits its window mid-charge (possible under the random
/// baseline) counts only the energy received before it leaves.
struct DeliveryReport {
  ChargeSplit split;
  std::vector<double> per_cp_kwh;  // delivered energy by serving CP
};
DeliveryReport delivered_energy(const MatchState& state, const Scenario& sc);

/// Assignment dump / reload for the CLI (JSON).  Reload preserves the
/// serving order in which matches are listed.
std::string assignment_to_json(const MatchState& state, const Schedule& schedule,
                               const Scenario& sc, Strategy strategy,
                               std::uint64_t rng_seed);
MatchState assignment_from_json(const std::string& text, const Scenario& sc,
                                Strategy* strategy_out = nullptr);

}  // namespace smevca
