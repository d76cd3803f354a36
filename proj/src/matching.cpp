// SPDX-License-Identifier: Apache-2.0
#include "smevca/matching.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace smevca {
namespace {

/// The matcher addresses subscribers and CPs by their ids, so ids must be
/// dense ordinals (position == id).  The scenario schema's generator
/// guarantees this; hand-written files must follow it too.
void require_dense_ids(const Scenario& sc) {
  for (std::size_t i = 0; i < sc.subscribers.size(); ++i) {
    if (sc.subscribers[i].id != static_cast<int>(i)) {
      throw std::invalid_argument(
          "subscriber ids must be dense ordinals 0..n-1");
    }
  }
  for (std::size_t j = 0; j < sc.charge_points.size(); ++j) {
    if (sc.charge_points[j].id != static_cast<int>(j)) {
      throw std::invalid_argument(
          "charge point ids must be dense ordinals 0..n-1");
    }
  }
}

void require_aligned_profiles(const Scenario& sc,
                              const std::vector<PreferenceProfile>& profiles) {
  if (profiles.size() != sc.subscribers.size()) {
    throw std::invalid_argument("one preference profile per subscriber");
  }
  const int n_cp = static_cast<int>(sc.charge_points.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].ev_id != sc.subscribers[i].id) {
      throw std::invalid_argument("profiles out of order with subscribers");
    }
    std::set<int> seen;
    for (const int cp : profiles[i].ranked_cps) {
      if (cp < 0 || cp >= n_cp) {
        throw std::invalid_argument("profile ranks unknown charge point");
      }
      if (!seen.insert(cp).second) {
        throw std::invalid_argument("profile ranks a charge point twice");
      }
      if (profiles[i].estimates.find(cp) == profiles[i].estimates.end()) {
        throw std::invalid_argument("profile missing estimate for ranked CP");
      }
    }
  }
}

std::int64_t quanta(double seconds, double quantum_s) {
  return std::llround(seconds / quantum_s);
}

Candidate edge_candidate(const Subscriber& ev, const EdgeEstimate& e,
                         double quantum_s) {
  return make_candidate(ev.id, e.required_charge_kwh,
                        quanta(e.charging_duration_s, quantum_s),
                        quanta(e.sla_window_s, quantum_s));
}

}  // namespace

MatchState run_matching(
    const Scenario& sc, const std::vector<PreferenceProfile>& profiles,
    Strategy strategy, SplitMix64& rng,
    const std::function<void(const MatchState&)>& observer) {
  require_dense_ids(sc);
  require_aligned_profiles(sc, profiles);

  const int n_ev = static_cast<int>(sc.subscribers.size());
  const int n_cp = static_cast<int>(sc.charge_points.size());

  MatchState st;
  st.mu_ev.assign(n_ev, std::nullopt);
  st.mu_cp.assign(n_cp, {});
  st.cursors.assign(n_ev, 0);

  const auto candidate_for = [&](int ev, int cp) {
    return edge_candidate(sc.subscribers[ev], profiles[ev].estimates.at(cp),
                          sc.time_quantum_s);
  };

  std::vector<std::vector<int>> proposers(n_cp);
  for (;;) {
    // Proposal phase: every unmatched EV tries its next-ranked CP.  All
    // proposals of a round land before any CP reselects.
    bool any = false;
    for (int ev = 0; ev < n_ev; ++ev) {
      if (st.mu_ev[ev].has_value()) continue;
      const auto& ranked = profiles[ev].ranked_cps;
      if (st.cursors[ev] >= ranked.size()) continue;
      const int cp = ranked[st.cursors[ev]++];
      proposers[cp].push_back(ev);
      ++st.proposals_sent;
      any = true;
    }
    if (!any) break;

    // Selection phase: each CP that heard proposals rebuilds its waiting
    // list from scratch over current members + proposers.  Evicted EVs
    // resume from their cursor next round.
    for (int cp = 0; cp < n_cp; ++cp) {
      if (proposers[cp].empty()) continue;
      std::vector<Candidate> waiting;
      waiting.reserve(st.mu_cp[cp].size());
      for (const int ev : st.mu_cp[cp]) waiting.push_back(candidate_for(ev, cp));
      std::vector<Candidate> fresh;
      fresh.reserve(proposers[cp].size());
      for (const int ev : proposers[cp]) fresh.push_back(candidate_for(ev, cp));

      const CoalitionResult chosen = select_coalition(
          strategy, waiting, fresh, sc.charge_points[cp].quota, rng);

      const auto kept = [&](int ev) {
        return std::find(chosen.ordered_assignment.begin(),
                         chosen.ordered_assignment.end(),
                         ev) != chosen.ordered_assignment.end();
      };
      for (const int ev : st.mu_cp[cp]) {
        if (!kept(ev)) st.mu_ev[ev] = std::nullopt;
      }
      for (const int ev : proposers[cp]) {
        if (kept(ev)) st.mu_ev[ev] = cp;
      }
      st.mu_cp[cp] = chosen.ordered_assignment;
      proposers[cp].clear();
    }
    ++st.rounds;
    if (observer) observer(st);
  }
  return st;
}

Schedule build_schedule(const MatchState& state, const Scenario& sc) {
  Schedule out;
  for (std::size_t cp_id = 0; cp_id < state.mu_cp.size(); ++cp_id) {
    const ChargePoint& cp = sc.charge_points[cp_id];
    // free_after_s is measured from batch time, schedule times are absolute.
    double prev_complete = sc.batch_time_s + cp.free_after_s;
    for (const int ev_id : state.mu_cp[cp_id]) {
      const Subscriber& ev = sc.subscribers[ev_id];
      const EdgeEstimate e =
          edge_estimate(ev, cp, detour_distance(ev, cp, sc.grid), sc);
      ScheduleEntry entry;
      entry.ev_id = ev_id;
      entry.cp_id = static_cast<int>(cp_id);
      entry.depart_s = sc.batch_time_s;
      entry.arrive_s = sc.batch_time_s + e.travel_time_s;
      entry.start_s = std::max(prev_complete, entry.arrive_s);
      entry.complete_s = entry.start_s + e.charging_duration_s;
      entry.wait_s = entry.start_s - entry.arrive_s;
      prev_complete = entry.complete_s;
      out.entries.push_back(entry);
    }
  }
  return out;
}

ConstraintReport verify_constraints(const MatchState& state,
                                    const Scenario& sc) {
  ConstraintReport rep;

  std::vector<int> times_matched(sc.subscribers.size(), 0);
  for (std::size_t cp = 0; cp < state.mu_cp.size(); ++cp) {
    for (const int ev : state.mu_cp[cp]) {
      if (ev < 0 || ev >= static_cast<int>(times_matched.size())) {
        rep.uniqueness_ok = false;
        continue;
      }
      ++times_matched[ev];
      // The two sides of the matching must agree.
      if (!state.mu_ev[ev].has_value() ||
          *state.mu_ev[ev] != static_cast<int>(cp)) {
        rep.uniqueness_ok = false;
      }
    }
    if (state.mu_cp[cp].size() >
        static_cast<std::size_t>(sc.charge_points[cp].quota)) {
      rep.capacity_ok = false;
    }
  }
  for (const int count : times_matched) {
    if (count > 1) rep.uniqueness_ok = false;
  }

  // Service-time window check: per CP, each member's window must cover the
  // cumulative charging performed for the queue up to and including itself.
  for (std::size_t cp_id = 0; cp_id < state.mu_cp.size(); ++cp_id) {
    const ChargePoint& cp = sc.charge_points[cp_id];
    double served_s = 0.0;
    for (const int ev_id : state.mu_cp[cp_id]) {
      const Subscriber& ev = sc.subscribers[ev_id];
      const EdgeEstimate e =
          edge_estimate(ev, cp, detour_distance(ev, cp, sc.grid), sc);
      served_s += e.charging_duration_s;
      if (served_s > e.sla_window_s + 1e-6) {
        rep.sla_violations.push_back(ev_id);
      }
    }
  }
  std::sort(rep.sla_violations.begin(), rep.sla_violations.end());
  return rep;
}

std::vector<std::pair<int, int>> find_blocking_pairs(
    const MatchState& state, const Scenario& sc,
    const std::vector<PreferenceProfile>& profiles, Strategy strategy,
    SplitMix64& rng) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t ev = 0; ev < profiles.size(); ++ev) {
    const auto& ranked = profiles[ev].ranked_cps;
    // Ranks strictly before the current match (all of them if unmatched).
    std::size_t limit = ranked.size();
    if (state.mu_ev[ev].has_value()) {
      const auto it =
          std::find(ranked.begin(), ranked.end(), *state.mu_ev[ev]);
      limit = static_cast<std::size_t>(it - ranked.begin());
    }
    for (std::size_t r = 0; r < limit; ++r) {
      const int cp = ranked[r];
      std::vector<Candidate> waiting;
      for (const int member : state.mu_cp[cp]) {
        waiting.push_back(edge_candidate(sc.subscribers[member],
                                         profiles[member].estimates.at(cp),
                                         sc.time_quantum_s));
      }
      const std::vector<Candidate> joiner = {
          edge_candidate(sc.subscribers[ev], profiles[ev].estimates.at(cp),
                         sc.time_quantum_s)};
      const CoalitionResult would = select_coalition(
          strategy, waiting, joiner, sc.charge_points[cp].quota, rng);
      const bool admitted =
          std::find(would.ordered_assignment.begin(),
                    would.ordered_assignment.end(),
                    static_cast<int>(ev)) != would.ordered_assignment.end();
      if (admitted) {
        pairs.emplace_back(static_cast<int>(ev), cp);
      }
    }
  }
  return pairs;
}

ChargeSplit objective_value(const MatchState& state, const Scenario& sc) {
  ChargeSplit split;
  for (std::size_t cp_id = 0; cp_id < state.mu_cp.size(); ++cp_id) {
    const ChargePoint& cp = sc.charge_points[cp_id];
    for (const int ev_id : state.mu_cp[cp_id]) {
      const Subscriber& ev = sc.subscribers[ev_id];
      const EdgeEstimate e =
          edge_estimate(ev, cp, detour_distance(ev, cp, sc.grid), sc);
      if (cp.network == Network::in) {
        split.in_network_kwh += e.required_charge_kwh;
      } else {
        split.partner_kwh += e.required_charge_kwh;
      }
    }
  }
  return split;
}

DeliveryReport delivered_energy(const MatchState& state, const Scenario& sc) {
  DeliveryReport rep;
  rep.per_cp_kwh.assign(state.mu_cp.size(), 0.0);
  for (std::size_t cp_id = 0; cp_id < state.mu_cp.size(); ++cp_id) {
    const ChargePoint& cp = sc.charge_points[cp_id];
    double chain_s = 0.0;  // service time spent on this queue so far
    for (const int ev_id : state.mu_cp[cp_id]) {
      const Subscriber& ev = sc.subscribers[ev_id];
      const EdgeEstimate e =
          edge_estimate(ev, cp, detour_distance(ev, cp, sc.grid), sc);
      const double rate = std::min(cp.rate_kw, ev.reception_rate_kw);
      const double allowed_s =
          std::clamp(e.sla_window_s - chain_s, 0.0, e.charging_duration_s);
      const double delivered =
          std::min(e.required_charge_kwh, rate * allowed_s);
      rep.per_cp_kwh[cp_id] += delivered;
      if (cp.network == Network::in) {
        rep.split.in_network_kwh += delivered;
      } else {
        rep.split.partner_kwh += delivered;
      }
      chain_s += allowed_s;
    }
  }
  return rep;
}

std::string assignment_to_json(const MatchState& state,
                               const Schedule& schedule, const Scenario& sc,
                               Strategy strategy, std::uint64_t rng_seed) {
  using nlohmann::json;
  json j;
  j["strategy"] = to_string(strategy);
  j["seed"] = rng_seed;
  j["matches"] = json::array();
  for (const ScheduleEntry& entry : schedule.entries) {
    const Subscriber& ev = sc.subscribers[entry.ev_id];
    const ChargePoint& cp = sc.charge_points[entry.cp_id];
    const EdgeEstimate e =
        edge_estimate(ev, cp, detour_distance(ev, cp, sc.grid), sc);
    j["matches"].push_back({{"arrive_s", entry.arrive_s},
                            {"complete_s", entry.complete_s},
                            {"cp", entry.cp_id},
                            {"ev", entry.ev_id},
                            {"psi_kwh", e.required_charge_kwh},
                            {"start_s", entry.start_s}});
  }
  j["unmatched"] = json::array();
  for (std::size_t ev = 0; ev < state.mu_ev.size(); ++ev) {
    if (!state.mu_ev[ev].has_value()) {
      j["unmatched"].push_back(static_cast<int>(ev));
    }
  }
  return j.dump(2) + "\n";
}

MatchState assignment_from_json(const std::string& text, const Scenario& sc,
                                Strategy* strategy_out) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("assignment JSON parse error: ") +
                             e.what());
  }
  MatchState st;
  st.mu_ev.assign(sc.subscribers.size(), std::nullopt);
  st.mu_cp.assign(sc.charge_points.size(), {});
  st.cursors.assign(sc.subscribers.size(), 0);
  try {
    if (strategy_out) {
      *strategy_out = strategy_from_string(j.at("strategy").get<std::string>());
    }
    for (const json& m : j.at("matches")) {
      const int ev = m.at("ev").get<int>();
      const int cp = m.at("cp").get<int>();
      if (ev < 0 || ev >= static_cast<int>(sc.subscribers.size()) ||
          cp < 0 || cp >= static_cast<int>(sc.charge_points.size())) {
        throw std::runtime_error("assignment references unknown ev or cp id");
      }
      // Order within one CP's matches is the serving order.
      st.mu_cp[cp].push_back(ev);
      st.mu_ev[ev] = cp;
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("assignment JSON missing field: ") +
                             e.what());
  }
  return st;
}

}  // namespace smevca
