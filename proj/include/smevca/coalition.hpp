// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "smevca/rng.hpp"

namespace smevca {

/// One EV competing for a slot at a CP, as seen by that CP's selection
/// rule.  charge_s and window_s are integer counts of time quanta so the
/// selection table can index by them directly.
struct Candidate {
  int ev_id = 0;
  double psi_kwh = 0.0;      // energy the CP would deliver; > 0 once pruned
  std::int64_t charge_s = 0; // charging duration, in quanta
  std::int64_t window_s = 0; // deadline (complete - arrive), in quanta
  double rate_key = 0.0;     // psi_kwh / window_s; selection priority

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// A CP's chosen waiting list.  ordered_assignment is the serving order;
/// total_psi_kwh is the left-to-right sum of the members' psi.
struct CoalitionResult {
  std::vector<int> ordered_assignment;  // EV ids, first served first
  double total_psi_kwh = 0.0;
};

enum class Strategy { pcd, pcg, random_elim };

const char* to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

/// Fills rate_key (psi / window, or 0 for an empty window) from the other
/// fields.
Candidate make_candidate(int ev_id, double psi_kwh, std::int64_t charge_s,
                         std::int64_t window_s);

/// Current waiting list plus the round's proposers, minus proposers whose
/// deadline window is empty (they could never finish in time).  Waiting
/// members are kept unconditionally: they were admitted by an earlier
/// selection and stay eligible for reselection.
std::vector<Candidate> prune_candidates(
    const std::vector<Candidate>& waiting,
    const std::vector<Candidate>& proposers);

/// Deadline-aware optimal selection: maximizes total psi over orderings
/// that serve every chosen EV within its window and fit the quota.
/// Candidates are considered in descending rate_key (ties: ascending EV
/// id); the result lists the chosen EVs in that same order, which is also
/// the serving order.
CoalitionResult pcd(const std::vector<Candidate>& candidates, int quota);

/// Greedy variant: walk candidates in descending rate_key and append each
/// one whose deadline still holds behind the tentative queue.
CoalitionResult pcg(const std::vector<Candidate>& candidates, int quota);

/// Baseline: uniformly random subset of min(quota, n) candidates, in draw
/// order, ignoring deadlines.  Candidates must be passed unpruned.
CoalitionResult random_elimination(const std::vector<Candidate>& candidates,
                                   int quota, SplitMix64& rng);

/// Reference optimum by exhaustive subset enumeration, serving order fixed
/// to descending rate_key.  Throws std::invalid_argument when the instance
/// is too large to enumerate.
CoalitionResult oracle_sorted_order(const std::vector<Candidate>& candidates,
                                    int quota);

/// Reference optimum over every subset *and* every serving order.  Throws
/// std::invalid_argument when the instance is too large.
CoalitionResult oracle_all_permutations(
    const std::vector<Candidate>& candidates, int quota);

/// True when serving `order` front to back meets every member's window:
/// for each position k, sum of charge_s of entries 0..k <= window_s of
/// entry k.
bool prefix_feasible(const std::vector<Candidate>& order);

/// Dispatch: pcd/pcg prune first; random_elim uses the raw union.  `rng`
/// is only consumed by random_elim.
CoalitionResult select_coalition(Strategy strategy,
                                 const std::vector<Candidate>& waiting,
                                 const std::vector<Candidate>& proposers,
                                 int quota, SplitMix64& rng);

}  // namespace smevca
