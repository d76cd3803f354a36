// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "smevca/domain.hpp"
#include "smevca/kinematics.hpp"

namespace smevca {

/// Strict preference order of one EV over charging points, most preferred
/// first, plus the edge estimates backing each ranked entry.
struct PreferenceProfile {
  int ev_id = 0;
  std::vector<int> ranked_cps;            // CP ids, best first
  std::map<int, EdgeEstimate> estimates;  // keyed by CP id, ranked only
};

/// Manhattan detour in miles between an EV and a CP on the grid.
double detour_distance(const Subscriber& ev, const ChargePoint& cp,
                       const GridSpec& grid);

/// Ranks the CPs of one class (same charge type and network) for `ev`:
/// keeps only reachable CPs whose required charge is positive and, for
/// fast CPs, affordable within the EV's fast-charge allowance; orders by
/// ascending detour, ties by ascending CP id.  When `estimates` is given,
/// the surviving edges are recorded there.
std::vector<int> rank_category(const std::vector<const ChargePoint*>& cps,
                               const Subscriber& ev,
                               const Scenario& sc,
                               std::map<int, EdgeEstimate>* estimates);

/// Builds one profile per subscriber (same order as sc.subscribers).
/// Categories are concatenated in fixed precedence: in-network fast,
/// in-network regular, partner fast, partner regular.
std::vector<PreferenceProfile> build_preferences(const Scenario& sc);

/// One JSON object per line per EV, for debugging and diffing.
void dump_profiles_jsonl(const std::vector<PreferenceProfile>& profiles,
                         std::ostream& out);

}  // namespace smevca
