// SPDX-License-Identifier: Apache-2.0
#include "smevca/preferences.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <ostream>

#include <json.hpp>

namespace smevca {

double detour_distance(const Subscriber& ev, const ChargePoint& cp,
                       const GridSpec& grid) {
  const int blocks = std::abs(ev.position.x - cp.position.x) +
                     std::abs(ev.position.y - cp.position.y);
  return blocks * grid.block_length_mi;
}

std::vector<int> rank_category(const std::vector<const ChargePoint*>& cps,
                               const Subscriber& ev, const Scenario& sc,
                               std::map<int, EdgeEstimate>* estimates) {
  struct Entry {
    double detour;
    int cp_id;
  };
  std::vector<Entry> kept;
  std::map<int, EdgeEstimate> local;
  for (const ChargePoint* cp : cps) {
    const double detour = detour_distance(ev, *cp, sc.grid);
    const EdgeEstimate e = edge_estimate(ev, *cp, detour, sc);
    // Reachability: the EV must arrive with charge strictly left.
    if (!(ev.residual_charge_kwh - e.traversal_charge_kwh > 0)) {
      continue;
    }
    // Fast CPs draw on the subscription's fast-charge allowance; the
    // session must fit strictly under it.
    if (cp->charge_type == ChargeType::fast &&
        !(ev.fast_quota_kwh > e.required_charge_kwh)) {
      continue;
    }
    // Nothing to deliver => no reason to rank the CP.
    if (!(e.required_charge_kwh > 0)) {
      continue;
    }
    kept.push_back({detour, cp->id});
    local.emplace(cp->id, e);
  }
  std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
    if (a.detour != b.detour) return a.detour < b.detour;
    return a.cp_id < b.cp_id;
  });
  std::vector<int> out;
  out.reserve(kept.size());
  for (const Entry& e : kept) {
    out.push_back(e.cp_id);
    if (estimates) estimates->emplace(e.cp_id, local.at(e.cp_id));
  }
  return out;
}

std::vector<PreferenceProfile> build_preferences(const Scenario& sc) {
  // Category precedence: in-network before partner, fast before regular
  // inside each network.
  const std::array<std::pair<Network, ChargeType>, 4> order = {{
      {Network::in, ChargeType::fast},
      {Network::in, ChargeType::regular},
      {Network::partner, ChargeType::fast},
      {Network::partner, ChargeType::regular},
  }};
  std::array<std::vector<const ChargePoint*>, 4> classes;
  for (const ChargePoint& cp : sc.charge_points) {
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (cp.network == order[k].first && cp.charge_type == order[k].second) {
        classes[k].push_back(&cp);
      }
    }
  }
  std::vector<PreferenceProfile> profiles;
  profiles.reserve(sc.subscribers.size());
  for (const Subscriber& ev : sc.subscribers) {
    PreferenceProfile p;
    p.ev_id = ev.id;
    for (const auto& cls : classes) {
      const std::vector<int> ranked = rank_category(cls, ev, sc, &p.estimates);
      p.ranked_cps.insert(p.ranked_cps.end(), ranked.begin(), ranked.end());
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

void dump_profiles_jsonl(const std::vector<PreferenceProfile>& profiles,
                         std::ostream& out) {
  using nlohmann::json;
  for (const PreferenceProfile& p : profiles) {
    json j;
    j["ev_id"] = p.ev_id;
    j["ranked"] = json::array();
    for (const int cp_id : p.ranked_cps) {
      const EdgeEstimate& e = p.estimates.at(cp_id);
      j["ranked"].push_back({{"cp_id", cp_id},
                             {"detour_mi", e.detour_mi},
                             {"psi_kwh", e.required_charge_kwh},
                             {"window_s", e.sla_window_s}});
    }
    out << j.dump() << "\n";
  }
}

}  // namespace smevca
