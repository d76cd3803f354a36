// SPDX-License-Identifier: Apache-2.0
#include "smevca/coalition.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace smevca {
namespace {

/// Shared selection order: highest psi-per-window-second first, exact
/// ties broken by ascending EV id so runs are reproducible.
bool rate_before(const Candidate& a, const Candidate& b) {
  if (a.rate_key != b.rate_key) return a.rate_key > b.rate_key;
  return a.ev_id < b.ev_id;
}

double sum_psi(const std::vector<const Candidate*>& members) {
  double total = 0.0;
  for (const Candidate* c : members) total += c->psi_kwh;
  return total;
}

CoalitionResult to_result(const std::vector<const Candidate*>& members) {
  CoalitionResult res;
  res.ordered_assignment.reserve(members.size());
  for (const Candidate* c : members) res.ordered_assignment.push_back(c->ev_id);
  res.total_psi_kwh = sum_psi(members);
  return res;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::pcd: return "pcd";
    case Strategy::pcg: return "pcg";
    case Strategy::random_elim: return "random";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "pcd") return Strategy::pcd;
  if (name == "pcg") return Strategy::pcg;
  if (name == "random") return Strategy::random_elim;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

Candidate make_candidate(int ev_id, double psi_kwh, std::int64_t charge_s,
                         std::int64_t window_s) {
  Candidate c;
  c.ev_id = ev_id;
  c.psi_kwh = psi_kwh;
  c.charge_s = charge_s;
  c.window_s = window_s;
  c.rate_key = window_s > 0 ? psi_kwh / static_cast<double>(window_s) : 0.0;
  return c;
}

std::vector<Candidate> prune_candidates(
    const std::vector<Candidate>& waiting,
    const std::vector<Candidate>& proposers) {
  std::vector<Candidate> out = waiting;
  for (const Candidate& c : proposers) {
    if (c.window_s > 0) out.push_back(c);
  }
  return out;
}

bool prefix_feasible(const std::vector<Candidate>& order) {
  std::int64_t elapsed = 0;
  for (const Candidate& c : order) {
    elapsed += c.charge_s;
    if (elapsed > c.window_s) return false;
  }
  return true;
}

CoalitionResult pcd(const std::vector<Candidate>& candidates, int quota) {
  CoalitionResult res;
  if (quota <= 0 || candidates.empty()) return res;

  // Candidates whose charge exceeds their own window can never be served
  // (even alone) and cannot affect any choice; dropping them shrinks the
  // table.
  std::vector<Candidate> cands;
  cands.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    if (c.charge_s <= c.window_s) cands.push_back(c);
  }
  if (cands.empty()) return res;
  std::sort(cands.begin(), cands.end(), rate_before);
  const int n = static_cast<int>(cands.size());

  // Uncontended fast path: when everyone fits the quota and the rate order
  // meets every deadline, the full list is the unique value optimum (any
  // equal-value subset has fewer members and loses the tie).
  if (n <= quota) {
    bool all_fit = true;
    std::int64_t elapsed = 0;
    for (const Candidate& c : cands) {
      if (c.psi_kwh < 0.0) all_fit = false;
      elapsed += c.charge_s;
      if (elapsed > c.window_s) all_fit = false;
    }
    if (all_fit) {
      std::vector<const Candidate*> members;
      members.reserve(cands.size());
      for (const Candidate& c : cands) members.push_back(&c);
      return to_result(members);
    }
  }

  // Cap the member dimension by the most EVs that can all meet their
  // windows under ANY service order: the deadline-ordered greedy that
  // drops the longest service whenever a prefix overruns is optimal for
  // that relaxed problem, and the fixed service order can only do worse.
  // Large quotas then cost no more than the structurally attainable
  // coalition depth.
  int max_members = 0;
  {
    std::vector<std::pair<std::int64_t, std::int64_t>> jobs;  // window, charge
    jobs.reserve(cands.size());
    for (const Candidate& c : cands) jobs.emplace_back(c.window_s, c.charge_s);
    std::sort(jobs.begin(), jobs.end());
    std::priority_queue<std::int64_t> longest;
    std::int64_t elapsed = 0;
    for (const auto& [window, charge] : jobs) {
      longest.push(charge);
      elapsed += charge;
      if (elapsed > window) {
        elapsed -= longest.top();
        longest.pop();
      }
    }
    max_members = static_cast<int>(longest.size());
  }

  const int layers = std::min(quota, max_members);  // member-count dimension

  std::int64_t dmax = 0;
  for (const Candidate& c : cands) dmax = std::max(dmax, c.window_s);
  const std::size_t cols = static_cast<std::size_t>(dmax) + 1;
  const std::size_t plane = static_cast<std::size_t>(layers + 1) * cols;

  // Table over (member count, window column), updated candidate by
  // candidate.  A column l means "the last chosen EV completes l quanta
  // after service begins"; taking candidate k into an m-member coalition
  // at column l requires charge <= l (room for the prefix) and
  // l <= window (its own deadline).  The member count must be a table
  // dimension: a cheaper small coalition and a richer larger one can
  // share (column, value) ranking, and only the small one may leave
  // quota room for a later candidate.  -1 marks unreachable cells.
  //
  // Take flags for backtracking are kept per candidate over its own
  // column strip only ([charge, window] on each positive layer).
  std::vector<std::size_t> strip_off(static_cast<std::size_t>(n) + 1, 0);
  for (int k = 0; k < n; ++k) {
    const std::size_t width =
        static_cast<std::size_t>(cands[k].window_s - cands[k].charge_s) + 1;
    strip_off[k + 1] = strip_off[k] + width * static_cast<std::size_t>(layers);
  }
  std::vector<std::uint8_t> took(strip_off[static_cast<std::size_t>(n)], 0);

  std::vector<double> table(plane, -1.0);
  for (std::size_t l = 0; l < cols; ++l) table[l] = 0.0;  // empty coalition
  const auto at = [cols](std::size_t m, std::int64_t l) {
    return m * cols + static_cast<std::size_t>(l);
  };

  for (int k = 1; k <= n; ++k) {
    const Candidate& c = cands[k - 1];
    const std::size_t width =
        static_cast<std::size_t>(c.window_s - c.charge_s) + 1;
    std::uint8_t* row = &took[strip_off[k - 1]];
    // Layers descend so every read (the source one layer down and the
    // carried value being challenged) still sees the state from before
    // this candidate; each cell is written at most once, so cells
    // outside the strip carry implicitly and no table copy is needed.
    for (int m = layers; m >= 1; --m) {
      for (std::int64_t l = c.charge_s; l <= c.window_s; ++l) {
        const std::size_t cell = at(static_cast<std::size_t>(m), l);
        const std::size_t from =
            at(static_cast<std::size_t>(m - 1), l - c.charge_s);
        if (table[from] >= 0.0 && c.psi_kwh + table[from] >= table[cell]) {
          table[cell] = c.psi_kwh + table[from];
          row[static_cast<std::size_t>(m - 1) * width +
              static_cast<std::size_t>(l - c.charge_s)] = 1;
        }
      }
    }
  }

  // Values along the last row are not monotone in the column (a column
  // above a candidate's window reverts to the row before it), so scan
  // everything.  Ties prefer more members, then the smaller column.
  int best_m = 0;
  std::int64_t best_l = 0;
  for (int m = 0; m <= layers; ++m) {
    for (std::int64_t l = 0; l <= dmax; ++l) {
      const double v = table[at(static_cast<std::size_t>(m), l)];
      if (v < 0.0) continue;
      const double champion =
          table[at(static_cast<std::size_t>(best_m), best_l)];
      if (v > champion || (v == champion && m > best_m)) {
        best_m = m;
        best_l = l;
      }
    }
  }
  if (best_m == 0) return res;

  std::vector<const Candidate*> members;
  int m = best_m;
  std::int64_t l = best_l;
  for (int k = n; k >= 1 && m >= 1; --k) {
    const Candidate& c = cands[k - 1];
    if (l < c.charge_s || l > c.window_s) continue;
    const std::size_t width =
        static_cast<std::size_t>(c.window_s - c.charge_s) + 1;
    if (took[strip_off[k - 1] +
             static_cast<std::size_t>(m - 1) * width +
             static_cast<std::size_t>(l - c.charge_s)]) {
      members.push_back(&cands[k - 1]);
      l -= c.charge_s;
      --m;
    }
  }
  std::reverse(members.begin(), members.end());
  return to_result(members);
}

CoalitionResult pcg(const std::vector<Candidate>& candidates, int quota) {
  CoalitionResult res;
  if (quota <= 0 || candidates.empty()) return res;
  std::vector<Candidate> cands = candidates;
  std::sort(cands.begin(), cands.end(), rate_before);
  std::vector<const Candidate*> members;
  std::int64_t elapsed = 0;
  for (const Candidate& c : cands) {
    if (static_cast<int>(members.size()) < quota &&
        elapsed + c.charge_s <= c.window_s) {
      members.push_back(&c);
      elapsed += c.charge_s;
    }
  }
  return to_result(members);
}

CoalitionResult random_elimination(const std::vector<Candidate>& candidates,
                                   int quota, SplitMix64& rng) {
  CoalitionResult res;
  if (quota <= 0 || candidates.empty()) return res;
  std::vector<Candidate> pool = candidates;
  const std::size_t keep =
      std::min<std::size_t>(static_cast<std::size_t>(quota), pool.size());
  std::vector<const Candidate*> members;
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    members.push_back(&pool[i]);
  }
  return to_result(members);
}

namespace {

struct OracleBest {
  bool found = false;
  double total = 0.0;
  std::vector<int> evs;

  /// value first, then member count, then lexicographically smallest EV
  /// sequence — a deterministic total order on outcomes.
  void offer(double total_in, const std::vector<int>& evs_in) {
    if (!found || total_in > total ||
        (total_in == total &&
         (evs_in.size() > evs.size() ||
          (evs_in.size() == evs.size() && evs_in < evs)))) {
      found = true;
      total = total_in;
      evs = evs_in;
    }
  }
};

void sorted_subsets(const std::vector<Candidate>& cands, int quota,
                    std::size_t idx, std::vector<int>& chosen,
                    std::int64_t elapsed, double total, OracleBest& best) {
  if (idx == cands.size()) {
    best.offer(total, chosen);
    return;
  }
  sorted_subsets(cands, quota, idx + 1, chosen, elapsed, total, best);
  const Candidate& c = cands[idx];
  if (static_cast<int>(chosen.size()) < quota &&
      elapsed + c.charge_s <= c.window_s) {
    chosen.push_back(c.ev_id);
    sorted_subsets(cands, quota, idx + 1, chosen, elapsed + c.charge_s,
                   total + c.psi_kwh, best);
    chosen.pop_back();
  }
}

}  // namespace

CoalitionResult oracle_sorted_order(const std::vector<Candidate>& candidates,
                                    int quota) {
  if (candidates.size() > 22) {
    throw std::invalid_argument(
        "oracle_sorted_order: instance too large to enumerate");
  }
  CoalitionResult res;
  if (quota <= 0 || candidates.empty()) return res;
  std::vector<Candidate> cands = candidates;
  std::sort(cands.begin(), cands.end(), rate_before);
  OracleBest best;
  std::vector<int> chosen;
  sorted_subsets(cands, quota, 0, chosen, 0, 0.0, best);
  res.ordered_assignment = best.evs;
  res.total_psi_kwh = best.total;
  return res;
}

CoalitionResult oracle_all_permutations(
    const std::vector<Candidate>& candidates, int quota) {
  if (candidates.size() > 8) {
    throw std::invalid_argument(
        "oracle_all_permutations: instance too large to enumerate");
  }
  CoalitionResult res;
  if (quota <= 0 || candidates.empty()) return res;
  const int n = static_cast<int>(candidates.size());
  OracleBest best;
  best.offer(0.0, {});
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int b = 0; b < n; ++b) {
      if (mask & (1u << b)) idx.push_back(b);
    }
    if (static_cast<int>(idx.size()) > quota) continue;
    std::sort(idx.begin(), idx.end());
    do {
      std::int64_t elapsed = 0;
      bool ok = true;
      double total = 0.0;
      std::vector<int> evs;
      for (const int b : idx) {
        elapsed += candidates[b].charge_s;
        if (elapsed > candidates[b].window_s) {
          ok = false;
          break;
        }
        total += candidates[b].psi_kwh;
        evs.push_back(candidates[b].ev_id);
      }
      if (ok) best.offer(total, evs);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  res.ordered_assignment = best.evs;
  res.total_psi_kwh = best.total;
  return res;
}

CoalitionResult select_coalition(Strategy strategy,
                                 const std::vector<Candidate>& waiting,
                                 const std::vector<Candidate>& proposers,
                                 int quota, SplitMix64& rng) {
  switch (strategy) {
    case Strategy::pcd:
      return pcd(prune_candidates(waiting, proposers), quota);
    case Strategy::pcg:
      return pcg(prune_candidates(waiting, proposers), quota);
    case Strategy::random_elim: {
      std::vector<Candidate> pool = waiting;
      pool.insert(pool.end(), proposers.begin(), proposers.end());
      return random_elimination(pool, quota, rng);
    }
  }
  return {};
}

}  // namespace smevca
