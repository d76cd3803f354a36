// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "smevca/matching.hpp"

namespace smevca {

/// Knobs for the synthetic-city scenario generator.  Defaults reproduce
/// the standard 2 mi x 2 mi downtown grid with 30 charging points.
struct GeneratorParams {
  int blocks_per_side = 16;
  double block_length_mi = 0.125;
  int cp_in_fast = 5;
  int cp_in_regular = 10;
  int cp_partner_fast = 5;
  int cp_partner_regular = 10;
  double speed_mph = 30.0;
  double target_fraction = 0.8;
  double battery_full_kwh = 60.0;
  double residual_min_kwh = 10.0;
  double residual_max_kwh = 37.0;
  double fast_quota_min_kwh = 0.0;
  double fast_quota_max_kwh = 60.0;
  double sla_wait_min_min = 5.0;
  double sla_wait_max_min = 25.0;
  double mileage_min = 3.0;
  double mileage_max = 4.0;
  double reception_kwh_per_min = 2.0;
  double rate_fast_kwh_per_min = 2.0;
  double rate_regular_kwh_per_min = 1.0;
  double time_quantum_s = 1.0;
  double free_after_all_s = 0.0;          // applied to every CP
  std::map<int, double> free_after_s;     // per-CP overrides, by CP id
};

/// One experiment = cartesian sweep of (ev_count, quota, seed, strategy).
struct ExperimentConfig {
  std::vector<int> ev_counts = {10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::vector<int> quotas = {2};
  std::vector<std::uint64_t> seeds;        // default: 1..30
  std::vector<Strategy> strategies = {Strategy::pcd, Strategy::pcg,
                                      Strategy::random_elim};
  GeneratorParams params;
  std::string output_dir;
  bool timing = false;  // off => exec_time_s written as 0 (deterministic CSV)

  ExperimentConfig();
};

/// One CSV row per (strategy, seed, ev_count, quota) run.
struct MetricsRow {
  std::string strategy;
  std::uint64_t seed = 0;
  int ev_count = 0;
  int quota = 0;
  int assigned_in_fast = 0;
  int assigned_in_reg = 0;
  int assigned_par_fast = 0;
  int assigned_par_reg = 0;
  double total_kwh = 0.0;
  double in_network_kwh = 0.0;
  int sla_missed = 0;
  int unserved = 0;          // EVs with no CP at termination
  double exec_time_s = 0.0;  // matching only; 0 unless timing enabled
  std::int64_t proposals_sent = 0;
};

/// CP-side utilization: EVs served and energy delivered per CP, all CPs
/// listed (zeros retained), ordered by CP id.
struct DistributionRow {
  int cp_id = 0;
  std::string cp_class;  // "in_fast" | "in_reg" | "par_fast" | "par_reg"
  int evs_assigned = 0;
  double kwh_delivered = 0.0;
};

/// Draw order is fixed (CPs first, then per-EV attributes) so the
/// infrastructure for a given seed is identical across ev_count values.
Scenario generate_scenario(int ev_count, int quota, std::uint64_t seed,
                           const GeneratorParams& params = {});

/// Everything a single (scenario, strategy) run produces.
struct RunResult {
  MatchState state;
  Schedule schedule;
  ConstraintReport report;
  MetricsRow row;
};

RunResult run_single(const Scenario& sc, Strategy strategy, bool timing);

/// Runs the full sweep.  When cfg.output_dir is nonempty, writes
/// metrics.csv, summary.csv and run_metadata.json there.  Honors the
/// SMEVCA_THREADS environment variable for the worker pool size.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg);

std::vector<DistributionRow> distribution_report(const MatchState& state,
                                                 const Scenario& sc);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string summary_csv(const std::vector<MetricsRow>& rows);

/// key = value config file parser ('#' comments; lists "a,b,c"; ranges
/// "lo..hi"; booleans true/false).  Throws std::runtime_error on unknown
/// keys or unparsable values.
ExperimentConfig load_config(const std::string& path);

/// Seed for a strategy's private RNG stream, derived from the scenario
/// seed so runs stay reproducible per (scenario, strategy).
std::uint64_t strategy_stream_seed(std::uint64_t scenario_seed, Strategy s);

}  // namespace smevca
