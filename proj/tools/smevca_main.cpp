// SPDX-License-Identifier: Apache-2.0
//
// smevca — subscription EV / charging-point assignment simulator.
//
//   smevca scenario --evs 45 --quota 2 --seed 7 --out scenario.json
//   smevca solve    --scenario scenario.json --strategy pcd --out out.json
//   smevca verify   --scenario scenario.json --assignment out.json
//   smevca run      --config experiment.cfg

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "smevca/harness.hpp"

namespace {

using namespace smevca;

int cmd_scenario(int evs, int quota, std::uint64_t seed,
                 const std::string& out_path) {
  const Scenario sc = generate_scenario(evs, quota, seed);
  const auto problems = validate_scenario(sc);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "invalid scenario: " << p << "\n";
    return 2;
  }
  save_scenario(sc, out_path);
  std::cout << "wrote " << out_path << " (" << sc.subscribers.size()
            << " subscribers, " << sc.charge_points.size()
            << " charge points, quota " << quota << ", seed " << seed << ")\n";
  return 0;
}

int cmd_solve(const std::string& scenario_path, const std::string& strategy_name,
              const std::string& out_path) {
  const Scenario sc = load_scenario(scenario_path);
  const auto problems = validate_scenario(sc);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "invalid scenario: " << p << "\n";
    return 2;
  }
  const Strategy strategy = strategy_from_string(strategy_name);
  const RunResult run = run_single(sc, strategy, /*timing=*/false);

  const std::uint64_t rng_seed = strategy_stream_seed(sc.seed, strategy);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 2;
  }
  out << assignment_to_json(run.state, run.schedule, sc, strategy, rng_seed);

  const int matched = run.row.ev_count - run.row.unserved;
  std::printf("%s: matched %d/%d EVs, %.3f kWh total (%.3f in-network), %d SLA miss(es)\n",
              to_string(strategy), matched, run.row.ev_count, run.row.total_kwh,
              run.row.in_network_kwh, run.row.sla_missed);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_verify(const std::string& scenario_path,
               const std::string& assignment_path) {
  const Scenario sc = load_scenario(scenario_path);
  const auto problems = validate_scenario(sc);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "invalid scenario: " << p << "\n";
    return 2;
  }
  std::ifstream in(assignment_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << assignment_path << "\n";
    return 2;
  }
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  Strategy strategy = Strategy::pcd;
  const MatchState state = assignment_from_json(text, sc, &strategy);

  const std::vector<PreferenceProfile> profiles = build_preferences(sc);
  bool ok = true;

  // Individual rationality: every matched CP must appear in that EV's
  // preference list.
  for (std::size_t cp = 0; cp < state.mu_cp.size(); ++cp) {
    for (const int ev : state.mu_cp[cp]) {
      const auto& ranked = profiles[ev].ranked_cps;
      if (std::find(ranked.begin(), ranked.end(), static_cast<int>(cp)) ==
          ranked.end()) {
        std::cout << "rationality: ev " << ev << " matched to cp " << cp
                  << " absent from its preference list\n";
        ok = false;
      }
    }
  }

  const Schedule schedule = build_schedule(state, sc);
  const ConstraintReport rep = verify_constraints(state, sc);
  std::cout << "uniqueness: " << (rep.uniqueness_ok ? "ok" : "VIOLATED") << "\n";
  std::cout << "capacity: " << (rep.capacity_ok ? "ok" : "VIOLATED") << "\n";
  if (rep.sla_violations.empty()) {
    std::cout << "sla: ok\n";
  } else {
    std::cout << "sla: " << rep.sla_violations.size() << " violation(s):";
    for (const int ev : rep.sla_violations) std::cout << " ev" << ev;
    std::cout << "\n";
  }
  ok = ok && rep.uniqueness_ok && rep.capacity_ok && rep.sla_violations.empty();

  // Cross-check the dumped times against a fresh serialization.
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    std::size_t idx = 0;
    bool times_ok = true;
    for (const auto& m : j.at("matches")) {
      if (idx >= schedule.entries.size()) { times_ok = false; break; }
      const ScheduleEntry& e = schedule.entries[idx++];
      if (m.at("ev").get<int>() != e.ev_id ||
          m.at("cp").get<int>() != e.cp_id ||
          std::abs(m.at("arrive_s").get<double>() - e.arrive_s) > 1e-6 ||
          std::abs(m.at("start_s").get<double>() - e.start_s) > 1e-6 ||
          std::abs(m.at("complete_s").get<double>() - e.complete_s) > 1e-6) {
        times_ok = false;
      }
    }
    if (idx != schedule.entries.size()) times_ok = false;
    std::cout << "schedule times: " << (times_ok ? "consistent" : "INCONSISTENT")
              << "\n";
    ok = ok && times_ok;
  } catch (const std::exception& e) {
    std::cout << "schedule times: cannot check (" << e.what() << ")\n";
    ok = false;
  }

  if (strategy == Strategy::random_elim) {
    std::cout << "stability: skipped (random baseline makes no stability claim)\n";
  } else {
    SplitMix64 rng(strategy_stream_seed(sc.seed, strategy));
    const auto pairs = find_blocking_pairs(state, sc, profiles, strategy, rng);
    if (pairs.empty()) {
      std::cout << "stability (" << to_string(strategy) << "): ok\n";
    } else {
      std::cout << "stability (" << to_string(strategy) << "): "
                << pairs.size() << " blocking pair(s):";
      for (const auto& [ev, cp] : pairs) {
        std::cout << " (ev" << ev << ",cp" << cp << ")";
      }
      std::cout << "\n";
      ok = false;
    }
  }

  std::cout << "result: " << (ok ? "OK" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

int cmd_run(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const std::vector<MetricsRow> rows = run_experiment(cfg);
  std::cout << rows.size() << " runs completed";
  if (!cfg.output_dir.empty()) {
    std::cout << "; wrote metrics.csv, summary.csv, run_metadata.json to "
              << cfg.output_dir;
  }
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subscription EV to charging-point assignment simulator"};
  app.require_subcommand(1);

  auto* scenario = app.add_subcommand("scenario", "generate a scenario file");
  int evs = 45;
  int quota = 2;
  std::uint64_t seed = 1;
  std::string out_path;
  scenario->add_option("--evs", evs, "number of subscribers")->required();
  scenario->add_option("--quota", quota, "waiting-list size per CP")->required();
  scenario->add_option("--seed", seed, "generator seed")->required();
  scenario->add_option("--out", out_path, "output JSON path")->required();

  auto* solve = app.add_subcommand("solve", "assign EVs to CPs");
  std::string scenario_path;
  std::string strategy_name;
  std::string assignment_out;
  solve->add_option("--scenario", scenario_path, "scenario JSON")->required();
  solve->add_option("--strategy", strategy_name, "pcd | pcg | random")
      ->required();
  solve->add_option("--out", assignment_out, "assignment JSON path")->required();

  auto* verify = app.add_subcommand("verify", "check an assignment");
  std::string verify_scenario;
  std::string verify_assignment;
  verify->add_option("--scenario", verify_scenario, "scenario JSON")->required();
  verify->add_option("--assignment", verify_assignment, "assignment JSON")
      ->required();

  auto* run = app.add_subcommand("run", "run a sweep experiment");
  std::string config_path;
  run->add_option("--config", config_path, "experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (scenario->parsed()) return cmd_scenario(evs, quota, seed, out_path);
    if (solve->parsed()) return cmd_solve(scenario_path, strategy_name,
                                          assignment_out);
    if (verify->parsed()) return cmd_verify(verify_scenario, verify_assignment);
    if (run->parsed()) return cmd_run(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
