// SPDX-License-Identifier: Apache-2.0
#include "smevca/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "smevca/units.hpp"

namespace smevca {
namespace {

void append_cps(Scenario& sc, SplitMix64& rng, int count, Network net,
                ChargeType type, double rate_kw, int quota) {
  for (int k = 0; k < count; ++k) {
    ChargePoint cp;
    cp.id = static_cast<int>(sc.charge_points.size());
    cp.position.x = static_cast<int>(rng.uniform_int(0, sc.grid.blocks_per_side));
    cp.position.y = static_cast<int>(rng.uniform_int(0, sc.grid.blocks_per_side));
    cp.network = net;
    cp.charge_type = type;
    cp.rate_kw = rate_kw;
    cp.quota = quota;
    sc.charge_points.push_back(cp);
  }
}

std::string format_row(const MetricsRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%llu,%d,%d,%d,%d,%d,%d,%.6f,%.6f,%d,%d,%.6f,%lld\n",
                r.strategy.c_str(),
                static_cast<unsigned long long>(r.seed), r.ev_count, r.quota,
                r.assigned_in_fast, r.assigned_in_reg, r.assigned_par_fast,
                r.assigned_par_reg, r.total_kwh, r.in_network_kwh,
                r.sla_missed, r.unserved, r.exec_time_s,
                static_cast<long long>(r.proposals_sent));
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

template <typename Int>
std::vector<Int> parse_int_list(const std::string& value,
                                const std::string& key) {
  std::vector<Int> out;
  for (const std::string& item : split(value, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    try {
      if (dots != std::string::npos) {
        const long long lo = std::stoll(item.substr(0, dots));
        const long long hi = std::stoll(item.substr(dots + 2));
        if (hi < lo) {
          throw std::runtime_error("range is empty");
        }
        for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<Int>(v));
      } else {
        out.push_back(static_cast<Int>(std::stoll(item)));
      }
    } catch (const std::exception&) {
      throw std::runtime_error("config: cannot parse '" + item + "' for " +
                               key);
    }
  }
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::runtime_error("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: cannot parse '" + value + "' for " + key);
  }
}

int parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::runtime_error("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: cannot parse '" + value + "' for " + key);
  }
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw std::runtime_error("config: expected true/false for " + key);
}

unsigned worker_count(std::size_t cells) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("SMEVCA_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed < 1) {
      throw std::runtime_error("SMEVCA_THREADS must be a positive integer");
    }
    n = static_cast<unsigned>(parsed);
  }
  if (cells > 0 && n > cells) n = static_cast<unsigned>(cells);
  if (n == 0) n = 1;
  return n;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (std::uint64_t s = 1; s <= 30; ++s) seeds.push_back(s);
}

std::uint64_t strategy_stream_seed(std::uint64_t scenario_seed, Strategy s) {
  // Fixed per-strategy salts keep the random baseline's draws independent
  // of the scenario stream while staying reproducible.
  switch (s) {
    case Strategy::pcd: return scenario_seed ^ 0xd1b54a32d192ed03ULL;
    case Strategy::pcg: return scenario_seed ^ 0x8cb92ba72f3d8dd7ULL;
    case Strategy::random_elim: return scenario_seed ^ 0xda942042e4dd58b5ULL;
  }
  return scenario_seed;
}

Scenario generate_scenario(int ev_count, int quota, std::uint64_t seed,
                           const GeneratorParams& p) {
  if (ev_count < 0) throw std::invalid_argument("ev_count must be >= 0");
  if (quota < 1) throw std::invalid_argument("quota must be >= 1");

  Scenario sc;
  sc.seed = seed;
  sc.grid.blocks_per_side = p.blocks_per_side;
  sc.grid.block_length_mi = p.block_length_mi;
  sc.battery_full_kwh = p.battery_full_kwh;
  sc.time_quantum_s = p.time_quantum_s;
  sc.batch_time_s = 0.0;

  SplitMix64 rng(seed);

  // CPs are drawn before EVs so that, for one seed, the infrastructure is
  // identical across every ev_count in a sweep.
  append_cps(sc, rng, p.cp_in_fast, Network::in, ChargeType::fast,
             kwh_per_min_to_kw_s(p.rate_fast_kwh_per_min), quota);
  append_cps(sc, rng, p.cp_in_regular, Network::in, ChargeType::regular,
             kwh_per_min_to_kw_s(p.rate_regular_kwh_per_min), quota);
  append_cps(sc, rng, p.cp_partner_fast, Network::partner, ChargeType::fast,
             kwh_per_min_to_kw_s(p.rate_fast_kwh_per_min), quota);
  append_cps(sc, rng, p.cp_partner_regular, Network::partner,
             ChargeType::regular, kwh_per_min_to_kw_s(p.rate_regular_kwh_per_min),
             quota);
  for (auto& cp : sc.charge_points) cp.free_after_s = p.free_after_all_s;
  for (const auto& [cp_id, t_free] : p.free_after_s) {
    if (cp_id < 0 || cp_id >= static_cast<int>(sc.charge_points.size())) {
      throw std::invalid_argument("free_after override for unknown CP id");
    }
    sc.charge_points[cp_id].free_after_s = t_free;
  }

  for (int k = 0; k < ev_count; ++k) {
    Subscriber ev;
    ev.id = k;
    ev.position.x = static_cast<int>(rng.uniform_int(0, sc.grid.blocks_per_side));
    ev.position.y = static_cast<int>(rng.uniform_int(0, sc.grid.blocks_per_side));
    ev.residual_charge_kwh =
        rng.uniform_real(p.residual_min_kwh, p.residual_max_kwh);
    ev.fast_quota_kwh =
        rng.uniform_real(p.fast_quota_min_kwh, p.fast_quota_max_kwh);
    ev.sla_wait_s = minutes_to_seconds(
        rng.uniform_real(p.sla_wait_min_min, p.sla_wait_max_min));
    ev.mileage_mi_per_kwh = rng.uniform_real(p.mileage_min, p.mileage_max);
    ev.avg_speed_mps = mph_to_mi_per_s(p.speed_mph);
    ev.reception_rate_kw = kwh_per_min_to_kw_s(p.reception_kwh_per_min);
    ev.target_fraction = p.target_fraction;
    sc.subscribers.push_back(ev);
  }
  return sc;
}

RunResult run_single(const Scenario& sc, Strategy strategy, bool timing) {
  RunResult out;
  const std::vector<PreferenceProfile> profiles = build_preferences(sc);
  SplitMix64 rng(strategy_stream_seed(sc.seed, strategy));

  const auto t0 = std::chrono::steady_clock::now();
  out.state = run_matching(sc, profiles, strategy, rng);
  const auto t1 = std::chrono::steady_clock::now();

  out.schedule = build_schedule(out.state, sc);
  out.report = verify_constraints(out.state, sc);

  MetricsRow& row = out.row;
  row.strategy = to_string(strategy);
  row.seed = sc.seed;
  row.ev_count = static_cast<int>(sc.subscribers.size());
  row.quota = sc.charge_points.empty() ? 0 : sc.charge_points.front().quota;
  for (std::size_t cp_id = 0; cp_id < out.state.mu_cp.size(); ++cp_id) {
    const ChargePoint& cp = sc.charge_points[cp_id];
    const int here = static_cast<int>(out.state.mu_cp[cp_id].size());
    if (cp.network == Network::in) {
      (cp.charge_type == ChargeType::fast ? row.assigned_in_fast
                                          : row.assigned_in_reg) += here;
    } else {
      (cp.charge_type == ChargeType::fast ? row.assigned_par_fast
                                          : row.assigned_par_reg) += here;
    }
  }
  const ChargeSplit split = delivered_energy(out.state, sc).split;
  row.total_kwh = split.total_kwh();
  row.in_network_kwh = split.in_network_kwh;
  row.sla_missed = static_cast<int>(out.report.sla_violations.size());
  for (const auto& m : out.state.mu_ev) {
    if (!m.has_value()) ++row.unserved;
  }
  row.proposals_sent = out.state.proposals_sent;
  if (timing) {
    row.exec_time_s = std::chrono::duration<double>(t1 - t0).count();
  }
  return out;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg) {
  struct Cell {
    Strategy strategy;
    int ev_count;
    int quota;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const Strategy strategy : cfg.strategies) {
    for (const int ev_count : cfg.ev_counts) {
      for (const int quota : cfg.quotas) {
        for (const std::uint64_t seed : cfg.seeds) {
          cells.push_back({strategy, ev_count, quota, seed});
        }
      }
    }
  }

  std::vector<MetricsRow> rows(cells.size());
  const unsigned n_workers = worker_count(cells.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      const Scenario sc =
          generate_scenario(c.ev_count, c.quota, c.seed, cfg.params);
      rows[i] = run_single(sc, c.strategy, cfg.timing).row;
    }
  };
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const auto write = [&](const std::string& name, const std::string& body) {
      const fs::path path = fs::path(cfg.output_dir) / name;
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        throw std::runtime_error("cannot write " + path.string());
      }
      out << body;
      if (!out) throw std::runtime_error("write failed: " + path.string());
    };
    write("metrics.csv", metrics_csv(rows));
    write("summary.csv", summary_csv(rows));

    nlohmann::json meta;
    meta["rng"] = SplitMix64::kAlgorithm;
    meta["timing"] = cfg.timing;
    meta["workers"] = n_workers;
    meta["ev_counts"] = cfg.ev_counts;
    meta["quotas"] = cfg.quotas;
    meta["seeds"] = cfg.seeds;
    nlohmann::json strat = nlohmann::json::array();
    for (const Strategy s : cfg.strategies) strat.push_back(to_string(s));
    meta["strategies"] = strat;
    write("run_metadata.json", meta.dump(2) + "\n");
  }
  return rows;
}

std::vector<DistributionRow> distribution_report(const MatchState& state,
                                                 const Scenario& sc) {
  std::vector<DistributionRow> out;
  const DeliveryReport delivery = delivered_energy(state, sc);
  for (std::size_t cp_id = 0; cp_id < sc.charge_points.size(); ++cp_id) {
    const ChargePoint& cp = sc.charge_points[cp_id];
    DistributionRow row;
    row.cp_id = static_cast<int>(cp_id);
    if (cp.network == Network::in) {
      row.cp_class = cp.charge_type == ChargeType::fast ? "in_fast" : "in_reg";
    } else {
      row.cp_class =
          cp.charge_type == ChargeType::fast ? "par_fast" : "par_reg";
    }
    if (cp_id < state.mu_cp.size()) {
      row.evs_assigned = static_cast<int>(state.mu_cp[cp_id].size());
      row.kwh_delivered = delivery.per_cp_kwh[cp_id];
    }
    out.push_back(row);
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "strategy,seed,ev_count,quota,assigned_in_fast,assigned_in_reg,"
      "assigned_par_fast,assigned_par_reg,total_kwh,in_network_kwh,"
      "sla_missed,unserved,exec_time_s,proposals_sent\n";
  for (const MetricsRow& r : rows) out += format_row(r);
  return out;
}

std::string summary_csv(const std::vector<MetricsRow>& rows) {
  struct Group {
    std::string strategy;
    int ev_count = 0;
    int quota = 0;
    int n = 0;
    double total = 0, in_net = 0, sla = 0, unserved = 0, exec = 0, props = 0;
  };
  std::vector<Group> groups;  // first-appearance order
  for (const MetricsRow& r : rows) {
    Group* g = nullptr;
    for (Group& cand : groups) {
      if (cand.strategy == r.strategy && cand.ev_count == r.ev_count &&
          cand.quota == r.quota) {
        g = &cand;
        break;
      }
    }
    if (!g) {
      groups.push_back({r.strategy, r.ev_count, r.quota});
      g = &groups.back();
    }
    ++g->n;
    g->total += r.total_kwh;
    g->in_net += r.in_network_kwh;
    g->sla += r.sla_missed;
    g->unserved += r.unserved;
    g->exec += r.exec_time_s;
    g->props += static_cast<double>(r.proposals_sent);
  }
  std::string out =
      "strategy,ev_count,quota,seeds,mean_total_kwh,mean_in_network_kwh,"
      "mean_sla_missed,mean_unserved,mean_exec_time_s,mean_proposals_sent\n";
  for (const Group& g : groups) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  g.strategy.c_str(), g.ev_count, g.quota, g.n, g.total / g.n,
                  g.in_net / g.n, g.sla / g.n, g.unserved / g.n, g.exec / g.n,
                  g.props / g.n);
    out += buf;
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "ev_counts") {
      cfg.ev_counts = parse_int_list<int>(value, key);
    } else if (key == "quotas") {
      cfg.quotas = parse_int_list<int>(value, key);
    } else if (key == "seeds") {
      cfg.seeds = parse_int_list<std::uint64_t>(value, key);
    } else if (key == "strategies") {
      cfg.strategies.clear();
      for (const std::string& name : split(value, ',')) {
        try {
          cfg.strategies.push_back(strategy_from_string(name));
        } catch (const std::invalid_argument& e) {
          throw std::runtime_error(std::string("config: ") + e.what());
        }
      }
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "timing") {
      cfg.timing = parse_bool(value, key);
    } else if (key == "gen.blocks_per_side") {
      cfg.params.blocks_per_side = parse_int(value, key);
    } else if (key == "gen.block_length_mi") {
      cfg.params.block_length_mi = parse_double(value, key);
    } else if (key == "gen.cp_in_fast") {
      cfg.params.cp_in_fast = parse_int(value, key);
    } else if (key == "gen.cp_in_regular") {
      cfg.params.cp_in_regular = parse_int(value, key);
    } else if (key == "gen.cp_partner_fast") {
      cfg.params.cp_partner_fast = parse_int(value, key);
    } else if (key == "gen.cp_partner_regular") {
      cfg.params.cp_partner_regular = parse_int(value, key);
    } else if (key == "gen.speed_mph") {
      cfg.params.speed_mph = parse_double(value, key);
    } else if (key == "gen.target_fraction") {
      cfg.params.target_fraction = parse_double(value, key);
    } else if (key == "gen.battery_full_kwh") {
      cfg.params.battery_full_kwh = parse_double(value, key);
    } else if (key == "gen.residual_min_kwh") {
      cfg.params.residual_min_kwh = parse_double(value, key);
    } else if (key == "gen.residual_max_kwh") {
      cfg.params.residual_max_kwh = parse_double(value, key);
    } else if (key == "gen.fast_quota_min_kwh") {
      cfg.params.fast_quota_min_kwh = parse_double(value, key);
    } else if (key == "gen.fast_quota_max_kwh") {
      cfg.params.fast_quota_max_kwh = parse_double(value, key);
    } else if (key == "gen.sla_wait_min_min") {
      cfg.params.sla_wait_min_min = parse_double(value, key);
    } else if (key == "gen.sla_wait_max_min") {
      cfg.params.sla_wait_max_min = parse_double(value, key);
    } else if (key == "gen.mileage_min") {
      cfg.params.mileage_min = parse_double(value, key);
    } else if (key == "gen.mileage_max") {
      cfg.params.mileage_max = parse_double(value, key);
    } else if (key == "gen.reception_kwh_per_min") {
      cfg.params.reception_kwh_per_min = parse_double(value, key);
    } else if (key == "gen.rate_fast_kwh_per_min") {
      cfg.params.rate_fast_kwh_per_min = parse_double(value, key);
    } else if (key == "gen.rate_regular_kwh_per_min") {
      cfg.params.rate_regular_kwh_per_min = parse_double(value, key);
    } else if (key == "gen.time_quantum_s") {
      cfg.params.time_quantum_s = parse_double(value, key);
    } else if (key == "gen.free_after_all_s") {
      cfg.params.free_after_all_s = parse_double(value, key);
    } else if (key.rfind("gen.free_after.", 0) == 0) {
      const int cp_id = parse_int(key.substr(15), key);
      cfg.params.free_after_s[cp_id] = parse_double(value, key);
    } else {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace smevca
