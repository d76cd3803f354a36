// SPDX-License-Identifier: Apache-2.0
#include "smevca/domain.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace smevca {
namespace {

using nlohmann::json;

bool inside_grid(const GridPos& p, const GridSpec& g) {
  return p.x >= 0 && p.x <= g.blocks_per_side && p.y >= 0 &&
         p.y <= g.blocks_per_side;
}

template <typename... Parts>
std::string msg(Parts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

json pos_to_json(const GridPos& p) { return json::array({p.x, p.y}); }

GridPos pos_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::runtime_error("position must be a [x, y] array");
  }
  return GridPos{j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

const char* to_string(ChargeType t) {
  return t == ChargeType::fast ? "fast" : "regular";
}

const char* to_string(Network n) {
  return n == Network::in ? "in" : "partner";
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> out;
  if (!(sc.battery_full_kwh > 0)) {
    out.push_back(msg("scenario: battery_full_kwh ", sc.battery_full_kwh,
                      " must be > 0"));
  }
  if (!(sc.time_quantum_s > 0)) {
    out.push_back(msg("scenario: time_quantum_s ", sc.time_quantum_s,
                      " must be > 0"));
  }
  if (sc.grid.blocks_per_side < 1 || !(sc.grid.block_length_mi > 0)) {
    out.push_back(msg("scenario: grid ", sc.grid.blocks_per_side,
                      " blocks of ", sc.grid.block_length_mi,
                      " mi is degenerate"));
  }

  std::set<int> ev_ids;
  for (const Subscriber& ev : sc.subscribers) {
    const std::string who = msg("subscriber ", ev.id);
    if (!ev_ids.insert(ev.id).second) {
      out.push_back(msg(who, ": duplicate id"));
    }
    if (!inside_grid(ev.position, sc.grid)) {
      out.push_back(msg(who, ": position (", ev.position.x, ", ",
                        ev.position.y, ") outside grid"));
    }
    if (ev.residual_charge_kwh < 0) {
      out.push_back(msg(who, ": residual_charge_kwh ", ev.residual_charge_kwh,
                        " must be >= 0"));
    }
    if (ev.residual_charge_kwh > sc.battery_full_kwh) {
      out.push_back(msg(who, ": residual_charge_kwh ", ev.residual_charge_kwh,
                        " exceeds battery_full_kwh ", sc.battery_full_kwh));
    }
    if (!(ev.avg_speed_mps > 0)) {
      out.push_back(msg(who, ": avg_speed_mps ", ev.avg_speed_mps,
                        " must be > 0"));
    }
    if (!(ev.mileage_mi_per_kwh > 0)) {
      out.push_back(msg(who, ": mileage_mi_per_kwh ", ev.mileage_mi_per_kwh,
                        " must be > 0"));
    }
    if (!(ev.reception_rate_kw > 0)) {
      out.push_back(msg(who, ": reception_rate_kw ", ev.reception_rate_kw,
                        " must be > 0"));
    }
    if (!(ev.target_fraction > 0 && ev.target_fraction <= 1)) {
      out.push_back(msg(who, ": target_fraction ", ev.target_fraction,
                        " must be in (0, 1]"));
    }
    if (ev.fast_quota_kwh < 0) {
      out.push_back(
          msg(who, ": fast_quota_kwh ", ev.fast_quota_kwh, " must be >= 0"));
    }
    if (ev.sla_wait_s < 0) {
      out.push_back(msg(who, ": sla_wait_s ", ev.sla_wait_s, " must be >= 0"));
    }
  }

  std::set<int> cp_ids;
  for (const ChargePoint& cp : sc.charge_points) {
    const std::string who = msg("charge point ", cp.id);
    if (!cp_ids.insert(cp.id).second) {
      out.push_back(msg(who, ": duplicate id"));
    }
    if (!inside_grid(cp.position, sc.grid)) {
      out.push_back(msg(who, ": position (", cp.position.x, ", ",
                        cp.position.y, ") outside grid"));
    }
    if (!(cp.rate_kw > 0)) {
      out.push_back(msg(who, ": rate_kw ", cp.rate_kw, " must be > 0"));
    }
    if (cp.quota < 1) {
      out.push_back(msg(who, ": quota ", cp.quota, " must be >= 1"));
    }
    if (cp.free_after_s < 0) {
      out.push_back(
          msg(who, ": free_after_s ", cp.free_after_s, " must be >= 0"));
    }
  }
  return out;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["batch_time_s"] = sc.batch_time_s;
  j["battery_full_kwh"] = sc.battery_full_kwh;
  j["grid"] = {{"block_length_mi", sc.grid.block_length_mi},
               {"blocks_per_side", sc.grid.blocks_per_side}};
  j["seed"] = sc.seed;
  j["time_quantum_s"] = sc.time_quantum_s;
  j["subscribers"] = json::array();
  for (const Subscriber& ev : sc.subscribers) {
    j["subscribers"].push_back({{"avg_speed_mps", ev.avg_speed_mps},
                                {"fast_quota_kwh", ev.fast_quota_kwh},
                                {"id", ev.id},
                                {"mileage_mi_per_kwh", ev.mileage_mi_per_kwh},
                                {"position", pos_to_json(ev.position)},
                                {"reception_rate_kw", ev.reception_rate_kw},
                                {"residual_charge_kwh", ev.residual_charge_kwh},
                                {"sla_wait_s", ev.sla_wait_s},
                                {"target_fraction", ev.target_fraction}});
  }
  j["charge_points"] = json::array();
  for (const ChargePoint& cp : sc.charge_points) {
    j["charge_points"].push_back({{"charge_type", to_string(cp.charge_type)},
                                  {"free_after_s", cp.free_after_s},
                                  {"id", cp.id},
                                  {"network", to_string(cp.network)},
                                  {"position", pos_to_json(cp.position)},
                                  {"quota", cp.quota},
                                  {"rate_kw", cp.rate_kw}});
  }
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario JSON parse error: ") +
                             e.what());
  }
  try {
    Scenario sc;
    sc.batch_time_s = j.at("batch_time_s").get<double>();
    sc.battery_full_kwh = j.at("battery_full_kwh").get<double>();
    sc.grid.block_length_mi = j.at("grid").at("block_length_mi").get<double>();
    sc.grid.blocks_per_side = j.at("grid").at("blocks_per_side").get<int>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    sc.time_quantum_s = j.at("time_quantum_s").get<double>();
    for (const json& e : j.at("subscribers")) {
      Subscriber ev;
      ev.id = e.at("id").get<int>();
      ev.position = pos_from_json(e.at("position"));
      ev.residual_charge_kwh = e.at("residual_charge_kwh").get<double>();
      ev.avg_speed_mps = e.at("avg_speed_mps").get<double>();
      ev.mileage_mi_per_kwh = e.at("mileage_mi_per_kwh").get<double>();
      ev.reception_rate_kw = e.at("reception_rate_kw").get<double>();
      ev.target_fraction = e.at("target_fraction").get<double>();
      ev.fast_quota_kwh = e.at("fast_quota_kwh").get<double>();
      ev.sla_wait_s = e.at("sla_wait_s").get<double>();
      sc.subscribers.push_back(ev);
    }
    for (const json& e : j.at("charge_points")) {
      ChargePoint cp;
      cp.id = e.at("id").get<int>();
      cp.position = pos_from_json(e.at("position"));
      const auto type = e.at("charge_type").get<std::string>();
      if (type == "fast") {
        cp.charge_type = ChargeType::fast;
      } else if (type == "regular") {
        cp.charge_type = ChargeType::regular;
      } else {
        throw std::runtime_error("unknown charge_type: " + type);
      }
      const auto net = e.at("network").get<std::string>();
      if (net == "in") {
        cp.network = Network::in;
      } else if (net == "partner") {
        cp.network = Network::partner;
      } else {
        throw std::runtime_error("unknown network: " + net);
      }
      cp.rate_kw = e.at("rate_kw").get<double>();
      cp.quota = e.at("quota").get<int>();
      cp.free_after_s = e.at("free_after_s").get<double>();
      sc.charge_points.push_back(cp);
    }
    return sc;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario JSON missing field: ") +
                             e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write scenario file: " + path);
  }
  out << scenario_to_json(sc);
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace smevca
