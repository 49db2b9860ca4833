#include "context.hpp"

#include <iostream>

#include "randblock/error.hpp"

namespace randblock::cli {

std::uint64_t RunContext::require_seed() const {
  if (!seed) throw ConfigError(subcommand + " is stochastic: give \"seed\" in the config or --seed");
  return *seed;
}

template <class T>
T RunContext::get(const char* key) const {
  if (!has(key)) throw ConfigError(std::string("task field '") + key + "' is required for " + subcommand);
  try {
    return task.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("task field '") + key + "' has the wrong type");
  }
}

template int RunContext::get<int>(const char*) const;
template double RunContext::get<double>(const char*) const;
template bool RunContext::get<bool>(const char*) const;
template std::int64_t RunContext::get<std::int64_t>(const char*) const;
template std::string RunContext::get<std::string>(const char*) const;
template std::vector<int> RunContext::get<std::vector<int>>(const char*) const;
template std::vector<double> RunContext::get<std::vector<double>>(const char*) const;

cplx parse_energy(const ordered_json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(what + " must be a number or [re, im]");
}

cplx RunContext::energy(const char* key) const {
  if (!has(key)) throw ConfigError(std::string("task field '") + key + "' is required for " + subcommand);
  return parse_energy(task.at(key), std::string("'") + key + "'");
}

std::vector<cplx> RunContext::energies() const {
  std::vector<cplx> out;
  if (has("energies")) {
    const auto& list = task.at("energies");
    if (!list.is_array() || list.empty()) throw ConfigError("'energies' must be a nonempty list");
    for (const auto& v : list) out.push_back(parse_energy(v, "energies entry"));
  } else if (has("E_grid")) {
    const auto& g = task.at("E_grid");
    if (!g.is_object() || !g.contains("lo") || !g.contains("hi") || !g.contains("count")) {
      throw ConfigError("'E_grid' must be {\"lo\":..,\"hi\":..,\"count\":..}");
    }
    const double lo = g.at("lo").get<double>(), hi = g.at("hi").get<double>();
    const int count = g.at("count").get<int>();
    if (count < 1 || !(hi >= lo)) throw ConfigError("'E_grid' needs count >= 1 and hi >= lo");
    for (int i = 0; i < count; ++i) out.emplace_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1), 0.0);
  } else {
    out.push_back(energy("E"));
  }
  return out;
}

Interval RunContext::window(const char* key) const {
  const auto w = get<std::vector<double>>(key);
  if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError(std::string("'") + key + "' must be [lo, hi] with lo < hi");
  return {w[0], w[1]};
}

DisorderRealization RunContext::realization(std::uint64_t index) const {
  if (has("nu")) {
    DisorderRealization r;
    r.nu = get<std::vector<double>>("nu");
    if (static_cast<int>(r.nu.size()) != model.params.n) {
      throw ConfigError("'nu' must have n = " + std::to_string(model.params.n) + " entries");
    }
    return r;
  }
  return sample_disorder(model.params, require_seed(), index);
}

void RunContext::log(const std::string& msg) const {
  if (verbose) std::cerr << "[randblock " << subcommand << "] " << msg << '\n';
}

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table{
      {"spectrum", cmd_spectrum},         {"dos", cmd_dos},
      {"periodic", cmd_periodic},         {"asspec", cmd_asspec},
      {"green-check", cmd_green_check},   {"charpoly-check", cmd_charpoly_check},
      {"lyapunov", cmd_lyapunov},         {"thouless", cmd_thouless},
      {"zero-energy", cmd_zero_energy},   {"alpha-scan", cmd_alpha_scan},
      {"zariski", cmd_zariski},           {"correlator", cmd_correlator},
      {"wegner-probe", cmd_wegner_probe}, {"xy-verify", cmd_xy_verify},
      {"lr-stats", cmd_lr_stats},
  };
  return table;
}

}  // namespace randblock::cli
