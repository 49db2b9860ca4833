#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "randblock/io.hpp"
#include "randblock/model.hpp"
#include "randblock/types.hpp"

namespace randblock::cli {

using nlohmann::ordered_json;

// Everything a subcommand sees: the validated model, the task block of the
// config, and the run flags. Subcommands fill `files` and `report`; main
// decides where they go.
struct RunContext {
  std::string subcommand;
  ordered_json config;  // as embedded in the outputs (seed resolved)
  ordered_json task;    // config["task"], possibly empty
  ModelConfig model;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool verbose = false;

  std::vector<std::pair<std::string, std::string>> files;  // name, contents (CSV first)
  ordered_json report = ordered_json::object();

  [[nodiscard]] std::uint64_t require_seed() const;
  [[nodiscard]] bool has(const char* key) const { return task.contains(key); }

  template <class T>
  [[nodiscard]] T get(const char* key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }
  template <class T>
  [[nodiscard]] T get(const char* key) const;

  [[nodiscard]] cplx energy(const char* key) const;
  [[nodiscard]] std::vector<cplx> energies() const;  // "energies" list, "E", or "E_grid"
  [[nodiscard]] Interval window(const char* key) const;
  [[nodiscard]] DisorderRealization realization(std::uint64_t index) const;

  void log(const std::string& msg) const;
  void add_file(std::string name, std::string contents) { files.emplace_back(std::move(name), std::move(contents)); }
};

cplx parse_energy(const ordered_json& v, const std::string& what);

using Command = void (*)(RunContext&);
const std::map<std::string, Command>& command_table();

void cmd_spectrum(RunContext&);
void cmd_dos(RunContext&);
void cmd_periodic(RunContext&);
void cmd_asspec(RunContext&);
void cmd_green_check(RunContext&);
void cmd_charpoly_check(RunContext&);
void cmd_lyapunov(RunContext&);
void cmd_thouless(RunContext&);
void cmd_zero_energy(RunContext&);
void cmd_alpha_scan(RunContext&);
void cmd_zariski(RunContext&);
void cmd_correlator(RunContext&);
void cmd_wegner_probe(RunContext&);
void cmd_xy_verify(RunContext&);
void cmd_lr_stats(RunContext&);

}  // namespace randblock::cli
