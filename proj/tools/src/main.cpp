#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "context.hpp"
#include "randblock/error.hpp"

namespace fs = std::filesystem;
using namespace randblock;
using namespace randblock::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << contents;
  if (!f) throw ConfigError("write failed for " + path.string());
}

int fail(const std::string& kind, const std::string& message, const std::string& subcommand, const std::string& out,
         int code) {
  ordered_json e;
  e["error"] = {{"kind", kind}, {"message", message}, {"subcommand", subcommand}, {"exit_code", code}};
  const std::string text = e.dump(2) + "\n";
  std::cerr << text;
  if (!out.empty()) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec) {
      std::ofstream f(fs::path(out) / "error.json");
      f << text;
    }
  }
  return code;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("RANDBLOCK_THREADS"); env && *env) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("RANDBLOCK_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

// Accepts a plain config or a report written by a previous run.
ordered_json load_config(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("subcommand") && j.contains("config")) j = j.at("config");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randblock: random block Jacobi operators and the disordered XY chain"};
  std::vector<std::string> names;
  for (const auto& [name, fn] : command_table()) names.push_back(name);

  std::string subcommand, config_path, out;
  std::uint64_t seed_flag = 0;
  int threads_flag = 0;
  bool verbose = false;
  app.add_option("subcommand", subcommand, "computation to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* seed_opt = app.add_option("--seed", seed_flag, "RNG seed (overrides the config)");
  app.add_option("--out", out, "output directory; CSV goes to stdout when absent");
  app.add_option("--threads", threads_flag, "worker threads (default RANDBLOCK_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), subcommand, "", kExitConfig);
  }

  RunContext ctx;
  ctx.subcommand = subcommand;
  ctx.verbose = verbose;
  try {
    ctx.threads = resolve_threads(threads_flag);
    ctx.config = load_config(config_path);
    if (*seed_opt) {
      ctx.config["seed"] = seed_flag;
    }
    ctx.model = parse_model_config(ctx.config.dump());
    if (ctx.config.contains("seed")) ctx.seed = ctx.model.seed;
    if (ctx.config.contains("task")) {
      ctx.task = ctx.config.at("task");
      if (!ctx.task.is_object()) throw ConfigError("'task' must be a JSON object");
    } else {
      ctx.task = ordered_json::object();
    }
    ctx.log("threads " + std::to_string(ctx.threads));
    command_table().at(subcommand)(ctx);

    ordered_json report;
    report["subcommand"] = subcommand;
    report["config"] = ctx.config;
    report["files"] = ordered_json::array();
    for (const auto& f : ctx.files) report["files"].push_back(f.first);
    report["results"] = ctx.report;
    const std::string report_text = report.dump(2) + "\n";

    if (out.empty()) {
      std::cout << (ctx.files.empty() ? report_text : ctx.files.front().second);
      if (verbose && !ctx.files.empty()) std::cerr << report_text;
    } else {
      fs::create_directories(out);
      for (const auto& [name, contents] : ctx.files) write_file(fs::path(out) / name, contents);
      write_file(fs::path(out) / (subcommand + ".json"), report_text);
      ctx.log("wrote " + std::to_string(ctx.files.size() + 1) + " files to " + out);
    }
  } catch (const ConfigError& e) {
    return fail("config", e.what(), subcommand, out, kExitConfig);
  } catch (const NearSpectrumError& e) {
    return fail("near_spectrum", e.what(), subcommand, out, kExitNumerical);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), subcommand, out, kExitNumerical);
  } catch (const fs::filesystem_error& e) {
    return fail("config", e.what(), subcommand, out, kExitConfig);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), subcommand, out, kExitNumerical);
  }
  return 0;
}
