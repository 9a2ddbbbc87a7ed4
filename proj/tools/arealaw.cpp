#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "arealaw/config.hpp"
#include "arealaw/errors.hpp"
#include "arealaw/harness.hpp"
#include "arealaw/spectral_cache.hpp"

namespace fs = std::filesystem;
using namespace arealaw;

namespace {

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<int>& dense_cap, const std::optional<int>& workers,
            const std::optional<std::string>& out, const std::optional<std::string>& cache_dir) {
  ScenarioConfig cfg = load_config(config_path);
  if (seed) {
    cfg.seed = *seed;
    cfg.model.seed = *seed;
  }
  if (dense_cap) cfg.dense_cap = *dense_cap;
  if (workers) cfg.workers = *workers;
  if (out) cfg.output = *out;
  if (cfg.output.empty()) cfg.output = "out/" + cfg.scenario;

  std::optional<SpectralCache> cache;
  if (cache_dir) cache.emplace(*cache_dir);
  const RunManifest m = run(cfg, cfg.output, cache ? &*cache : nullptr);
  std::cout << cfg.scenario << ": " << m.checks << " checks, " << m.contentful_failures << " failures, "
            << m.vacuous_passes << " vacuous passes -> " << cfg.output << "\n";
  if (cache) std::cout << "cache: " << m.cache_hits << " hits, " << m.cache_misses << " misses\n";
  return exit_code(m);
}

int cmd_report(const std::string& dir) {
  const Summary s = consolidate(dir);
  std::cout << s.text();
  return s.contentful_failures == 0 ? 0 : 1;
}

int cmd_cache(const std::string& command, const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("cache: directory " + dir + " does not exist");
  SpectralCache cache(dir);
  if (command == "list") {
    for (const auto& e : cache.list())
      std::cout << e.key << "  dim=" << e.dim << " count=" << e.count << " bytes=" << e.bytes << "  "
                << e.path.filename().string() << "\n";
    return 0;
  }
  if (command == "verify") {
    int bad = 0;
    for (const auto& r : cache.verify()) {
      std::cout << (r.ok ? "ok      " : "CORRUPT ") << r.path.filename().string() << "  residual="
                << format_number(r.residual) << (r.message.empty() ? "" : "  " + r.message) << "\n";
      bad += r.ok ? 0 : 1;
    }
    return bad == 0 ? 0 : 1;
  }
  if (command == "clear") {
    std::cout << "removed " << cache.clear() << " entries\n";
    return 0;
  }
  throw ConfigError("cache: unknown command '" + command + "' (expected list, verify or clear)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area-law numerical laboratory"};
  app.require_subcommand(1);

  std::string config_path, report_dir, cache_cmd, cache_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> dense_cap, workers;
  std::optional<std::string> out, run_cache;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario config");
  run_cmd->add_option("config", config_path, "YAML scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--dense-cap", dense_cap, "Largest region (sites) for dense diagonalization");
  run_cmd->add_option("--workers", workers, "Worker threads for scenario cells");
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--cache", run_cache, "Spectral cache directory");

  auto* report_cmd = app.add_subcommand("report", "Summarize run outputs below a directory");
  report_cmd->add_option("dir", report_dir, "Directory holding run outputs")->required();

  auto* cache_sub = app.add_subcommand("cache", "Manage the spectral cache");
  cache_sub->add_option("command", cache_cmd, "list, verify or clear")->required();
  cache_sub->add_option("dir", cache_dir, "Cache directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, seed, dense_cap, workers, out, run_cache);
    if (*report_cmd) return cmd_report(report_dir);
    return cmd_cache(cache_cmd, cache_dir);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
