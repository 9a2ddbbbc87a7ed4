#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "arealaw/checks.hpp"
#include "arealaw/config.hpp"
#include "arealaw/spectral_cache.hpp"

namespace arealaw {

inline constexpr const char* kVersion = "0.1.0";

/// CSV table with documented columns.
struct Table {
  struct Column {
    std::string name;
    std::string description;
  };
  std::string name;  // file stem
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string csv() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<InequalityCheck> checks;
  std::deque<Table> tables;  // stable references while scenarios append
  nlohmann::json details = nlohmann::json::object();  // fitted constants, provenance, notes
  std::vector<StageTiming> stages;
};

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception (by index) is rethrown after all threads finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Executes the scenario pipeline without touching the filesystem (except the cache).
ScenarioResult execute(const ScenarioConfig& cfg, SpectralCache* cache = nullptr);

struct OutputFile {
  std::string file;
  std::string sha256;
};

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> module_versions;
  std::vector<StageTiming> stages;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::vector<OutputFile> outputs;
  std::size_t checks = 0;
  std::size_t contentful_failures = 0;
  std::size_t vacuous_passes = 0;

  nlohmann::json to_json() const;
};

/// execute() and write report.json, one CSV per table, schema.json and
/// manifest.json into `out` (created when missing).
RunManifest run(const ScenarioConfig& cfg, const std::filesystem::path& out,
                SpectralCache* cache = nullptr);

/// 0 when every check passes, 1 on any failing check.
int exit_code(const RunManifest& manifest);

struct SummaryRow {
  std::string scenario;
  InequalityCheck check;
};

struct Summary {
  std::vector<std::string> scenarios;
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
  std::size_t contentful_failures = 0;
  std::size_t vacuous_passes = 0;

  std::string text() const;
};

/// Consolidates every run directory below `dir` (a directory holding
/// manifest.json counts as one run). Missing or tampered outputs become warnings.
Summary consolidate(const std::filesystem::path& dir);

}  // namespace arealaw
