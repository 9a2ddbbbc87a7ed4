#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arealaw/hamiltonian.hpp"
#include "arealaw/lattice.hpp"

namespace arealaw {

/// A validated experiment description. Parameters stay as a JSON tree and are
/// read through the typed accessors below, which report errors with field paths.
struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 1;
  ModelSpec model;
  LatticeSpec lattice;
  nlohmann::json regions = nlohmann::json::object();  // name -> region spec
  nlohmann::json params = nlohmann::json::object();
  std::string output;
  int dense_cap = kDefaultDenseCap;
  int workers = 1;

  Lattice make_lattice() const { return Lattice(lattice); }
  /// Same lattice with a different size along the first axis.
  Lattice resized_lattice(int n) const;

  /// Canonical JSON of everything that affects numeric output.
  nlohmann::json canonical() const;
};

const std::vector<std::string>& scenario_names();

/// YAML (or JSON, which is a YAML subset) scenario file.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig config_from_json(const nlohmann::json& tree);

/// Scalars become numbers or booleans unless quoted.
nlohmann::json yaml_to_json(const std::string& text);

/// Hex SHA-256 of the canonical JSON dump.
std::string config_hash(const ScenarioConfig& cfg);

/// Region forms: "all", {interval: [lo, hi]}, {box: {lo: [...], hi: [...]}},
/// {sites: [...]}, {center: k} (k sites in the middle of a chain).
Region resolve_region(const Lattice& lattice, const nlohmann::json& spec, const std::string& path);

/// Named region from cfg.regions; nullopt when absent.
std::optional<Region> config_region(const ScenarioConfig& cfg, const Lattice& lattice,
                                    const std::string& name);

double param_number(const ScenarioConfig& cfg, const std::string& key, double fallback);
int param_int(const ScenarioConfig& cfg, const std::string& key, int fallback);
bool param_bool(const ScenarioConfig& cfg, const std::string& key, bool fallback);
std::string param_string(const ScenarioConfig& cfg, const std::string& key,
                         const std::string& fallback);
std::vector<int> param_ints(const ScenarioConfig& cfg, const std::string& key,
                            const std::vector<int>& fallback);
std::vector<double> param_numbers(const ScenarioConfig& cfg, const std::string& key,
                                  const std::vector<double>& fallback);
bool has_param(const ScenarioConfig& cfg, const std::string& key);

}  // namespace arealaw
