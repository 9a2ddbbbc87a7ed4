#include "arealaw/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "arealaw/errors.hpp"
#include "arealaw/spectral_cache.hpp"

namespace arealaw {

namespace {

using nlohmann::json;

struct ScenarioSchema {
  std::set<std::string> params;
  std::set<std::string> regions;
  std::set<std::string> required_regions;
};

const std::map<std::string, ScenarioSchema>& schemas() {
  static const std::map<std::string, ScenarioSchema> table = {
      {"frustration", {{"sizes", "g_values", "min_size", "margin", "slack"}, {}, {}}},
      {"lightcone", {{"distances", "points", "vt_min", "anchor", "operator", "slack"}, {}, {}}},
      {"qfilter",
       {{"l", "sigma_rule", "excited_states", "quadrature", "quad_T", "quad_dt", "quad_epsilon",
         "ladder", "ladder_sigma", "ladder_T"},
        {"X", "R"},
        {"X"}}},
      {"correlations", {{"sizes", "block_sizes", "separations", "mode"}, {}, {}}},
      {"support",
       {{"l", "mode", "block_sizes", "dos_sizes", "tau", "excitation"}, {"R"}, {"R"}}},
      {"rg", {{"offsets", "paper_threshold"}, {"R", "X"}, {"R", "X"}}},
      {"dos-fit", {{"region_sizes", "tau", "c2_cap", "max_energy"}, {}, {}}},
      {"entropy-scaling",
       {{"sizes", "block_sizes", "mode", "dos_sizes", "fit_size", "entropy_cap", "tau",
         "constants"},
        {},
        {}}},
      {"excited",
       {{"states", "amplitudes", "block_sizes", "mode", "dos_sizes", "fit_size", "tau",
         "constants"},
        {},
        {}}},
  };
  return table;
}

const std::set<std::string> kConstantNames = {"c1", "xi", "nu", "gamma", "eta", "tau", "c2"};

json scalar_to_json(const YAML::Node& node) {
  const std::string& text = node.Scalar();
  if (node.Tag() == "!") return text;  // quoted
  if (text == "~" || text == "null") return nullptr;
  if (text == "true" || text == "True") return true;
  if (text == "false" || text == "False") return false;
  long long i = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (ec == std::errc() && p == text.data() + text.size()) return i;
  double d = 0.0;
  auto [pd, ecd] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ecd == std::errc() && pd == text.data() + text.size()) return d;
  return text;
}

json node_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return scalar_to_json(node);
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& item : node) out.push_back(node_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = node_to_json(kv.second);
      return out;
    }
  }
  return nullptr;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + j.dump());
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer, got " + j.dump());
  return j.get<int>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::uint64_t>(j.get<long long>());
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string, got " + j.dump());
  return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(path.empty() ? key : path + "." + key, "unknown field (allowed: " + list + ")");
    }
  }
}

LatticeSpec parse_lattice(const json& j) {
  if (!j.is_object()) fail("lattice", "expected a mapping");
  reject_unknown(j, {"extents", "boundary", "q"}, "lattice");
  LatticeSpec spec;
  if (!j.contains("extents")) fail("lattice.extents", "missing");
  const json& ext = j.at("extents");
  if (ext.is_number_integer()) {
    spec.extents = {ext.get<int>()};
  } else if (ext.is_array() && !ext.empty()) {
    for (std::size_t i = 0; i < ext.size(); ++i)
      spec.extents.push_back(as_int(ext[i], "lattice.extents[" + std::to_string(i) + "]"));
  } else {
    fail("lattice.extents", "expected an integer or a non-empty list");
  }
  spec.s = static_cast<int>(spec.extents.size());
  auto parse_bc = [](const json& b, const std::string& path) {
    const std::string name = as_string(b, path);
    if (name == "open") return Boundary::open;
    if (name == "periodic") return Boundary::periodic;
    fail(path, "expected open or periodic, got '" + name + "'");
  };
  if (!j.contains("boundary")) {
    spec.boundary.assign(spec.extents.size(), Boundary::open);
  } else if (j.at("boundary").is_string()) {
    spec.boundary.assign(spec.extents.size(), parse_bc(j.at("boundary"), "lattice.boundary"));
  } else if (j.at("boundary").is_array()) {
    const json& b = j.at("boundary");
    if (b.size() != spec.extents.size()) fail("lattice.boundary", "one flag per axis required");
    for (std::size_t i = 0; i < b.size(); ++i)
      spec.boundary.push_back(parse_bc(b[i], "lattice.boundary[" + std::to_string(i) + "]"));
  } else {
    fail("lattice.boundary", "expected a string or a list");
  }
  spec.q = j.contains("q") ? as_int(j.at("q"), "lattice.q") : 2;
  try {
    (void)Lattice(spec);
  } catch (const Error& e) {
    fail("lattice", e.detail());
  }
  return spec;
}

ModelSpec parse_model(const json& j, std::uint64_t seed) {
  if (!j.is_object()) fail("model", "expected a mapping");
  reject_unknown(j, {"kind", "coupling", "g", "jx", "jy", "jz", "h", "strength", "seed"}, "model");
  ModelSpec m;
  m.seed = seed;
  if (j.contains("kind")) {
    const std::string kind = as_string(j.at("kind"), "model.kind");
    try {
      m.kind = parse_model_kind(kind);
    } catch (const Error& e) {
      fail("model.kind", e.detail());
    }
  }
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = as_number(j.at(key), std::string("model.") + key);
  };
  num("coupling", m.coupling);
  num("g", m.g);
  num("jx", m.jx);
  num("jy", m.jy);
  num("jz", m.jz);
  num("h", m.h);
  num("strength", m.strength);
  if (j.contains("seed")) {
    m.seed = as_seed(j.at("seed"), "model.seed");
  }
  return m;
}

const json* find_param(const ScenarioConfig& cfg, const std::string& key) {
  auto it = cfg.params.find(key);
  if (it == cfg.params.end() || it->is_null()) return nullptr;
  return &*it;
}

}  // namespace

Lattice ScenarioConfig::resized_lattice(int n) const {
  LatticeSpec spec = lattice;
  spec.extents[0] = n;
  return Lattice(spec);
}

json ScenarioConfig::canonical() const {
  json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["model"] = {{"kind", to_string(model.kind)}, {"coupling", model.coupling}, {"g", model.g},
                {"jx", model.jx},  {"jy", model.jy}, {"jz", model.jz}, {"h", model.h},
                {"strength", model.strength}, {"seed", model.seed}};
  json bc = json::array();
  for (Boundary b : lattice.boundary) bc.push_back(b == Boundary::open ? "open" : "periodic");
  j["lattice"] = {{"extents", lattice.extents}, {"boundary", bc}, {"q", lattice.q}};
  j["regions"] = regions;
  j["params"] = params;
  j["dense_cap"] = dense_cap;
  return j;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, schema] : schemas()) out.push_back(name);
    return out;
  }();
  return names;
}

json yaml_to_json(const std::string& text) {
  try {
    return node_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: YAML parse error: ") + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ScenarioConfig parse_config(const std::string& text) { return config_from_json(yaml_to_json(text)); }

ScenarioConfig config_from_json(const json& tree) {
  if (!tree.is_object()) fail("config", "expected a mapping at the top level");
  reject_unknown(tree, {"scenario", "seed", "model", "lattice", "regions", "params", "output",
                        "dense_cap", "workers"},
                 "");
  ScenarioConfig cfg;
  if (!tree.contains("scenario")) fail("scenario", "missing");
  cfg.scenario = as_string(tree.at("scenario"), "scenario");
  const auto sit = schemas().find(cfg.scenario);
  if (sit == schemas().end()) {
    std::string list;
    for (const auto& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
    fail("scenario", "unknown scenario '" + cfg.scenario + "' (expected one of " + list + ")");
  }
  const ScenarioSchema& schema = sit->second;

  if (tree.contains("seed")) {
    cfg.seed = as_seed(tree.at("seed"), "seed");
  }
  if (!tree.contains("lattice")) fail("lattice", "missing");
  cfg.lattice = parse_lattice(tree.at("lattice"));
  cfg.model = parse_model(tree.value("model", json::object()), cfg.seed);
  if (tree.contains("output")) cfg.output = as_string(tree.at("output"), "output");
  if (tree.contains("dense_cap")) cfg.dense_cap = as_int(tree.at("dense_cap"), "dense_cap");
  if (tree.contains("workers")) cfg.workers = as_int(tree.at("workers"), "workers");
  if (cfg.dense_cap < 1) fail("dense_cap", "must be positive");
  if (cfg.workers < 1) fail("workers", "must be positive");

  if (tree.contains("params")) {
    cfg.params = tree.at("params");
    if (!cfg.params.is_object()) fail("params", "expected a mapping");
  }
  reject_unknown(cfg.params, schema.params, "params");
  if (cfg.params.contains("constants")) {
    const json& c = cfg.params.at("constants");
    if (!c.is_object()) fail("params.constants", "expected a mapping");
    reject_unknown(c, kConstantNames, "params.constants");
    for (const auto& [k, v] : c.items()) (void)as_number(v, "params.constants." + k);
  }

  if (tree.contains("regions")) {
    cfg.regions = tree.at("regions");
    if (!cfg.regions.is_object()) fail("regions", "expected a mapping");
  }
  reject_unknown(cfg.regions, schema.regions, "regions");
  for (const auto& name : schema.required_regions)
    if (!cfg.regions.contains(name)) fail("regions." + name, "missing");
  const Lattice lattice = cfg.make_lattice();
  for (const auto& [name, spec] : cfg.regions.items())
    (void)resolve_region(lattice, spec, "regions." + name);
  return cfg;
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string text = cfg.canonical().dump();
  return to_hex(sha256(text.data(), text.size()));
}

Region resolve_region(const Lattice& lattice, const json& spec, const std::string& path) {
  try {
    if (spec.is_string()) {
      if (spec.get<std::string>() == "all") return Region::all(lattice);
      fail(path, "unknown region keyword '" + spec.get<std::string>() + "'");
    }
    if (!spec.is_object() || spec.size() != 1) {
      fail(path, "expected one of: all, {interval}, {box}, {sites}, {center}");
    }
    const auto& [kind, value] = *spec.items().begin();
    const std::string sub = path + "." + kind;
    if (kind == "interval") {
      if (!value.is_array() || value.size() != 2) fail(sub, "expected [lo, hi]");
      return Region::interval(lattice, as_int(value[0], sub + "[0]"), as_int(value[1], sub + "[1]"));
    }
    if (kind == "sites") {
      if (!value.is_array() || value.empty()) fail(sub, "expected a non-empty list");
      std::vector<Site> sites;
      for (std::size_t i = 0; i < value.size(); ++i)
        sites.push_back(as_int(value[i], sub + "[" + std::to_string(i) + "]"));
      return Region(lattice, sites);
    }
    if (kind == "box") {
      if (!value.is_object() || !value.contains("lo") || !value.contains("hi"))
        fail(sub, "expected {lo: [...], hi: [...]}");
      Coords lo, hi;
      for (const auto& x : value.at("lo")) lo.push_back(as_int(x, sub + ".lo"));
      for (const auto& x : value.at("hi")) hi.push_back(as_int(x, sub + ".hi"));
      return Region::box(lattice, lo, hi);
    }
    if (kind == "center") {
      const int k = as_int(value, sub);
      if (lattice.s() != 1) fail(sub, "center regions need a chain");
      const int n = lattice.num_sites();
      if (k < 1 || k > n) fail(sub, "size must lie in 1.." + std::to_string(n));
      const int lo = (n - k) / 2;
      return Region::interval(lattice, lo, lo + k - 1);
    }
    fail(sub, "unknown region form");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.detail());
  }
}

std::optional<Region> config_region(const ScenarioConfig& cfg, const Lattice& lattice,
                                    const std::string& name) {
  if (!cfg.regions.contains(name)) return std::nullopt;
  return resolve_region(lattice, cfg.regions.at(name), "regions." + name);
}

bool has_param(const ScenarioConfig& cfg, const std::string& key) {
  return find_param(cfg, key) != nullptr;
}

double param_number(const ScenarioConfig& cfg, const std::string& key, double fallback) {
  const json* p = find_param(cfg, key);
  return p ? as_number(*p, "params." + key) : fallback;
}

int param_int(const ScenarioConfig& cfg, const std::string& key, int fallback) {
  const json* p = find_param(cfg, key);
  return p ? as_int(*p, "params." + key) : fallback;
}

bool param_bool(const ScenarioConfig& cfg, const std::string& key, bool fallback) {
  const json* p = find_param(cfg, key);
  if (!p) return fallback;
  if (!p->is_boolean()) fail("params." + key, "expected true or false");
  return p->get<bool>();
}

std::string param_string(const ScenarioConfig& cfg, const std::string& key,
                         const std::string& fallback) {
  const json* p = find_param(cfg, key);
  return p ? as_string(*p, "params." + key) : fallback;
}

std::vector<int> param_ints(const ScenarioConfig& cfg, const std::string& key,
                            const std::vector<int>& fallback) {
  const json* p = find_param(cfg, key);
  if (!p) return fallback;
  if (!p->is_array()) fail("params." + key, "expected a list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < p->size(); ++i)
    out.push_back(as_int((*p)[i], "params." + key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> param_numbers(const ScenarioConfig& cfg, const std::string& key,
                                  const std::vector<double>& fallback) {
  const json* p = find_param(cfg, key);
  if (!p) return fallback;
  if (!p->is_array()) fail("params." + key, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < p->size(); ++i)
    out.push_back(as_number((*p)[i], "params." + key + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace arealaw
