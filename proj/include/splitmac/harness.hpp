#pragma once
// Experiment harness: JSON configuration, seeded sweeps over device counts,
// grouping algorithms and protocols, CSV emission and text summaries.
//
// Determinism contract: a sweep is a grid over (sweep point N, replication r,
// algorithm, protocol).  Each (N, r) cell draws its own scenario from
//
//   row_seed = splitmix64(splitmix64(splitmix64(seed) ^ N) ^ r)
//
// so adding sweep points or replications never perturbs other cells.  Devices
// are generated once per (N, r) and shared by every algorithm/protocol; the
// random pairing algorithm draws from splitmix64(row_seed ^ kPairingSeedTag).
// Rows are sorted by (sweep_point, replication, algorithm, protocol), so the
// emitted CSV is byte-identical for identical config + seed.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "splitmac/channel.hpp"
#include "splitmac/latency.hpp"
#include "splitmac/model_profile.hpp"
#include "splitmac/pairing.hpp"
#include "splitmac/rng.hpp"

namespace splitmac {

// --- Enumerations -----------------------------------------------------------

enum class Algorithm { balanced, ordered, near_optimal, exhaustive, random };

inline const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::balanced: return "balanced";
    case Algorithm::ordered: return "ordered";
    case Algorithm::near_optimal: return "near_optimal";
    case Algorithm::exhaustive: return "exhaustive";
    case Algorithm::random: return "random";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_string(const std::string& name) {
  for (Algorithm a : {Algorithm::balanced, Algorithm::ordered, Algorithm::near_optimal,
                      Algorithm::exhaustive, Algorithm::random})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

inline std::optional<Protocol> protocol_from_string(const std::string& name) {
  for (Protocol p : {Protocol::splitmac, Protocol::vanilla, Protocol::cluster_fdma})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

inline std::optional<MdScope> md_scope_from_string(const std::string& name) {
  for (MdScope s : {MdScope::cluster, MdScope::all_devices})
    if (name == to_string(s)) return s;
  return std::nullopt;
}

// --- Configuration ----------------------------------------------------------

// Collected configuration problems; what() joins all of them.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const std::string& issue : issues) out += "\n  - " + issue;
    return out;
  }
  std::vector<std::string> issues_;
};

struct SnrOverride {
  enum class Mode { uniform_db, snrs_linear };
  Mode mode = Mode::uniform_db;
  double lo_db = 0.0;   // uniform_db bounds
  double hi_db = 0.0;
  std::vector<double> snrs_linear;  // explicit per-device uplink SNRs
};

struct ExperimentSpec {
  RadioParams radio;
  ModelProfile model;  // always resolved to concrete numbers
  ComputeProfile compute;
  double device_cpu_hz = 1.0e9;
  std::vector<int> n_devices = {20};
  int group_size = 2;
  int cluster_size_k = 4;  // devices per cluster
  int q = 1;               // groups per server-side update window
  std::vector<Algorithm> algorithms = {Algorithm::near_optimal};
  std::vector<Protocol> protocols = {Protocol::splitmac};
  int replications = 100;
  std::uint64_t seed = 1;
  std::optional<SnrOverride> snr_override;
  MdScope md_scope = MdScope::cluster;

  int groups_per_cluster() const { return cluster_size_k / group_size; }

  // Canonical fully-resolved form: every field present, scalars normalized to
  // lists, the model always in direct-numbers form.  Hashing this makes the
  // digest independent of which defaults the file spelled out.
  nlohmann::json resolved_json() const {
    nlohmann::json j;
    j["radio"] = {{"uplink_tx_power_dbm", radio.uplink_tx_power_dbm},
                  {"downlink_tx_power_dbm", radio.downlink_tx_power_dbm},
                  {"bandwidth_ul_hz", radio.bandwidth_ul_hz},
                  {"bandwidth_dl_hz", radio.bandwidth_dl_hz},
                  {"noise_psd_dbm_hz", radio.noise_psd_dbm_hz},
                  {"shadowing_sigma_db", radio.shadowing_sigma_db},
                  {"cell_radius_min_km", radio.cell_radius_min_km},
                  {"cell_radius_max_km", radio.cell_radius_max_km}};
    j["model"] = {{"device_model_bits", model.device_model_bits},
                  {"smashed_bits_per_batch", model.smashed_bits_per_batch},
                  {"grad_bits_per_batch", model.grad_bits_per_batch},
                  {"fwd_device_flops_per_sample", model.fwd_device_flops_per_sample},
                  {"bwd_device_flops_per_sample", model.bwd_device_flops_per_sample},
                  {"fwd_server_flops_per_sample", model.fwd_server_flops_per_sample},
                  {"bwd_server_flops_per_sample", model.bwd_server_flops_per_sample},
                  {"batch_size", model.batch_size}};
    j["compute"] = {
        {"server_cpu_hz", compute.server_cpu_hz},
        {"device_intensity_flops_per_cycle", compute.device_intensity_flops_per_cycle},
        {"server_intensity_flops_per_cycle", compute.server_intensity_flops_per_cycle}};
    j["device_cpu_hz"] = device_cpu_hz;
    j["n_devices"] = n_devices;
    j["group_size"] = group_size;
    j["cluster_size_k"] = cluster_size_k;
    j["q"] = q;
    nlohmann::json algos = nlohmann::json::array();
    for (Algorithm a : algorithms) algos.push_back(to_string(a));
    j["algorithm"] = algos;
    nlohmann::json protos = nlohmann::json::array();
    for (Protocol p : protocols) protos.push_back(to_string(p));
    j["protocol"] = protos;
    j["replications"] = replications;
    j["seed"] = seed;
    if (snr_override) {
      if (snr_override->mode == SnrOverride::Mode::uniform_db)
        j["snr_override"] = {
            {"uniform_db", {snr_override->lo_db, snr_override->hi_db}}};
      else
        j["snr_override"] = {{"snrs_linear", snr_override->snrs_linear}};
    } else {
      j["snr_override"] = nullptr;
    }
    j["md_scope"] = to_string(md_scope);
    return j;
  }
};

inline std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf, 16);
}

inline std::string spec_hash(const ExperimentSpec& spec) {
  return fnv1a64_hex(spec.resolved_json().dump());
}

namespace detail {

class JsonReader {
 public:
  JsonReader(const nlohmann::json& node, std::string scope,
             std::vector<std::string>& issues)
      : node_(node), scope_(std::move(scope)), issues_(issues) {}

  ~JsonReader() {
    for (const auto& item : node_.items())
      if (std::find(seen_.begin(), seen_.end(), item.key()) == seen_.end())
        issues_.push_back(scope_ + ": unknown key \"" + item.key() + "\"");
  }

  JsonReader(const JsonReader&) = delete;
  JsonReader& operator=(const JsonReader&) = delete;

  bool has(const std::string& key) {
    return node_.contains(key) && !node_.at(key).is_null();
  }

  // Marks a key as recognized without reading it.
  void allow(const std::string& key) { seen_.push_back(key); }

  const nlohmann::json* get(const std::string& key) {
    allow(key);
    if (!has(key)) return nullptr;
    return &node_.at(key);
  }

  void number(const std::string& key, double& out) {
    if (const nlohmann::json* v = get(key)) {
      if (v->is_number())
        out = v->get<double>();
      else
        fail(key, "must be a number");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const nlohmann::json* v = get(key)) {
      if (v->is_number_integer())
        out = v->get<int>();
      else
        fail(key, "must be an integer");
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const nlohmann::json* v = get(key)) {
      if (v->is_number_unsigned())
        out = v->get<std::uint64_t>();
      else
        fail(key, "must be a non-negative integer");
    }
  }

  // Accepts either a scalar or a list of scalars.
  void int_list(const std::string& key, std::vector<int>& out) {
    const nlohmann::json* v = get(key);
    if (!v) return;
    std::vector<int> values;
    const auto take = [&](const nlohmann::json& e) {
      if (e.is_number_integer())
        values.push_back(e.get<int>());
      else
        fail(key, "entries must be integers");
    };
    if (v->is_array()) {
      for (const auto& e : *v) take(e);
      if (v->empty()) fail(key, "list must be nonempty");
    } else {
      take(*v);
    }
    if (!values.empty()) out = values;
  }

  void string_list(const std::string& key, std::vector<std::string>& out) {
    const nlohmann::json* v = get(key);
    if (!v) return;
    std::vector<std::string> values;
    const auto take = [&](const nlohmann::json& e) {
      if (e.is_string())
        values.push_back(e.get<std::string>());
      else
        fail(key, "entries must be strings");
    };
    if (v->is_array()) {
      for (const auto& e : *v) take(e);
      if (v->empty()) fail(key, "list must be nonempty");
    } else {
      take(*v);
    }
    if (!values.empty()) out = values;
  }

  void fail(const std::string& key, const std::string& why) {
    issues_.push_back(scope_ + "." + key + ": " + why);
  }

  const nlohmann::json& node() const { return node_; }
  const std::string& scope() const { return scope_; }
  std::vector<std::string>& issues() { return issues_; }

 private:
  const nlohmann::json& node_;
  std::string scope_;
  std::vector<std::string>& issues_;
  std::vector<std::string> seen_;
};

inline void parse_radio(const nlohmann::json& node, RadioParams& radio,
                        std::vector<std::string>& issues) {
  if (!node.is_object()) {
    issues.push_back("radio: must be an object");
    return;
  }
  JsonReader r(node, "radio", issues);
  r.number("uplink_tx_power_dbm", radio.uplink_tx_power_dbm);
  r.number("downlink_tx_power_dbm", radio.downlink_tx_power_dbm);
  r.number("bandwidth_ul_hz", radio.bandwidth_ul_hz);
  r.number("bandwidth_dl_hz", radio.bandwidth_dl_hz);
  r.number("noise_psd_dbm_hz", radio.noise_psd_dbm_hz);
  r.number("shadowing_sigma_db", radio.shadowing_sigma_db);
  r.number("cell_radius_min_km", radio.cell_radius_min_km);
  r.number("cell_radius_max_km", radio.cell_radius_max_km);
}

inline void parse_compute(const nlohmann::json& node, ComputeProfile& compute,
                          std::vector<std::string>& issues) {
  if (!node.is_object()) {
    issues.push_back("compute: must be an object");
    return;
  }
  JsonReader r(node, "compute", issues);
  r.number("server_cpu_hz", compute.server_cpu_hz);
  r.number("device_intensity_flops_per_cycle", compute.device_intensity_flops_per_cycle);
  r.number("server_intensity_flops_per_cycle", compute.server_intensity_flops_per_cycle);
}

inline std::optional<std::vector<LayerSpec>> parse_layer_list(
    const nlohmann::json& node, std::vector<std::string>& issues) {
  if (node.is_string()) {
    if (node.get<std::string>() == "mnist_lenet") return mnist_lenet_layers();
    issues.push_back("model.layers: unknown stack name \"" + node.get<std::string>() +
                     "\" (known: mnist_lenet)");
    return std::nullopt;
  }
  if (!node.is_array()) {
    issues.push_back("model.layers: must be \"mnist_lenet\" or a list of layer entries");
    return std::nullopt;
  }
  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const nlohmann::json& e = node.at(i);
    const std::string where = "model.layers[" + std::to_string(i) + "]";
    if (!e.is_array() || e.empty() || !e.at(0).is_string()) {
      issues.push_back(where + ": expected [\"conv\", filters, kernel], [\"pool\", kernel] or [\"fc\", units]");
      return std::nullopt;
    }
    const std::string kind = e.at(0).get<std::string>();
    const auto arg = [&](std::size_t k) -> std::optional<int> {
      if (e.size() <= k || !e.at(k).is_number_integer()) return std::nullopt;
      return e.at(k).get<int>();
    };
    if (kind == "conv" && e.size() == 3 && arg(1) && arg(2)) {
      layers.push_back(LayerSpec::conv(*arg(1), *arg(2)));
    } else if (kind == "pool" && e.size() == 2 && arg(1)) {
      layers.push_back(LayerSpec::pool(*arg(1)));
    } else if (kind == "fc" && e.size() == 2 && arg(1)) {
      layers.push_back(LayerSpec::fc(*arg(1)));
    } else {
      issues.push_back(where + ": malformed entry");
      return std::nullopt;
    }
  }
  if (layers.empty()) {
    issues.push_back("model.layers: list must be nonempty");
    return std::nullopt;
  }
  return layers;
}

inline void parse_model(const nlohmann::json& node, ModelProfile& model,
                        std::vector<std::string>& issues) {
  if (!node.is_object()) {
    issues.push_back("model: must be an object");
    return;
  }
  static const std::array<const char*, 7> direct_only = {
      "device_model_bits",        "smashed_bits_per_batch",
      "grad_bits_per_batch",      "fwd_device_flops_per_sample",
      "bwd_device_flops_per_sample", "fwd_server_flops_per_sample",
      "bwd_server_flops_per_sample"};
  const bool layer_mode = node.contains("layers");
  bool direct_mode = false;
  for (const char* key : direct_only) direct_mode = direct_mode || node.contains(key);

  if (layer_mode && direct_mode) {
    issues.push_back("model: give either a layer stack or direct numbers, not both");
    return;
  }
  if (!layer_mode && !direct_mode) {
    issues.push_back(
        "model: expected a layer stack (\"layers\", ...) or direct numbers");
    return;
  }

  JsonReader r(node, "model", issues);
  if (layer_mode) {
    int cut_layer = 3, batch_size = 256, bits_per_value = 32;
    std::vector<int> input = {1, 28, 28};
    std::optional<std::vector<LayerSpec>> layers;
    if (const nlohmann::json* v = r.get("layers")) layers = parse_layer_list(*v, issues);
    r.integer("cut_layer", cut_layer);
    r.integer("batch_size", batch_size);
    r.integer("bits_per_value", bits_per_value);
    if (const nlohmann::json* v = r.get("input")) {
      if (v->is_array() && v->size() == 3 && v->at(0).is_number_integer() &&
          v->at(1).is_number_integer() && v->at(2).is_number_integer())
        input = {v->at(0).get<int>(), v->at(1).get<int>(), v->at(2).get<int>()};
      else
        r.fail("input", "must be [channels, height, width]");
    }
    if (!layers) return;
    try {
      model = derive_model_profile(*layers, cut_layer, batch_size, bits_per_value,
                                   input[0], input[1], input[2]);
    } catch (const std::exception& e) {
      issues.push_back(std::string("model: ") + e.what());
    }
  } else {
    ModelProfile m;
    r.number("device_model_bits", m.device_model_bits);
    r.number("smashed_bits_per_batch", m.smashed_bits_per_batch);
    r.number("grad_bits_per_batch", m.grad_bits_per_batch);
    r.number("fwd_device_flops_per_sample", m.fwd_device_flops_per_sample);
    r.number("bwd_device_flops_per_sample", m.bwd_device_flops_per_sample);
    r.number("fwd_server_flops_per_sample", m.fwd_server_flops_per_sample);
    r.number("bwd_server_flops_per_sample", m.bwd_server_flops_per_sample);
    r.integer("batch_size", m.batch_size);
    for (const char* key : direct_only)
      if (!node.contains(key))
        issues.push_back(std::string("model.") + key + ": required in direct mode");
    if (!node.contains("batch_size"))
      issues.push_back("model.batch_size: required in direct mode");
    try {
      m.validate();
      model = m;
    } catch (const std::exception& e) {
      issues.push_back(std::string("model: ") + e.what());
    }
  }
}

inline void parse_snr_override(const nlohmann::json& node,
                               std::optional<SnrOverride>& override_out,
                               std::vector<std::string>& issues) {
  if (!node.is_object()) {
    issues.push_back("snr_override: must be an object");
    return;
  }
  JsonReader r(node, "snr_override", issues);
  const nlohmann::json* uniform = r.get("uniform_db");
  const nlohmann::json* explicit_list = r.get("snrs_linear");
  if ((uniform != nullptr) == (explicit_list != nullptr)) {
    issues.push_back("snr_override: give exactly one of uniform_db or snrs_linear");
    return;
  }
  SnrOverride ov;
  if (uniform) {
    if (!uniform->is_array() || uniform->size() != 2 || !uniform->at(0).is_number() ||
        !uniform->at(1).is_number()) {
      r.fail("uniform_db", "must be [lo_db, hi_db]");
      return;
    }
    ov.mode = SnrOverride::Mode::uniform_db;
    ov.lo_db = uniform->at(0).get<double>();
    ov.hi_db = uniform->at(1).get<double>();
    if (!(ov.lo_db <= ov.hi_db)) {
      r.fail("uniform_db", "needs lo_db <= hi_db");
      return;
    }
  } else {
    if (!explicit_list->is_array() || explicit_list->empty()) {
      r.fail("snrs_linear", "must be a nonempty list of positive numbers");
      return;
    }
    ov.mode = SnrOverride::Mode::snrs_linear;
    for (const auto& e : *explicit_list) {
      if (!e.is_number() || !(e.get<double>() > 0.0)) {
        r.fail("snrs_linear", "must be a nonempty list of positive numbers");
        return;
      }
      ov.snrs_linear.push_back(e.get<double>());
    }
  }
  override_out = ov;
}

}  // namespace detail

// Parses and validates a configuration object, filling defaults for omitted
// fields.  All problems are collected and reported together.
inline ExperimentSpec parse_spec(const nlohmann::json& root) {
  std::vector<std::string> issues;
  if (!root.is_object()) throw ConfigError({"top level: must be a JSON object"});

  ExperimentSpec spec;
  spec.model = derive_model_profile(mnist_lenet_layers(), 3, 256, 32);
  {
    detail::JsonReader r(root, "config", issues);
    if (const nlohmann::json* v = r.get("radio"))
      detail::parse_radio(*v, spec.radio, issues);
    if (const nlohmann::json* v = r.get("model"))
      detail::parse_model(*v, spec.model, issues);
    if (const nlohmann::json* v = r.get("compute"))
      detail::parse_compute(*v, spec.compute, issues);
    r.number("device_cpu_hz", spec.device_cpu_hz);
    r.int_list("n_devices", spec.n_devices);
    r.integer("group_size", spec.group_size);
    r.integer("cluster_size_k", spec.cluster_size_k);
    r.integer("q", spec.q);
    std::vector<std::string> algorithm_names, protocol_names;
    r.string_list("algorithm", algorithm_names);
    r.string_list("protocol", protocol_names);
    if (!algorithm_names.empty()) {
      spec.algorithms.clear();
      for (const std::string& name : algorithm_names) {
        if (std::optional<Algorithm> a = algorithm_from_string(name))
          spec.algorithms.push_back(*a);
        else
          r.fail("algorithm", "unknown value \"" + name + "\"");
      }
    }
    if (!protocol_names.empty()) {
      spec.protocols.clear();
      for (const std::string& name : protocol_names) {
        if (std::optional<Protocol> p = protocol_from_string(name))
          spec.protocols.push_back(*p);
        else
          r.fail("protocol", "unknown value \"" + name + "\"");
      }
    }
    r.integer("replications", spec.replications);
    r.seed("seed", spec.seed);
    if (const nlohmann::json* v = r.get("snr_override"))
      detail::parse_snr_override(*v, spec.snr_override, issues);
    if (const nlohmann::json* v = r.get("md_scope")) {
      if (v->is_string()) {
        if (std::optional<MdScope> s = md_scope_from_string(v->get<std::string>()))
          spec.md_scope = *s;
        else
          r.fail("md_scope", "unknown value \"" + v->get<std::string>() + "\"");
      } else {
        r.fail("md_scope", "must be a string");
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  // Cross-field invariants, collected as well.
  try {
    spec.radio.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("radio: ") + e.what());
  }
  try {
    spec.compute.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("compute: ") + e.what());
  }
  if (!(spec.device_cpu_hz > 0.0)) issues.push_back("device_cpu_hz: must be positive");
  if (spec.group_size != 2)
    issues.push_back("group_size: only pair grouping (group_size = 2) is supported");
  if (spec.replications < 1) issues.push_back("replications: must be >= 1");
  if (spec.algorithms.empty()) issues.push_back("algorithm: list must be nonempty");
  if (spec.protocols.empty()) issues.push_back("protocol: list must be nonempty");

  int max_n = 0;
  for (int n : spec.n_devices) {
    max_n = std::max(max_n, n);
    if (n < 2) issues.push_back("n_devices: every value must be >= 2");
    if (n % 2 != 0)
      issues.push_back("n_devices: every value must be even (pair grouping)");
  }
  const bool wants_exhaustive =
      std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::exhaustive) !=
      spec.algorithms.end();
  if (wants_exhaustive && max_n > 14)
    issues.push_back("algorithm: exhaustive search is capped at n_devices <= 14");

  const bool wants_clusters =
      std::find(spec.protocols.begin(), spec.protocols.end(), Protocol::splitmac) !=
          spec.protocols.end() ||
      std::find(spec.protocols.begin(), spec.protocols.end(), Protocol::cluster_fdma) !=
          spec.protocols.end();
  if (wants_clusters) {
    if (spec.cluster_size_k < 2 || spec.cluster_size_k % 2 != 0) {
      issues.push_back("cluster_size_k: must be a positive multiple of the group size");
    } else {
      for (int n : spec.n_devices)
        if (n % spec.cluster_size_k != 0)
          issues.push_back("n_devices: " + std::to_string(n) +
                           " is not a multiple of cluster_size_k");
      const int groups_per_cluster = spec.cluster_size_k / 2;
      if (spec.q < 1 || spec.q > groups_per_cluster)
        issues.push_back("q: must be in [1, cluster_size_k / group_size]");
    }
  }
  if (spec.snr_override &&
      spec.snr_override->mode == SnrOverride::Mode::snrs_linear) {
    for (int n : spec.n_devices)
      if (static_cast<int>(spec.snr_override->snrs_linear.size()) != n)
        issues.push_back("snr_override.snrs_linear: length must equal n_devices (" +
                         std::to_string(n) + ")");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return spec;
}

// Loads a configuration file.  A missing/unreadable file is an I/O error; bad
// JSON or bad contents raise ConfigError.
inline ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return parse_spec(root);
}

// --- Sweep execution --------------------------------------------------------

struct RunRow {
  int sweep_point = 0;
  int replication = 0;
  Algorithm algorithm = Algorithm::near_optimal;
  Protocol protocol = Protocol::splitmac;
  double uplink_latency_s = 0.0;  // sum of SDT and DMT step times
  double total_latency_s = 0.0;
  int violations = 0;  // pipelining-assumption failures (grouped-NOMA rows)

  // Step detail kept for summaries; not part of the CSV contract.
  double sdt_sum_s = 0.0;
  double igt_sum_s = 0.0;
  double dmt_sum_s = 0.0;
  double smp_per_device_s = 0.0;
  int groups = 0;

  bool error = false;
  std::string error_message;
};

struct RunResult {
  std::string spec_hash;
  std::vector<RunRow> rows;
};

inline std::uint64_t row_seed(std::uint64_t seed, int sweep_point, int replication) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_point));
  h = splitmix64(h ^ static_cast<std::uint64_t>(replication));
  return h;
}

inline constexpr std::uint64_t kPairingSeedTag = 0x517cc1b727220a95ull;

namespace detail {

inline std::vector<DeviceChannel> build_devices(const ExperimentSpec& spec, int n,
                                                std::uint64_t seed) {
  if (!spec.snr_override) return place_devices(n, spec.radio, seed, spec.device_cpu_hz);
  const SnrOverride& ov = *spec.snr_override;
  std::vector<double> snrs;
  if (ov.mode == SnrOverride::Mode::uniform_db) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
      snrs.push_back(std::pow(10.0, rng.uniform(ov.lo_db, ov.hi_db) / 10.0));
  } else {
    snrs = ov.snrs_linear;
  }
  std::sort(snrs.begin(), snrs.end());
  std::vector<DeviceChannel> devices(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    DeviceChannel& dev = devices[static_cast<std::size_t>(i)];
    dev.device_id = i;
    dev.distance_km = 0.0;  // no geometry behind an override
    dev.snr_ul_linear = snrs[static_cast<std::size_t>(i)];
    dev.snr_dl_linear = snrs[static_cast<std::size_t>(i)];
    dev.cpu_hz = spec.device_cpu_hz;
  }
  return devices;
}

inline GroupingPlan run_algorithm(Algorithm algorithm, const std::vector<double>& snrs,
                                  std::uint64_t seed) {
  switch (algorithm) {
    case Algorithm::balanced: return snr_balanced_pairing(snrs);
    case Algorithm::ordered: return snr_ordered_pairing(snrs);
    case Algorithm::near_optimal: return near_optimal_pairing(snrs);
    // The optimal matching does not depend on the payload (all pair latencies
    // scale linearly with it), so enumerate with a unit payload.
    case Algorithm::exhaustive: return exhaustive_pairing(snrs, 1.0).first;
    case Algorithm::random:
      return random_pairing(snrs, splitmix64(seed ^ kPairingSeedTag));
  }
  throw std::logic_error("run_algorithm: unreachable");
}

inline ClusterPlan make_cluster_plan(const ExperimentSpec& spec,
                                     const GroupingPlan& grouping) {
  ClusterPlan plan;
  plan.groups_in_order = grouping.groups;
  plan.group_size = spec.group_size;
  plan.groups_per_cluster = spec.groups_per_cluster();
  plan.local_update_period_groups = spec.q;
  return plan;
}

}  // namespace detail

// Runs the full (sweep point x replication x algorithm x protocol) grid.
// A failing cell is recorded as an error row (NaN latencies) rather than
// aborting the sweep.
inline RunResult run_sweep(const ExperimentSpec& spec) {
  RunResult result;
  result.spec_hash = spec_hash(spec);
  for (int n : spec.n_devices) {
    for (int rep = 0; rep < spec.replications; ++rep) {
      const std::uint64_t seed = row_seed(spec.seed, n, rep);
      std::vector<DeviceChannel> devices;
      std::string scenario_error;
      try {
        devices = detail::build_devices(spec, n, seed);
      } catch (const std::exception& e) {
        scenario_error = e.what();
      }
      std::vector<double> snrs;
      for (const DeviceChannel& dev : devices) snrs.push_back(dev.snr_ul_linear);

      for (Algorithm algorithm : spec.algorithms) {
        for (Protocol protocol : spec.protocols) {
          RunRow row;
          row.sweep_point = n;
          row.replication = rep;
          row.algorithm = algorithm;
          row.protocol = protocol;
          try {
            if (!scenario_error.empty()) throw std::runtime_error(scenario_error);
            LatencyBreakdown breakdown;
            switch (protocol) {
              case Protocol::splitmac: {
                const ClusterPlan plan = detail::make_cluster_plan(
                    spec, detail::run_algorithm(algorithm, snrs, seed));
                breakdown = splitmac_round_latency(plan, devices, spec.model,
                                                   spec.compute, spec.radio,
                                                   spec.md_scope);
                row.violations = static_cast<int>(
                    pipeline_assumption_check(breakdown, plan).size());
                break;
              }
              case Protocol::vanilla:
                breakdown = vanilla_sl_round_latency(devices, spec.model, spec.compute,
                                                     spec.radio);
                break;
              case Protocol::cluster_fdma: {
                const ClusterPlan plan = detail::make_cluster_plan(
                    spec, detail::run_algorithm(algorithm, snrs, seed));
                breakdown = cluster_fdma_round_latency(plan, devices, spec.model,
                                                       spec.compute, spec.radio,
                                                       spec.md_scope);
                break;
              }
            }
            row.uplink_latency_s = breakdown.sum_sdt() + breakdown.sum_dmt();
            row.total_latency_s = breakdown.total_s;
            row.sdt_sum_s = breakdown.sum_sdt();
            row.igt_sum_s = breakdown.sum_igt();
            row.dmt_sum_s = breakdown.sum_dmt();
            row.smp_per_device_s = breakdown.smp_per_device_s;
            row.groups = breakdown.group_count();
          } catch (const std::exception& e) {
            row.error = true;
            row.error_message = e.what();
            row.uplink_latency_s = std::numeric_limits<double>::quiet_NaN();
            row.total_latency_s = std::numeric_limits<double>::quiet_NaN();
            row.violations = 0;
          }
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const RunRow& a, const RunRow& b) {
              return std::make_tuple(a.sweep_point, a.replication,
                                     static_cast<int>(a.algorithm),
                                     static_cast<int>(a.protocol)) <
                     std::make_tuple(b.sweep_point, b.replication,
                                     static_cast<int>(b.algorithm),
                                     static_cast<int>(b.protocol));
            });
  return result;
}

// --- Emission ---------------------------------------------------------------

// Shortest decimal form that parses back to the same double ("nan" for error
// markers).
inline std::string format_double(double value) {
  std::array<char, 64> buf{};
  const std::to_chars_result res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

inline std::string csv_string(const RunResult& result) {
  std::string out =
      "sweep_point,replication,algorithm,protocol,uplink_latency_s,total_latency_s,"
      "violations\n";
  for (const RunRow& row : result.rows) {
    out += std::to_string(row.sweep_point);
    out += ',';
    out += std::to_string(row.replication);
    out += ',';
    out += to_string(row.algorithm);
    out += ',';
    out += to_string(row.protocol);
    out += ',';
    out += format_double(row.uplink_latency_s);
    out += ',';
    out += format_double(row.total_latency_s);
    out += ',';
    out += std::to_string(row.violations);
    out += '\n';
  }
  return out;
}

inline void emit_csv(const RunResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << csv_string(result);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// --- Summaries --------------------------------------------------------------

struct SummaryRow {
  int sweep_point = 0;
  Algorithm algorithm = Algorithm::near_optimal;
  Protocol protocol = Protocol::splitmac;
  int rows = 0;        // clean rows aggregated
  int error_rows = 0;
  double mean_uplink_s = 0.0;
  double std_uplink_s = 0.0;
  double mean_total_s = 0.0;
  double std_total_s = 0.0;
  double mean_sdt_s = 0.0;         // per-round sums
  double mean_smp_device_s = 0.0;  // per device
  double mean_igt_s = 0.0;
  double mean_dmt_s = 0.0;
  long violations = 0;
};

// Aggregates rows per (sweep_point, algorithm, protocol), in row order.
// Means/stds cover clean rows only; std is the sample standard deviation.
inline std::vector<SummaryRow> summarize(const RunResult& result) {
  std::vector<SummaryRow> summary;
  std::vector<std::vector<const RunRow*>> cells;
  for (const RunRow& row : result.rows) {
    if (summary.empty() || summary.back().sweep_point != row.sweep_point ||
        summary.back().algorithm != row.algorithm ||
        summary.back().protocol != row.protocol) {
      SummaryRow cell;
      cell.sweep_point = row.sweep_point;
      cell.algorithm = row.algorithm;
      cell.protocol = row.protocol;
      summary.push_back(cell);
      cells.emplace_back();
    }
    cells.back().push_back(&row);
  }
  for (std::size_t i = 0; i < summary.size(); ++i) {
    SummaryRow& cell = summary[i];
    double n = 0.0;
    double sum_up = 0.0, sum_tot = 0.0, sum_sdt = 0.0, sum_smp = 0.0, sum_igt = 0.0,
           sum_dmt = 0.0;
    for (const RunRow* row : cells[i]) {
      if (row->error) {
        ++cell.error_rows;
        continue;
      }
      ++cell.rows;
      n += 1.0;
      sum_up += row->uplink_latency_s;
      sum_tot += row->total_latency_s;
      sum_sdt += row->sdt_sum_s;
      sum_smp += row->smp_per_device_s;
      sum_igt += row->igt_sum_s;
      sum_dmt += row->dmt_sum_s;
      cell.violations += row->violations;
    }
    if (n > 0.0) {
      cell.mean_uplink_s = sum_up / n;
      cell.mean_total_s = sum_tot / n;
      cell.mean_sdt_s = sum_sdt / n;
      cell.mean_smp_device_s = sum_smp / n;
      cell.mean_igt_s = sum_igt / n;
      cell.mean_dmt_s = sum_dmt / n;
      if (n > 1.0) {
        double acc_up = 0.0, acc_tot = 0.0;
        for (const RunRow* row : cells[i]) {
          if (row->error) continue;
          acc_up += (row->uplink_latency_s - cell.mean_uplink_s) *
                    (row->uplink_latency_s - cell.mean_uplink_s);
          acc_tot += (row->total_latency_s - cell.mean_total_s) *
                     (row->total_latency_s - cell.mean_total_s);
        }
        cell.std_uplink_s = std::sqrt(acc_up / (n - 1.0));
        cell.std_total_s = std::sqrt(acc_tot / (n - 1.0));
      }
    }
  }
  return summary;
}

// Renders the aggregate table (display rounding only; data files keep full
// precision).
inline std::string emit_summary(const RunResult& result) {
  const std::vector<SummaryRow> summary = summarize(result);
  std::ostringstream out;
  char line[320];
  std::snprintf(line, sizeof(line), "%-12s %-12s %-12s %6s %14s %14s %14s %14s %12s %12s %12s %12s %7s %6s\n",
                "sweep_point", "algorithm", "protocol", "rows", "mean_uplink_s",
                "std_uplink_s", "mean_total_s", "std_total_s", "mean_sdt_s",
                "mean_smp_s", "mean_igt_s", "mean_dmt_s", "viol", "errors");
  out << line;
  for (const SummaryRow& cell : summary) {
    std::snprintf(line, sizeof(line),
                  "%-12d %-12s %-12s %6d %14.6g %14.6g %14.6g %14.6g %12.6g %12.6g %12.6g %12.6g %7ld %6d\n",
                  cell.sweep_point, to_string(cell.algorithm), to_string(cell.protocol),
                  cell.rows, cell.mean_uplink_s, cell.std_uplink_s, cell.mean_total_s,
                  cell.std_total_s, cell.mean_sdt_s, cell.mean_smp_device_s,
                  cell.mean_igt_s, cell.mean_dmt_s, cell.violations, cell.error_rows);
    out << line;
  }
  return out.str();
}

}  // namespace splitmac
