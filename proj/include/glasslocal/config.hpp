#pragma once

// Experiment configuration: a published JSON schema, a validator for the
// subset of JSON Schema it uses, and default materialization per command.

#include <cmath>
#include <cstdint>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace glasslocal {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& pointer, const std::string& message)
      : std::invalid_argument("config " + (pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"gen-disorder", "thresholds", "se",     "amp",   "tap",       "sample",
                                                 "exact",        "glauber",    "w2",     "chaos", "stability", "validate"};
  return names;
}

inline constexpr const char* kConfigSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "glasslocal experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "command": {"type": "string", "enum": ["gen-disorder", "thresholds", "se", "amp", "tap", "sample", "exact", "glauber", "w2", "chaos", "stability", "validate"]},
    "mixture": {
      "description": "degree p -> c_p^2",
      "type": "object",
      "patternProperties": {"^[0-9]+$": {"type": "number", "minimum": 0}},
      "additionalProperties": false
    },
    "n": {"type": "integer", "minimum": 1},
    "beta": {"type": "number", "minimum": 0},
    "seed": {"type": "integer", "minimum": 0},
    "tensor": {"type": "string", "description": "input disorder file; overrides generation from (mixture, n, seed)"},
    "kind": {"type": "string", "enum": ["random", "planted"]},
    "planted_beta": {"type": "number", "minimum": 0},
    "t": {"type": "number", "minimum": 0},
    "K": {"type": "integer", "minimum": 1},
    "t_max": {"type": "number", "minimum": 0},
    "t_points": {"type": "integer", "minimum": 1},
    "beta3_c0": {"type": "number", "exclusiveMinimum": 0},
    "sampler": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "L": {"type": "integer", "minimum": 1},
        "K_amp": {"type": "integer", "minimum": 1},
        "K_ngd": {"type": "integer", "minimum": 1},
        "eta": {"type": "number", "exclusiveMinimum": 0},
        "Gamma": {"type": "number"},
        "warm_start": {"type": "boolean"},
        "keep_trajectory": {"type": "boolean"}
      }
    },
    "tap": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "q": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "Gamma": {"type": "number"},
        "m_source": {"type": "string", "enum": ["amp", "ngd", "random"]}
      }
    },
    "replicas": {"type": "integer", "minimum": 1},
    "M": {"type": "integer", "minimum": 0},
    "sweeps": {"type": "integer", "minimum": 0},
    "burn_in": {"type": "integer", "minimum": 0},
    "thin": {"type": "integer", "minimum": 1},
    "s_list": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    "beta_list": {"type": "array", "items": {"type": "number", "minimum": 0}},
    "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    "batch_a": {"type": "string"},
    "batch_b": {"type": "string"},
    "batch_out": {"type": "string"},
    "trajectory_out": {"type": "string"},
    "output": {"type": "string"},
    "threads": {"type": "integer", "minimum": 1}
  }
})json";

inline const nlohmann::json& config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(kConfigSchema);
  return schema;
}

namespace detail {

inline bool has_type(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()));
  if (type == "number") return v.is_number();
  return false;
}

inline std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

inline void validate_node(const nlohmann::json& v, const nlohmann::json& s, const std::string& ptr) {
  if (s.contains("type") && !has_type(v, s["type"].get<std::string>()))
    throw ConfigError(ptr, "expected " + s["type"].get<std::string>());
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) throw ConfigError(ptr, "value " + v.dump() + " is not one of " + s["enum"].dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) throw ConfigError(ptr, "must be >= " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>()) throw ConfigError(ptr, "must be <= " + s["maximum"].dump());
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
      throw ConfigError(ptr, "must be > " + s["exclusiveMinimum"].dump());
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
      throw ConfigError(ptr, "must be < " + s["exclusiveMaximum"].dump());
  }
  if (v.is_array() && s.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) validate_node(v[i], s["items"], ptr + "/" + std::to_string(i));
  }
  if (v.is_object()) {
    const auto props = s.value("properties", nlohmann::json::object());
    const auto patterns = s.value("patternProperties", nlohmann::json::object());
    for (const auto& [key, child] : v.items()) {
      const std::string cptr = ptr + "/" + escape_pointer(key);
      if (props.contains(key)) {
        validate_node(child, props[key], cptr);
        continue;
      }
      bool matched = false;
      for (const auto& [pattern, sub] : patterns.items()) {
        if (std::regex_search(key, std::regex(pattern))) {
          validate_node(child, sub, cptr);
          matched = true;
        }
      }
      if (!matched && s.value("additionalProperties", true) == false) throw ConfigError(cptr, "unknown key '" + key + "'");
    }
  }
}

}  // namespace detail

/// Throws ConfigError naming the offending JSON pointer.
inline void validate_config(const nlohmann::json& cfg) { detail::validate_node(cfg, config_schema(), ""); }

/// Fills every default the command reads. Keys the command does not use
/// are left as given.
inline nlohmann::json resolve_config(nlohmann::json cfg, const std::string& command) {
  validate_config(cfg);
  auto def = [&](const char* key, nlohmann::json value) {
    if (!cfg.contains(key)) cfg[key] = std::move(value);
  };
  auto def_in = [&](const char* obj, const char* key, nlohmann::json value) {
    if (!cfg.contains(obj)) cfg[obj] = nlohmann::json::object();
    if (!cfg[obj].contains(key)) cfg[obj][key] = std::move(value);
  };
  cfg["command"] = command;
  def("mixture", nlohmann::json{{"2", 0.5}});
  def("seed", 0);
  const bool disorder = command == "gen-disorder" || command == "amp" || command == "tap" || command == "sample" ||
                        command == "exact" || command == "glauber";
  if (disorder || command == "chaos" || command == "stability") def("n", 100);
  if (command != "thresholds" && command != "w2" && command != "validate") def("beta", 0.5);
  if (disorder && !cfg.contains("tensor")) {
    def("kind", command == "amp" || command == "tap" ? "planted" : "random");
    if (cfg["kind"] == "planted") def("planted_beta", cfg["beta"]);
  }
  if (command == "thresholds") def("beta3_c0", 0.25);
  if (command == "se") {
    def("t_max", 10.0);
    def("t_points", 101);
  }
  if (command == "amp" || command == "tap") {
    def("t", 1.0);  // observation y = t x + B(t) of the planted x
    def("K", command == "amp" ? 10 : 30);
  }
  if (command == "tap") {
    def_in("tap", "m_source", "ngd");
    def_in("tap", "Gamma", 1.0);
    def_in("sampler", "K_ngd", 100);
    def_in("sampler", "eta", 0.1);
  }
  if (command == "sample" || command == "stability") {
    def_in("sampler", "delta", 0.05);
    def_in("sampler", "L", 400);
    def_in("sampler", "K_amp", 30);
    def_in("sampler", "K_ngd", 100);
    def_in("sampler", "eta", 0.1);
    def_in("sampler", "Gamma", 1.0);
    def_in("sampler", "warm_start", false);
    def_in("sampler", "keep_trajectory", false);
    def("replicas", command == "sample" ? 1 : 4);
  }
  if (command == "exact") {
    def("t", 0.0);
    def("M", 0);
  }
  if (command == "glauber") {
    def("sweeps", 1000);
    def("burn_in", 100);
    def("thin", 10);
  }
  if (command == "chaos" || command == "stability") {
    def("s_list", nlohmann::json::array({0.0, 0.1, 0.3, 1.0}));
    def("seeds", nlohmann::json::array({0, 1, 2, 3, 4}));
  }
  if (command == "chaos") def("M", 1000);
  if (command == "stability") def("beta_list", nlohmann::json::array());
  cfg.erase("threads");
  validate_config(cfg);
  return cfg;
}

}  // namespace glasslocal
