#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plgw/lawfit.hpp"
#include "plgw/solver.hpp"

namespace plgw {

struct ConfigViolation {
  int line;
  std::string message;
};

/// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  static std::string render(const std::vector<ConfigViolation>& v);
  std::vector<ConfigViolation> violations_;
};

struct ConfigValue {
  enum class Type { number, boolean, string, table };
  Type type = Type::number;
  double num = 0.0;
  bool flag = false;
  std::string str;
  std::map<std::string, ConfigValue> table;
  int line = 0;
};

/// Flat sectioned key = value text (a TOML-compatible subset): [section]
/// headers, numbers, booleans, quoted strings, and one level of inline
/// tables. Physical quantities are quoted "value unit" strings.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);  // syntax errors -> ConfigError

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  const ConfigValue* find(const std::string& key) const;
  const std::map<std::string, ConfigValue>& entries() const { return kv_; }
  const std::string& raw_text() const { return raw_; }

  // typed access; use after validation
  double num(const std::string& key) const;
  double num_or(const std::string& key, double fallback) const;
  int int_or(const std::string& key, int fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  /// Numeric value of a quoted "value unit" quantity.
  double quantity(const std::string& key) const;
  double quantity_or(const std::string& key, double fallback) const;

 private:
  std::map<std::string, ConfigValue> kv_;  // "section.key"
  std::string raw_;
};

struct KeySpec {
  enum class Kind { number, integer, boolean, string, quantity, table };
  Kind kind = Kind::number;
  bool required = true;
  std::string unit;  // expected unit for quantities; empty accepts any nonempty unit
};
using Schema = std::map<std::string, KeySpec>;

/// Checks presence, types, units, and rejects unknown keys; throws
/// ConfigError listing every violation with line numbers.
void validate_config(const RunConfig& cfg, const Schema& schema);

/// Full solve setup from a validated [problem]/[numerics]/[output] config.
struct SolveSetup {
  ProblemSpec problem;
  NumericsConfig numerics;
  int resolution_x = 257;
  int resolution_y = 257;
  std::string trajectory_path;  // empty: skip
  std::string manifest_path;
};

SolveSetup solve_setup_from_config(const RunConfig& cfg);

/// Scenario presets expanding to complete problems through the fitting
/// pipeline: "ditch-drainage" (interval between two ditches), "field-2d"
/// (rectangular field with boundary head H), "leibenson" (radial gas
/// filtration with kappa = 1/2, p = 3/2).
struct ScenarioExpansion {
  SolveSetup setup;
  nlohmann::json details;  // derived law, PDE coefficients, preset parameters
};

ScenarioExpansion expand_scenario(const RunConfig& cfg);

}  // namespace plgw
