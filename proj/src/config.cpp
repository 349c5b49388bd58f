#include "plgw/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <sstream>

#include "plgw/artifacts.hpp"
#include "plgw/barenblatt.hpp"
#include "plgw/constitutive.hpp"

namespace plgw {

std::string ConfigError::render(const std::vector<ConfigViolation>& v) {
  std::ostringstream os;
  os << "configuration invalid (" << v.size() << " problem" << (v.size() == 1 ? "" : "s") << "):";
  for (const auto& x : v) os << "\n  line " << x.line << ": " << x.message;
  return os.str();
}

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error(render(violations)), violations_(std::move(violations)) {}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& s, double& out) {
  try {
    size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_scalar(const std::string& tok, ConfigValue& v, int line) {
  v.line = line;
  if (tok == "true" || tok == "false") {
    v.type = ConfigValue::Type::boolean;
    v.flag = tok == "true";
    return true;
  }
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.type = ConfigValue::Type::string;
    v.str = tok.substr(1, tok.size() - 2);
    return true;
  }
  double num;
  if (parse_number(tok, num)) {
    v.type = ConfigValue::Type::number;
    v.num = num;
    return true;
  }
  return false;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// splits "a = 1, b = 2" at top level commas
std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_quotes = false;
  for (char c : s) {
    if (c == '"') in_quotes = !in_quotes;
    if (c == ',' && !in_quotes) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

// "value unit" -> (value, unit); fails when there is no unit token
bool parse_quantity_string(const std::string& s, double& value, std::string& unit) {
  const std::string t = trim(s);
  const size_t sp = t.find_first_of(" \t");
  if (sp == std::string::npos) return false;
  unit = trim(t.substr(sp + 1));
  if (unit.empty()) return false;
  return parse_number(trim(t.substr(0, sp)), value);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  cfg.raw_ = text;
  std::vector<ConfigViolation> violations;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        violations.push_back({lineno, "malformed section header"});
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_key(section)) violations.push_back({lineno, "invalid section name"});
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      violations.push_back({lineno, "expected key = value"});
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (!valid_key(key)) {
      violations.push_back({lineno, "invalid key name '" + key + "'"});
      continue;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.kv_.count(full)) {
      violations.push_back({lineno, "duplicate key '" + full + "'"});
      continue;
    }
    ConfigValue v;
    if (!val.empty() && val.front() == '{') {
      if (val.back() != '}') {
        violations.push_back({lineno, "unterminated inline table"});
        continue;
      }
      v.type = ConfigValue::Type::table;
      v.line = lineno;
      bool ok = true;
      for (const std::string& part : split_commas(val.substr(1, val.size() - 2))) {
        const std::string pt = trim(part);
        if (pt.empty()) continue;
        const size_t peq = pt.find('=');
        if (peq == std::string::npos) {
          violations.push_back({lineno, "inline table: expected key = value"});
          ok = false;
          break;
        }
        const std::string pk = trim(pt.substr(0, peq));
        ConfigValue pv;
        if (!valid_key(pk) || !parse_scalar(trim(pt.substr(peq + 1)), pv, lineno)) {
          violations.push_back({lineno, "inline table: bad entry '" + pt + "'"});
          ok = false;
          break;
        }
        v.table[pk] = pv;
      }
      if (!ok) continue;
    } else if (!parse_scalar(val, v, lineno)) {
      violations.push_back({lineno, "unparseable value '" + val + "'"});
      continue;
    }
    cfg.kv_[full] = v;
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

const ConfigValue* RunConfig::find(const std::string& key) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? nullptr : &it->second;
}

double RunConfig::num(const std::string& key) const {
  const ConfigValue* v = find(key);
  if (!v || v->type != ConfigValue::Type::number)
    throw std::logic_error("config: missing numeric key " + key);
  return v->num;
}

double RunConfig::num_or(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  return v && v->type == ConfigValue::Type::number ? v->num : fallback;
}

int RunConfig::int_or(const std::string& key, int fallback) const {
  const ConfigValue* v = find(key);
  return v && v->type == ConfigValue::Type::number ? static_cast<int>(v->num) : fallback;
}

bool RunConfig::bool_or(const std::string& key, bool fallback) const {
  const ConfigValue* v = find(key);
  return v && v->type == ConfigValue::Type::boolean ? v->flag : fallback;
}

std::string RunConfig::str(const std::string& key) const {
  const ConfigValue* v = find(key);
  if (!v || v->type != ConfigValue::Type::string)
    throw std::logic_error("config: missing string key " + key);
  return v->str;
}

std::string RunConfig::str_or(const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = find(key);
  return v && v->type == ConfigValue::Type::string ? v->str : fallback;
}

double RunConfig::quantity(const std::string& key) const {
  const ConfigValue* v = find(key);
  if (!v || v->type != ConfigValue::Type::string)
    throw std::logic_error("config: missing quantity key " + key);
  double value;
  std::string unit;
  if (!parse_quantity_string(v->str, value, unit))
    throw std::logic_error("config: key " + key + " is not a quantity");
  return value;
}

double RunConfig::quantity_or(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  return quantity(key);
}

void validate_config(const RunConfig& cfg, const Schema& schema) {
  std::vector<ConfigViolation> violations;
  for (const auto& [key, value] : cfg.entries()) {
    auto it = schema.find(key);
    if (it == schema.end()) {
      violations.push_back({value.line, "unknown key '" + key + "'"});
      continue;
    }
    const KeySpec& spec = it->second;
    switch (spec.kind) {
      case KeySpec::Kind::number:
        if (value.type != ConfigValue::Type::number)
          violations.push_back({value.line, "key '" + key + "' must be a number"});
        break;
      case KeySpec::Kind::integer:
        if (value.type != ConfigValue::Type::number ||
            value.num != std::floor(value.num))
          violations.push_back({value.line, "key '" + key + "' must be an integer"});
        break;
      case KeySpec::Kind::boolean:
        if (value.type != ConfigValue::Type::boolean)
          violations.push_back({value.line, "key '" + key + "' must be true or false"});
        break;
      case KeySpec::Kind::string:
        if (value.type != ConfigValue::Type::string)
          violations.push_back({value.line, "key '" + key + "' must be a quoted string"});
        break;
      case KeySpec::Kind::quantity: {
        if (value.type == ConfigValue::Type::number) {
          violations.push_back(
              {value.line, "key '" + key + "' is a physical quantity and needs a unit, e.g. \"" +
                               format_double(value.num) + " " +
                               (spec.unit.empty() ? "m" : spec.unit) + "\""});
          break;
        }
        if (value.type != ConfigValue::Type::string) {
          violations.push_back({value.line, "key '" + key + "' must be a quoted \"value unit\""});
          break;
        }
        double num;
        std::string unit;
        if (!parse_quantity_string(value.str, num, unit)) {
          violations.push_back({value.line, "key '" + key + "' must look like \"value unit\""});
          break;
        }
        if (!spec.unit.empty() && unit != spec.unit)
          violations.push_back(
              {value.line, "key '" + key + "' expects unit " + spec.unit + ", got " + unit});
        break;
      }
      case KeySpec::Kind::table:
        if (value.type != ConfigValue::Type::table)
          violations.push_back({value.line, "key '" + key + "' must be an inline table { ... }"});
        break;
    }
  }
  for (const auto& [key, spec] : schema) {
    if (spec.required && !cfg.has(key))
      violations.push_back({0, "missing required key '" + key + "'"});
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

// ---------------------------------------------------------------------------
// solve setup
// ---------------------------------------------------------------------------

namespace {

void check_table_keys(const ConfigValue& table, const std::string& owner,
                      const std::vector<std::string>& allowed,
                      std::vector<ConfigViolation>& violations) {
  for (const auto& [k, v] : table.table)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      violations.push_back({v.line, owner + ": unknown entry '" + k + "'"});
}

double table_num(const ConfigValue& table, const std::string& owner, const std::string& key,
                 std::vector<ConfigViolation>& violations) {
  auto it = table.table.find(key);
  if (it == table.table.end() || it->second.type != ConfigValue::Type::number) {
    violations.push_back({table.line, owner + ": missing numeric entry '" + key + "'"});
    return 0.0;
  }
  return it->second.num;
}

std::string table_str(const ConfigValue& table, const std::string& owner, const std::string& key,
                      std::vector<ConfigViolation>& violations) {
  auto it = table.table.find(key);
  if (it == table.table.end() || it->second.type != ConfigValue::Type::string) {
    violations.push_back({table.line, owner + ": missing string entry '" + key + "'"});
    return {};
  }
  return it->second.str;
}

BFunction b_from_table(const ConfigValue& v, double problem_p,
                       std::vector<ConfigViolation>& violations) {
  const std::string kind = table_str(v, "b", "kind", violations);
  if (kind == "identity") {
    check_table_keys(v, "b", {"kind"}, violations);
    return BFunction::identity();
  }
  if (kind == "power_root") {
    check_table_keys(v, "b", {"kind", "scale", "k"}, violations);
    const double scale = table_num(v, "b", "scale", violations);
    const double k = table_num(v, "b", "k", violations);
    if (!violations.empty()) return BFunction::identity();
    return BFunction::power_root(scale, k);
  }
  if (kind == "aquifer_head") {
    check_table_keys(v, "b", {"kind", "phi_eff", "p", "H"}, violations);
    const double phi = table_num(v, "b", "phi_eff", violations);
    const double p = table_num(v, "b", "p", violations);
    const double H = table_num(v, "b", "H", violations);
    if (std::abs(p - problem_p) > 1e-12 * std::max(1.0, std::abs(problem_p)))
      violations.push_back({v.line, "b: aquifer_head p must match problem.p"});
    if (!violations.empty()) return BFunction::identity();
    return BFunction::aquifer_head(phi, p, H);
  }
  if (kind == "leibenson") {
    check_table_keys(v, "b", {"kind", "kappa"}, violations);
    auto it = v.table.find("kappa");
    const double kappa = it != v.table.end() ? it->second.num : 0.5;
    if (!violations.empty()) return BFunction::identity();
    return BFunction::leibenson(kappa);
  }
  violations.push_back({v.line, "b: unknown kind '" + kind + "'"});
  return BFunction::identity();
}

SpaceTimeFn f_from_table(const ConfigValue& v, std::vector<ConfigViolation>& violations) {
  const std::string kind = table_str(v, "f", "kind", violations);
  if (kind == "zero") {
    check_table_keys(v, "f", {"kind"}, violations);
    return SpaceTimeFn{};
  }
  if (kind == "constant") {
    check_table_keys(v, "f", {"kind", "value"}, violations);
    const double value = table_num(v, "f", "value", violations);
    return [value](double, double, double) { return value; };
  }
  if (kind == "csv") {
    check_table_keys(v, "f", {"kind", "path"}, violations);
    const std::string path = table_str(v, "f", "path", violations);
    if (!violations.empty()) return SpaceTimeFn{};
    auto grid = std::make_shared<GriddedField>(GriddedField::from_csv(path));
    return [grid](double x, double y, double) { return (*grid)(x, y); };
  }
  violations.push_back({v.line, "f: unknown kind '" + kind + "'"});
  return SpaceTimeFn{};
}

SpaceFn u0_from_table(const ConfigValue& v, const Domain& domain, double problem_p,
                      std::vector<ConfigViolation>& violations) {
  const std::string kind = table_str(v, "u0", "kind", violations);
  if (kind == "zero") {
    check_table_keys(v, "u0", {"kind"}, violations);
    return SpaceFn{};
  }
  if (kind == "constant") {
    check_table_keys(v, "u0", {"kind", "value"}, violations);
    const double value = table_num(v, "u0", "value", violations);
    return [value](double, double) { return value; };
  }
  if (kind == "sin_pi") {
    check_table_keys(v, "u0", {"kind", "amplitude"}, violations);
    const double amp = table_num(v, "u0", "amplitude", violations);
    if (domain.kind() == Domain::Kind::interval) {
      const auto iv = domain.as_interval();
      return [amp, iv](double x, double) { return amp * std::sin(M_PI * (x - iv.a) / (iv.b - iv.a)); };
    }
    if (domain.kind() == Domain::Kind::rectangle) {
      const auto r = domain.as_rectangle();
      return [amp, r](double x, double y) {
        return amp * std::sin(M_PI * (x - r.ax) / (r.bx - r.ax)) *
               std::sin(M_PI * (y - r.ay) / (r.by - r.ay));
      };
    }
    violations.push_back({v.line, "u0: sin_pi needs an interval or rectangle domain"});
    return SpaceFn{};
  }
  if (kind == "bump") {
    check_table_keys(v, "u0", {"kind", "amplitude", "center", "width", "center_y", "width_y"},
                     violations);
    const double amp = table_num(v, "u0", "amplitude", violations);
    const double cx = table_num(v, "u0", "center", violations);
    const double wx = table_num(v, "u0", "width", violations);
    auto bump1 = [](double s) {
      const double z = 1.0 - s * s;
      return z > 0.0 ? z * z : 0.0;
    };
    if (domain.kind() == Domain::Kind::rectangle) {
      auto ity = v.table.find("center_y");
      auto itw = v.table.find("width_y");
      const double cy = ity != v.table.end() ? ity->second.num : cx;
      const double wy = itw != v.table.end() ? itw->second.num : wx;
      return [=](double x, double y) { return amp * bump1((x - cx) / wx) * bump1((y - cy) / wy); };
    }
    return [=](double x, double) { return amp * bump1((x - cx) / wx); };
  }
  if (kind == "barenblatt") {
    check_table_keys(v, "u0", {"kind", "k", "p", "C", "sigma", "x0", "x0_y"}, violations);
    const double k = table_num(v, "u0", "k", violations);
    const double p = table_num(v, "u0", "p", violations);
    const double C = table_num(v, "u0", "C", violations);
    const double sigma = table_num(v, "u0", "sigma", violations);
    const double x0 = table_num(v, "u0", "x0", violations);
    if (std::abs(p - problem_p) > 1e-12 * std::max(1.0, std::abs(problem_p)))
      violations.push_back({v.line, "u0: barenblatt p must match problem.p"});
    if (!violations.empty()) return SpaceFn{};
    const int N = domain.coord_dim();
    SelfSimilarSolution sol(N, k, p, MassNormalization::explicit_c, C);
    std::vector<double> center{x0};
    if (N == 2) {
      auto it = v.table.find("x0_y");
      center.push_back(it != v.table.end() ? it->second.num : x0);
    }
    auto shifted = std::make_shared<ShiftedSolution>(std::move(sol), domain, center, sigma);
    return [shifted](double x, double y) {
      const std::array<double, 2> pt{x, y};
      return shifted->initial(std::span<const double>(pt.data(), shifted->domain().coord_dim()));
    };
  }
  if (kind == "csv") {
    check_table_keys(v, "u0", {"kind", "path"}, violations);
    const std::string path = table_str(v, "u0", "path", violations);
    if (!violations.empty()) return SpaceFn{};
    auto grid = std::make_shared<GriddedField>(GriddedField::from_csv(path));
    return [grid](double x, double y) { return (*grid)(x, y); };
  }
  violations.push_back({v.line, "u0: unknown kind '" + kind + "'"});
  return SpaceFn{};
}

Schema numerics_schema() {
  Schema s;
  s["numerics.dt"] = {KeySpec::Kind::quantity, false, "s"};
  s["numerics.adaptive"] = {KeySpec::Kind::boolean, false, ""};
  s["numerics.dt_min"] = {KeySpec::Kind::quantity, false, "s"};
  s["numerics.dt_max"] = {KeySpec::Kind::quantity, false, "s"};
  s["numerics.eps_reg_rel"] = {KeySpec::Kind::number, false, ""};
  s["numerics.eps_reg_abs"] = {KeySpec::Kind::number, false, ""};
  s["numerics.tol_nonlinear"] = {KeySpec::Kind::number, false, ""};
  s["numerics.max_iters"] = {KeySpec::Kind::integer, false, ""};
  s["numerics.jacobian_floor"] = {KeySpec::Kind::number, false, ""};
  s["numerics.snapshot_every"] = {KeySpec::Kind::integer, false, ""};
  s["numerics.resolution"] = {KeySpec::Kind::integer, false, ""};
  s["numerics.resolution_y"] = {KeySpec::Kind::integer, false, ""};
  return s;
}

Schema output_schema() {
  Schema s;
  s["output.trajectory"] = {KeySpec::Kind::string, false, ""};
  s["output.manifest"] = {KeySpec::Kind::string, false, ""};
  return s;
}

NumericsConfig numerics_from_config(const RunConfig& cfg, double T) {
  NumericsConfig n;
  n.dt = cfg.quantity_or("numerics.dt", T / 256.0);
  n.adaptive = cfg.bool_or("numerics.adaptive", false);
  n.dt_min = cfg.quantity_or("numerics.dt_min", n.dt / 1024.0);
  n.dt_max = cfg.quantity_or("numerics.dt_max", n.dt * 16.0);
  n.eps_reg_rel = cfg.num_or("numerics.eps_reg_rel", 1e-8);
  if (cfg.has("numerics.eps_reg_abs")) n.eps_reg_abs = cfg.num("numerics.eps_reg_abs");
  n.tol_nonlinear = cfg.num_or("numerics.tol_nonlinear", 1e-10);
  n.max_iters = cfg.int_or("numerics.max_iters", 50);
  n.jacobian_floor = cfg.num_or("numerics.jacobian_floor", 1e-12);
  n.snapshot_every = cfg.int_or("numerics.snapshot_every", 1);
  return n;
}

}  // namespace

namespace {

// domain = { kind = "interval", a = -1.0, b = 1.0 }  (lengths in meters)
// domain = { kind = "radial", dim = 1, r_max = 1.0 }
// domain = { kind = "rectangle", ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0 }
Domain domain_from_table(const ConfigValue& v, std::vector<ConfigViolation>& violations) {
  const std::string kind = table_str(v, "domain", "kind", violations);
  if (kind == "interval") {
    check_table_keys(v, "domain", {"kind", "a", "b"}, violations);
    const double a = table_num(v, "domain", "a", violations);
    const double b = table_num(v, "domain", "b", violations);
    if (!violations.empty()) return Domain::interval(0.0, 1.0);
    return Domain::interval(a, b);
  }
  if (kind == "radial") {
    check_table_keys(v, "domain", {"kind", "dim", "r_max"}, violations);
    const double dim = table_num(v, "domain", "dim", violations);
    const double r_max = table_num(v, "domain", "r_max", violations);
    if (dim != std::floor(dim) || dim < 1)
      violations.push_back({v.line, "domain: dim must be a positive integer"});
    if (!violations.empty()) return Domain::interval(0.0, 1.0);
    return Domain::radial(static_cast<int>(dim), r_max);
  }
  if (kind == "rectangle") {
    check_table_keys(v, "domain", {"kind", "ax", "bx", "ay", "by"}, violations);
    const double ax = table_num(v, "domain", "ax", violations);
    const double bx = table_num(v, "domain", "bx", violations);
    const double ay = table_num(v, "domain", "ay", violations);
    const double by = table_num(v, "domain", "by", violations);
    if (!violations.empty()) return Domain::interval(0.0, 1.0);
    return Domain::rectangle(ax, bx, ay, by);
  }
  violations.push_back({v.line, "domain: unknown kind '" + kind + "'"});
  return Domain::interval(0.0, 1.0);
}

}  // namespace

SolveSetup solve_setup_from_config(const RunConfig& cfg) {
  // either (p, c) directly, or the flux law as a tagged record
  // law = { c = ..., m = ... } with the mapping p = m + 1
  const bool has_law = cfg.has("problem.law");
  Schema schema = numerics_schema();
  for (auto& [k, v] : output_schema()) schema[k] = v;
  schema["problem.domain"] = {KeySpec::Kind::table, true, ""};
  if (has_law) {
    schema["problem.law"] = {KeySpec::Kind::table, true, ""};
  } else {
    schema["problem.p"] = {KeySpec::Kind::number, true, ""};
    schema["problem.c"] = {KeySpec::Kind::quantity, true, ""};  // unit depends on the law
  }
  schema["problem.b"] = {KeySpec::Kind::table, true, ""};
  schema["problem.f"] = {KeySpec::Kind::table, false, ""};
  schema["problem.u0"] = {KeySpec::Kind::table, false, ""};
  schema["problem.T"] = {KeySpec::Kind::quantity, true, "s"};
  validate_config(cfg, schema);

  std::vector<ConfigViolation> violations;
  Domain domain = Domain::interval(0.0, 1.0);
  if (const ConfigValue* dv = cfg.find("problem.domain"))
    domain = domain_from_table(*dv, violations);
  double p = 0.0, c = 0.0;
  if (has_law) {
    const ConfigValue& lv = *cfg.find("problem.law");
    check_table_keys(lv, "law", {"c", "m"}, violations);
    c = table_num(lv, "law", "c", violations);
    const double m = table_num(lv, "law", "m", violations);
    p = m + 1.0;
    if (violations.empty() && !(m > 0.0))
      violations.push_back({lv.line, "law: m must be positive"});
  } else {
    p = cfg.num_or("problem.p", 0.0);
    c = cfg.has("problem.c") ? cfg.quantity("problem.c") : 0.0;
  }
  if (!(p > 1.0))
    violations.push_back(
        {cfg.find("problem.p") ? cfg.find("problem.p")->line : 0, "problem.p must exceed 1"});
  if (!(c > 0.0))
    violations.push_back(
        {cfg.find("problem.c") ? cfg.find("problem.c")->line : 0, "problem.c must be positive"});
  const double T = cfg.has("problem.T") ? cfg.quantity("problem.T") : 0.0;
  if (!(T > 0.0))
    violations.push_back(
        {cfg.find("problem.T") ? cfg.find("problem.T")->line : 0, "problem.T must be positive"});

  SolveSetup setup;
  setup.problem.domain = domain;
  setup.problem.p = p;
  setup.problem.c = c;
  setup.problem.T = T;
  if (const ConfigValue* bv = cfg.find("problem.b"))
    setup.problem.b = b_from_table(*bv, p, violations);
  if (const ConfigValue* fv = cfg.find("problem.f"))
    setup.problem.f = f_from_table(*fv, violations);
  if (const ConfigValue* uv = cfg.find("problem.u0"))
    setup.problem.u0 = u0_from_table(*uv, domain, p, violations);
  if (!violations.empty()) throw ConfigError(std::move(violations));

  setup.numerics = numerics_from_config(cfg, T);
  setup.resolution_x = cfg.int_or("numerics.resolution", 257);
  setup.resolution_y = cfg.int_or("numerics.resolution_y", setup.resolution_x);
  setup.trajectory_path = cfg.str_or("output.trajectory", "");
  setup.manifest_path = cfg.str_or("output.manifest", "");
  return setup;
}

// ---------------------------------------------------------------------------
// scenario presets
// ---------------------------------------------------------------------------

ScenarioExpansion expand_scenario(const RunConfig& cfg) {
  Schema schema = numerics_schema();
  for (auto& [k, v] : output_schema()) schema[k] = v;
  schema["scenario.preset"] = {KeySpec::Kind::string, true, ""};
  schema["scenario.T"] = {KeySpec::Kind::quantity, true, "s"};
  const std::string preset = cfg.find("scenario.preset") &&
                                     cfg.find("scenario.preset")->type == ConfigValue::Type::string
                                 ? cfg.find("scenario.preset")->str
                                 : "";
  if (preset == "ditch-drainage" || preset == "field-2d") {
    schema["scenario.law"] = {KeySpec::Kind::string, true, ""};
    schema["scenario.H"] = {KeySpec::Kind::quantity, true, "m"};
    schema["scenario.amplitude"] = {KeySpec::Kind::quantity, true, "m"};
    schema["scenario.recharge"] = {KeySpec::Kind::quantity, false, "m/s"};
    schema["scenario.rho"] = {KeySpec::Kind::number, false, ""};
    schema["scenario.g"] = {KeySpec::Kind::number, false, ""};
    if (preset == "ditch-drainage") {
      schema["scenario.L"] = {KeySpec::Kind::quantity, true, "m"};
    } else {
      schema["scenario.Lx"] = {KeySpec::Kind::quantity, true, "m"};
      schema["scenario.Ly"] = {KeySpec::Kind::quantity, true, "m"};
    }
  } else if (preset == "leibenson") {
    schema["scenario.r_max"] = {KeySpec::Kind::quantity, true, "m"};
    schema["scenario.kappa"] = {KeySpec::Kind::number, false, ""};
    schema["scenario.c"] = {KeySpec::Kind::quantity, true, ""};
    schema["scenario.amplitude"] = {KeySpec::Kind::number, true, ""};
  }
  validate_config(cfg, schema);
  if (preset != "ditch-drainage" && preset != "field-2d" && preset != "leibenson") {
    const ConfigValue* pv = cfg.find("scenario.preset");
    throw ConfigError(
        {{pv ? pv->line : 0, "scenario.preset must be ditch-drainage, field-2d, or leibenson"}});
  }

  ScenarioExpansion out;
  SolveSetup& setup = out.setup;
  const double T = cfg.quantity("scenario.T");

  if (preset == "leibenson") {
    const double kappa = cfg.num_or("scenario.kappa", 0.5);
    const double r_max = cfg.quantity("scenario.r_max");
    const double amp = cfg.num("scenario.amplitude");
    setup.problem.domain = Domain::radial(3, r_max);
    setup.problem.p = 1.5;
    setup.problem.c = cfg.quantity("scenario.c");
    setup.problem.b = BFunction::leibenson(kappa);
    const double r0 = 0.5 * r_max;
    setup.problem.u0 = [amp, r0](double r, double) {
      const double z = 1.0 - (r / r0) * (r / r0);
      return z > 0.0 ? amp * z * z : 0.0;
    };
    setup.problem.T = T;
    out.details = nlohmann::json{{"preset", preset},
                                 {"kappa", kappa},
                                 {"p", setup.problem.p},
                                 {"b", setup.problem.b.describe()}};
  } else {
    const std::string law_source = cfg.str("scenario.law");
    const double H = cfg.quantity("scenario.H");
    const double amp = cfg.quantity("scenario.amplitude");
    const double rho = cfg.num_or("scenario.rho", 1000.0);
    const double g = cfg.num_or("scenario.g", 9.8066);
    const double recharge = cfg.quantity_or("scenario.recharge", 0.0);

    const FlowDataset ds = load_dataset(law_source);
    const FitResult fit = fit_power(ds);
    const AquiferLaw law = derive_aquifer_law(fit, ds.A_inlet, rho, g);
    const GroundwaterPde pde = build_groundwater_pde(law, ds.phi_eff);
    const double p = pde.p();
    const HeadTransform transform(p, H);

    setup.problem.p = p;
    setup.problem.c = pde.K;
    setup.problem.b = BFunction::aquifer_head(pde.phi_eff, p, H);
    setup.problem.T = T;
    const double fconst = source_to_f(p, recharge);
    if (recharge != 0.0)
      setup.problem.f = [fconst](double, double, double) { return fconst; };

    if (preset == "ditch-drainage") {
      const double L = cfg.quantity("scenario.L");
      setup.problem.domain = Domain::interval(-0.5 * L, 0.5 * L);
      setup.problem.u0 = [transform, H, amp, L](double x, double) {
        return transform.head_to_u(H + amp * std::cos(M_PI * x / L));
      };
    } else {
      const double Lx = cfg.quantity("scenario.Lx");
      const double Ly = cfg.quantity("scenario.Ly");
      setup.problem.domain = Domain::rectangle(0.0, Lx, 0.0, Ly);
      setup.problem.u0 = [transform, H, amp, Lx, Ly](double x, double y) {
        return transform.head_to_u(H + amp * std::sin(M_PI * x / Lx) * std::sin(M_PI * y / Ly));
      };
    }
    out.details = nlohmann::json{{"preset", preset},
                                 {"dataset", ds.label},
                                 {"fit", fit.to_json()},
                                 {"aquifer_law", law.to_json()},
                                 {"pde", pde.to_json()},
                                 {"H", H},
                                 {"b", setup.problem.b.describe()}};
  }
  setup.numerics = numerics_from_config(cfg, T);
  setup.resolution_x = cfg.int_or("numerics.resolution", 257);
  setup.resolution_y = cfg.int_or("numerics.resolution_y", setup.resolution_x);
  setup.trajectory_path = cfg.str_or("output.trajectory", "");
  setup.manifest_path = cfg.str_or("output.manifest", "");
  return out;
}

}  // namespace plgw
