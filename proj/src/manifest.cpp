#include "rlp/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "rlp/errors.hpp"

namespace rlp::cli {

namespace {

enum class ValueType { boolean, integer, real, text, list };

struct KeySpec {
  KeySpec(std::string key_, ValueType type_, bool required_ = false,
          std::optional<ManifestValue> fallback_ = {},
          double min_ = -std::numeric_limits<double>::infinity(),
          double max_ = std::numeric_limits<double>::infinity())
      : key(std::move(key_)),
        type(type_),
        required(required_),
        fallback(std::move(fallback_)),
        min(min_),
        max(max_) {}

  std::string key;
  ValueType type;
  bool required;
  std::optional<ManifestValue> fallback;  // filled when the key is absent
  double min;
  double max;
};

struct CommandSchema {
  std::string name;
  std::vector<KeySpec> keys;
};

const double kInf = std::numeric_limits<double>::infinity();

std::vector<CommandSchema> build_schemas() {
  using MV = ManifestValue;
  std::vector<CommandSchema> s;

  s.push_back(
      {"simulate",
       {
           {"steps", ValueType::integer, true, {}, 1, 1e9},
           {"dt", ValueType::real, true, {}, 1e-12, 1.0},
           {"seed", ValueType::integer, true, {}, 0, 9e18},
           {"v0", ValueType::real, false, MV{0.0}},
           {"stopped_from", ValueType::real, false, {}, 1e-12, kInf},
           {"bounce", ValueType::boolean, false, MV{false}},
           {"noise", ValueType::boolean, false, MV{true}},
           {"mode", ValueType::text, false, MV{std::string("bridge")}},
           {"out", ValueType::text, true},
           {"reflected_out", ValueType::text, false},
           {"stable_out", ValueType::text, false},
           {"level_step", ValueType::real, false, MV{0.01}, 1e-9, 1.0},
           {"bandwidth_factor", ValueType::real, false, MV{1.0}, 1e-6, 1e3},
       }});

  s.push_back(
      {"excursions",
       {
           {"steps", ValueType::integer, true, {}, 2, 5e7},
           {"dt", ValueType::real, true, {}, 1e-12, 1.0},
           {"seed", ValueType::integer, true, {}, 0, 9e18},
           {"replicas", ValueType::integer, false, MV{std::int64_t{1}}, 1, 1e6},
           {"min_height", ValueType::real, false, MV{0.0}, 0.0, kInf},
           {"mode", ValueType::text, false, MV{std::string("bridge")}},
           {"noise", ValueType::boolean, false, MV{true}},
           {"hill_k", ValueType::integer, false, {}, 10, 1e9},
           {"out", ValueType::text, true},
           {"stats", ValueType::text, true},
       }});

  s.push_back(
      {"exit_law",
       {
           {"x", ValueType::real, true, {}, 1e-12, kInf},
           {"eps", ValueType::real, true, {}, 1e-12, kInf},
           {"replicas", ValueType::integer, true, {}, 1, 1e9},
           {"seed", ValueType::integer, true, {}, 0, 9e18},
           {"dt", ValueType::real, false, {}, 1e-18, 1.0},
           {"step_cap", ValueType::integer, false, MV{std::int64_t{100000000}},
            1, 9e18},
           {"bins", ValueType::integer, false, MV{std::int64_t{30}}, 3, 1e4},
           {"window_mult", ValueType::real, false, MV{20.0}, 1.5, 1e6},
           {"workers", ValueType::integer, false, MV{std::int64_t{1}}, 1, 256},
           {"out", ValueType::text, true},
           {"gof", ValueType::text, true},
       }});

  s.push_back({"scaling",
               {
                   {"factor", ValueType::real, false, MV{4.0}, 1.0 + 1e-9, 1e6},
                   {"replicas", ValueType::integer, true, {}, 10, 1e9},
                   {"steps", ValueType::integer, true, {}, 1, 1e9},
                   {"dt", ValueType::real, true, {}, 1e-12, 1.0},
                   {"seed", ValueType::integer, true, {}, 0, 9e18},
                   {"slide_budget", ValueType::integer, false,
                    MV{std::int64_t{1'000'000}}, 1e3, 1e9},
                   {"out", ValueType::text, true},
               }});

  s.push_back({"dimension",
               {
                   {"steps", ValueType::integer, true, {}, 100, 2e9},
                   {"dt", ValueType::real, true, {}, 1e-12, 1.0},
                   {"seed", ValueType::integer, true, {}, 0, 9e18},
                   {"replicas", ValueType::integer, false, MV{std::int64_t{1}},
                    1, 1e6},
                   {"scales", ValueType::list, false, {}, 1e-12, kInf},
                   {"expected_slope", ValueType::real, false, {}, 0.0, 1.0},
                   {"slope_tol", ValueType::real, false, MV{0.05}, 1e-6, 1.0},
                   {"out", ValueType::text, true},
               }});

  s.push_back({"entrance",
               {
                   {"xs", ValueType::list, true, {}, 1e-12, kInf},
                   {"threshold", ValueType::real, false, MV{1.0}, 1e-12, kInf},
                   {"replicas", ValueType::integer, true, {}, 1, 1e9},
                   {"dt", ValueType::real, true, {}, 1e-12, 1.0},
                   {"seed", ValueType::integer, true, {}, 0, 9e18},
                   {"max_steps", ValueType::integer, false,
                    MV{std::int64_t{1000000}}, 1, 9e18},
                   {"noise", ValueType::boolean, false, MV{true}},
                   {"expected_slope", ValueType::real, false, {}, 0.0, 1.0},
                   {"slope_tol", ValueType::real, false, MV{0.02}, 1e-6, 1.0},
                   {"out", ValueType::text, true},
               }});

  return s;
}

const std::vector<CommandSchema>& schemas() {
  static const std::vector<CommandSchema> s = build_schemas();
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_integer(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (std::size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
  try {
    out = std::stoll(s);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

bool parse_real(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

ManifestValue parse_value(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (v.empty())
    throw config_error("manifest: empty value for key '" + key + "'");

  if (v.front() == '"') {
    const std::size_t close = v.find('"', 1);
    if (close == std::string::npos)
      throw config_error("manifest: unterminated string for key '" + key + "'");
    const std::string rest = trim(v.substr(close + 1));
    if (!rest.empty() && rest[0] != '#')
      throw config_error("manifest: trailing content after string for key '" +
                         key + "'");
    return v.substr(1, close - 1);
  }

  // strip trailing comment from non-string values
  const std::size_t hash = v.find('#');
  if (hash != std::string::npos) v = trim(v.substr(0, hash));
  if (v.empty())
    throw config_error("manifest: empty value for key '" + key + "'");

  if (v.front() == '[') {
    if (v.back() != ']')
      throw config_error("manifest: unterminated list for key '" + key + "'");
    std::vector<double> list;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty())
        throw config_error("manifest: empty list element for key '" + key +
                           "'");
      double d = 0.0;
      if (!parse_real(item, d))
        throw config_error("manifest: non-numeric list element for key '" +
                           key + "'");
      list.push_back(d);
    }
    if (list.empty())
      throw config_error("manifest: empty list for key '" + key + "'");
    return list;
  }

  if (v == "true") return true;
  if (v == "false") return false;

  std::int64_t i = 0;
  if (parse_integer(v, i)) return i;
  double d = 0.0;
  if (parse_real(v, d)) return d;
  throw config_error("manifest: cannot parse value for key '" + key + "'");
}

std::string type_name(ValueType t) {
  switch (t) {
    case ValueType::boolean: return "boolean";
    case ValueType::integer: return "integer";
    case ValueType::real: return "number";
    case ValueType::text: return "string";
    case ValueType::list: return "numeric list";
  }
  return "?";
}

void check_range(const KeySpec& spec, double v) {
  if (v < spec.min || v > spec.max) {
    std::ostringstream os;
    os << "manifest: value out of range for key '" << spec.key << "' (allowed ["
       << spec.min << ", " << spec.max << "])";
    throw config_error(os.str());
  }
}

ManifestValue coerce(const KeySpec& spec, const ManifestValue& raw) {
  switch (spec.type) {
    case ValueType::boolean:
      if (const bool* b = std::get_if<bool>(&raw)) return *b;
      break;
    case ValueType::integer:
      if (const std::int64_t* i = std::get_if<std::int64_t>(&raw)) {
        check_range(spec, static_cast<double>(*i));
        return *i;
      }
      break;
    case ValueType::real:
      if (const double* d = std::get_if<double>(&raw)) {
        check_range(spec, *d);
        return *d;
      }
      if (const std::int64_t* i = std::get_if<std::int64_t>(&raw)) {
        const double d = static_cast<double>(*i);
        check_range(spec, d);
        return d;
      }
      break;
    case ValueType::text:
      if (const std::string* s = std::get_if<std::string>(&raw)) {
        if (s->empty())
          throw config_error("manifest: empty string for key '" + spec.key +
                             "'");
        return *s;
      }
      break;
    case ValueType::list:
      if (const auto* l = std::get_if<std::vector<double>>(&raw)) {
        for (double d : *l) check_range(spec, d);
        return *l;
      }
      break;
  }
  throw config_error("manifest: key '" + spec.key + "' expects a " +
                     type_name(spec.type));
}

}  // namespace

bool ExperimentManifest::get_bool(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end() || !std::holds_alternative<bool>(it->second))
    throw config_error("manifest: missing boolean key '" + key + "'");
  return std::get<bool>(it->second);
}

std::int64_t ExperimentManifest::get_int(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end() || !std::holds_alternative<std::int64_t>(it->second))
    throw config_error("manifest: missing integer key '" + key + "'");
  return std::get<std::int64_t>(it->second);
}

double ExperimentManifest::get_double(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end())
    throw config_error("manifest: missing numeric key '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  if (const std::int64_t* i = std::get_if<std::int64_t>(&it->second))
    return static_cast<double>(*i);
  throw config_error("manifest: key '" + key + "' is not numeric");
}

const std::string& ExperimentManifest::get_string(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end() || !std::holds_alternative<std::string>(it->second))
    throw config_error("manifest: missing string key '" + key + "'");
  return std::get<std::string>(it->second);
}

const std::vector<double>& ExperimentManifest::get_list(
    const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end() ||
      !std::holds_alternative<std::vector<double>>(it->second))
    throw config_error("manifest: missing list key '" + key + "'");
  return std::get<std::vector<double>>(it->second);
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const CommandSchema& s : schemas()) n.push_back(s.name);
    return n;
  }();
  return names;
}

ExperimentManifest parse_manifest(const std::string& text) {
  std::map<std::string, ManifestValue> raw;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("manifest: expected 'key = value', got: " + t);
    const std::string key = trim(t.substr(0, eq));
    if (key.empty() ||
        !std::all_of(key.begin(), key.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_';
        }))
      throw config_error("manifest: malformed key '" + key + "'");
    if (raw.count(key))
      throw config_error("manifest: duplicate key '" + key + "'");
    raw.emplace(key, parse_value(key, t.substr(eq + 1)));
  }

  const auto cmd_it = raw.find("command");
  if (cmd_it == raw.end() ||
      !std::holds_alternative<std::string>(cmd_it->second))
    throw config_error("manifest: missing string key 'command'");
  const std::string command = std::get<std::string>(cmd_it->second);
  raw.erase(cmd_it);

  ExperimentManifest m;
  m.command = command;
  if (const auto ver_it = raw.find("version"); ver_it != raw.end()) {
    if (const std::int64_t* v = std::get_if<std::int64_t>(&ver_it->second);
        v && *v == 1)
      m.schema_version = 1;
    else
      throw config_error("manifest: unsupported value for key 'version'");
    raw.erase(ver_it);
  }

  const auto schema_it =
      std::find_if(schemas().begin(), schemas().end(),
                   [&](const CommandSchema& s) { return s.name == command; });
  if (schema_it == schemas().end())
    throw config_error("manifest: unknown command '" + command + "'");

  for (const auto& [key, value] : raw) {
    const auto spec_it =
        std::find_if(schema_it->keys.begin(), schema_it->keys.end(),
                     [&](const KeySpec& k) { return k.key == key; });
    if (spec_it == schema_it->keys.end())
      throw config_error("manifest: unknown key '" + key + "' for command '" +
                         command + "'");
    m.params.emplace(key, coerce(*spec_it, value));
  }
  for (const KeySpec& spec : schema_it->keys) {
    if (m.params.count(spec.key)) continue;
    if (spec.required)
      throw config_error("manifest: missing required key '" + spec.key +
                         "' for command '" + command + "'");
    if (spec.fallback) m.params.emplace(spec.key, *spec.fallback);
  }

  // cross-key defaults and consistency
  if (command == "exit_law") {
    const double eps = m.get_double("eps");
    if (!(m.get_double("x") < eps))
      throw config_error("manifest: key 'x' must be smaller than 'eps'");
    if (!m.has("dt")) {
      // jump-dominated exits: step chosen so one-step double crossings are rare
      m.params.emplace("dt", eps * eps * eps * 1e-4);
    }
  }
  if (command == "entrance") {
    for (double x : m.get_list("xs"))
      if (x > m.get_double("threshold"))
        throw config_error(
            "manifest: key 'xs' has entries above 'threshold'");
  }
  if (command == "simulate" || command == "excursions") {
    const std::string& mode = m.get_string("mode");
    if (mode != "bridge" && mode != "exact")
      throw config_error("manifest: key 'mode' must be \"bridge\" or \"exact\"");
  }
  return m;
}

}  // namespace rlp::cli
