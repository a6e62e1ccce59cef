#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rlp::cli {

using ManifestValue =
    std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;

// A validated experiment description: one command plus its parameters, with
// defaults already filled in so reports can echo the complete configuration.
struct ExperimentManifest {
  std::string command;
  int schema_version = 1;
  std::map<std::string, ManifestValue> params;

  bool get_bool(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;  // accepts integer values
  const std::string& get_string(const std::string& key) const;
  const std::vector<double>& get_list(const std::string& key) const;
  bool has(const std::string& key) const { return params.count(key) != 0; }
};

// Parses a flat key = value document (TOML-compatible subset: strings in
// double quotes, numbers, true/false, [numeric, lists], # comments).
// Validates against the schema of the named command: unknown keys, duplicate
// keys, missing required keys, and out-of-range values are all configuration
// errors naming the offending key.  Optional keys get their defaults filled.
ExperimentManifest parse_manifest(const std::string& text);

// Commands understood by parse_manifest / run_experiment.
const std::vector<std::string>& known_commands();

}  // namespace rlp::cli
