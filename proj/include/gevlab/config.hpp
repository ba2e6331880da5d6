#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gevlab {

enum class ValueType { integer, real, rational, real_list, text };

using ConfigValue = std::variant<long, double, mpq_class, std::vector<double>, std::string>;

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, ConfigValue> parameters;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::string source_text;  // verbatim input, echoed into the manifest

  long integer(const std::string& key) const;
  double real(const std::string& key) const;
  const mpq_class& rational(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool has(const std::string& key) const { return parameters.count(key) != 0; }
};

struct ConfigError {
  int line;  // 0 when not tied to a line
  std::string message;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
};

/// Flat key=value text, one assignment per line, '#' starts a comment.
ParseOutcome parse_config(const std::string& text);

const std::vector<std::string>& experiment_names();

/// Sorted key=value rendering of the effective parameters (defaults filled in,
/// seed included, output_dir excluded).
std::string canonical_text(const ExperimentConfig& cfg);

}  // namespace gevlab
