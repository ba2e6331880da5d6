#include "gevlab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <locale>
#include <sstream>

#include "gevlab/error.hpp"
#include "gevlab/multiplier.hpp"

namespace gevlab {
namespace {

struct KeySpec {
  ValueType type;
  bool required;
  std::optional<ConfigValue> fallback;
};

using Schema = std::map<std::string, KeySpec>;

KeySpec req(ValueType t) { return {t, true, std::nullopt}; }
KeySpec opt(ValueType t, ConfigValue v) { return {t, false, std::move(v)}; }
KeySpec opt_none(ValueType t) { return {t, false, std::nullopt}; }

const std::map<std::string, Schema>& schemas() {
  using V = ValueType;
  using L = std::vector<double>;
  static const std::map<std::string, Schema> s = {
      {"free-decay",
       {{"theta", opt(V::real, 2.0)},
        {"rho0", opt(V::real, 1.0)},
        {"times", opt(V::real_list, L{0.0, 1.0})},
        {"num_points", opt(V::integer, 8192L)},
        {"half_length", opt(V::real, 400.0)},
        {"window_lo", opt(V::real, 10.0)},
        {"window_hi", opt(V::real, 50.0)},
        {"reference_num_points", opt(V::integer, 131072L)},
        {"reference_half_length", opt(V::real, 100.0)},
        {"reference_window_lo", opt(V::real, 20.0)},
        {"reference_window_hi", opt(V::real, 30.0)}}},
      {"growth-sweep",
       {{"sigma", req(V::real)},
        {"sigma_k_list", req(V::real_list)},
        {"T_star", opt(V::real, 0.1)},
        {"rho0", opt(V::real, 1.0)},
        {"theta", opt(V::real, 4.0)},
        {"rho2", opt(V::real, 0.0)},
        {"s", opt(V::real, 4.0)},
        {"lambda", opt_none(V::real)},
        {"theta1", opt(V::real, 2.2)},
        {"theta_h", opt(V::real, 2.0)},
        {"drift", opt(V::integer, 1L)},
        {"absorber", opt(V::integer, 1L)},
        {"length_factor", opt(V::real, 8.0)},
        {"xi_factor", opt(V::real, 3.0)},
        {"trace_points", opt(V::integer, 20L)},
        {"tolerance", opt_none(V::real)}}},
      {"conjugate-check",
       {{"sigma_list", opt(V::real_list, L{0.25, 0.5, 0.75})},
        {"s_list", opt(V::real_list, L{1.0, 2.0, 4.0})},
        {"delta", opt(V::real, 0.1)},
        {"num_points", opt(V::integer, 2048L)},
        {"half_length", opt(V::real, 200.0)},
        {"residual_num_points", opt(V::integer, 2048L)},
        {"residual_half_length", opt(V::real, 40.0)},
        {"residual_delta", opt(V::real, 0.2)},
        {"residual_s", opt(V::real, 2.0)}}},
      {"multiplier-check",
       {{"theta", req(V::real)},
        {"s", req(V::real)},
        {"t", req(V::rational)},
        {"alpha_max", req(V::integer)},
        {"A", opt(V::real, 1.0)},
        {"B", opt(V::real, 1.0)},
        {"a", opt(V::real, 1.0)},
        {"precision_bits", opt(V::integer, 256L)},
        {"check_alpha_max", opt(V::integer, 200L)}}},
      {"psido-selftest",
       {{"sigma_k", opt(V::real, 40.0)},
        {"sigma", opt(V::real, 0.5)},
        {"sizes", opt(V::real_list, L{512, 1024, 2048})},
        {"ensemble_size", opt(V::integer, 6L)}}},
      {"energy-initial",
       {{"rho0", opt(V::real, 1.0)},
        {"theta", opt(V::real, 2.0)},
        {"rho2", opt(V::real, 0.1)},
        {"s", opt(V::real, 2.0)},
        {"sigma_k_list", opt(V::real_list, L{20, 40, 80})},
        {"lambda", opt(V::real, 0.25)},
        {"theta1", opt(V::real, 2.2)},
        {"theta_h", opt(V::real, 2.0)}}},
  };
  return s;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_long(const std::string& s, long& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  is >> out;
  return !is.fail() && is.eof() && std::isfinite(out);
}

bool looks_rational(const std::string& s) { return s.find('/') != std::string::npos; }

std::string type_name(ValueType t) {
  switch (t) {
    case ValueType::integer:
      return "integer";
    case ValueType::real:
      return "real";
    case ValueType::rational:
      return "rational";
    case ValueType::real_list:
      return "list of reals";
    default:
      return "text";
  }
}

std::string describe(const std::string& raw) {
  long l;
  double d;
  if (parse_long(raw, l)) return "integer";
  if (looks_rational(raw)) return "rational";
  if (parse_double(raw, d)) return "real";
  if (raw.find(',') != std::string::npos) return "list";
  return "text";
}

std::optional<ConfigValue> convert(const std::string& raw, ValueType t) {
  switch (t) {
    case ValueType::integer: {
      long v;
      if (parse_long(raw, v)) return v;
      return std::nullopt;
    }
    case ValueType::real: {
      double v;
      if (!looks_rational(raw) && parse_double(raw, v)) return v;
      return std::nullopt;
    }
    case ValueType::rational: {
      // Integers are exact rationals; decimals are refused to keep exactness.
      try {
        if (raw.find('.') != std::string::npos || raw.find('e') != std::string::npos) return std::nullopt;
        return parse_rational(raw);
      } catch (const Error&) {
        return std::nullopt;
      }
    }
    case ValueType::real_list: {
      std::string body = raw;
      if (!body.empty() && (body.front() == '[' || body.front() == '{')) body = body.substr(1);
      if (!body.empty() && (body.back() == ']' || body.back() == '}')) body.pop_back();
      std::vector<double> out;
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_double(trim(item), v)) return std::nullopt;
        out.push_back(v);
      }
      if (out.empty()) return std::nullopt;
      return out;
    }
    default:
      return raw;
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : schemas()) v.push_back(k);
    return v;
  }();
  return names;
}

ParseOutcome parse_config(const std::string& text) {
  ParseOutcome out;
  auto error = [&](int line, std::string msg) { out.errors.push_back({line, std::move(msg)}); };

  struct Entry {
    int line;
    std::string value;
  };
  std::map<std::string, Entry> entries;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      error(lineno, "expected key=value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) {
      error(lineno, "empty key");
      continue;
    }
    if (entries.count(key)) {
      error(lineno, "duplicate key '" + key + "' (first on line " + std::to_string(entries[key].line) + ")");
      continue;
    }
    entries[key] = {lineno, value};
  }

  ExperimentConfig cfg;
  cfg.source_text = text;
  const auto exp_it = entries.find("experiment");
  if (exp_it == entries.end()) {
    error(0, "missing key 'experiment'");
    return out;
  }
  cfg.experiment = exp_it->second.value;
  const auto schema_it = schemas().find(cfg.experiment);
  if (schema_it == schemas().end()) {
    error(exp_it->second.line, "unknown experiment '" + cfg.experiment + "'");
    return out;
  }
  const Schema& schema = schema_it->second;

  for (const auto& [key, entry] : entries) {
    if (key == "experiment") continue;
    if (key == "output_dir") {
      cfg.output_dir = entry.value;
      continue;
    }
    if (key == "seed") {
      long v;
      if (!parse_long(entry.value, v) || v < 0)
        error(entry.line, "type mismatch for 'seed': nonnegative integer required, got " + describe(entry.value));
      else
        cfg.seed = static_cast<std::uint64_t>(v);
      continue;
    }
    const auto spec = schema.find(key);
    if (spec == schema.end()) {
      error(entry.line, "unknown key '" + key + "' for experiment " + cfg.experiment);
      continue;
    }
    auto v = convert(entry.value, spec->second.type);
    if (!v) {
      error(entry.line, "type mismatch for '" + key + "': " + type_name(spec->second.type) + " required, got " +
                            describe(entry.value));
      continue;
    }
    cfg.parameters[key] = std::move(*v);
  }
  for (const auto& [key, spec] : schema) {
    if (cfg.parameters.count(key)) continue;
    if (spec.required)
      error(0, "missing key '" + key + "' for experiment " + cfg.experiment);
    else if (spec.fallback)
      cfg.parameters[key] = *spec.fallback;
  }
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

std::string canonical_text(const ExperimentConfig& cfg) {
  auto real = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "experiment=" << cfg.experiment << '\n';
  for (const auto& [key, value] : cfg.parameters) {
    os << key << '=';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, long>)
            os << v;
          else if constexpr (std::is_same_v<T, double>)
            os << real(v);
          else if constexpr (std::is_same_v<T, mpq_class>)
            os << rational_string(v);
          else if constexpr (std::is_same_v<T, std::vector<double>>) {
            for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << real(v[i]);
          } else
            os << v;
        },
        value);
    os << '\n';
  }
  os << "seed=" << cfg.seed << '\n';
  return os.str();
}

long ExperimentConfig::integer(const std::string& key) const { return std::get<long>(parameters.at(key)); }
double ExperimentConfig::real(const std::string& key) const { return std::get<double>(parameters.at(key)); }
const mpq_class& ExperimentConfig::rational(const std::string& key) const {
  return std::get<mpq_class>(parameters.at(key));
}
const std::vector<double>& ExperimentConfig::list(const std::string& key) const {
  return std::get<std::vector<double>>(parameters.at(key));
}
const std::string& ExperimentConfig::text(const std::string& key) const {
  return std::get<std::string>(parameters.at(key));
}

}  // namespace gevlab
