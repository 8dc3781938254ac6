#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cahn/errors.hpp"

namespace cahn {

// Flat-section INI: [section] headers, key = value lines, # or ; comments.
// The schema is closed; unknown sections or keys are configuration errors,
// so a typo fails the run instead of silently using a default.

namespace detail {

inline std::string trim(const std::string& s) {
  size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

struct IniFile {
  // section -> key -> value, plus line numbers for error messages
  std::map<std::string, std::map<std::string, std::string>> sections;

  static IniFile parse_text(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) {
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header '" + line + "'");
        }
        section = detail::trim(line.substr(1, line.size() - 2));
        ini.sections[section];  // empty sections are legal
        continue;
      }
      const size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected 'key = value', got '" + line + "'");
      }
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": key before any [section]");
      }
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      }
      if (!ini.sections[section].emplace(key, value).second) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": duplicate key '" + section + "." + key + "'");
      }
    }
    return ini;
  }

  static IniFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
  }
};

namespace detail {

inline double parse_real(const std::string& section, const std::string& key,
                         const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0') {
    throw ConfigError("config " + section + "." + key + ": '" + value +
                      "' is not a number");
  }
  return v;
}

inline long parse_int(const std::string& section, const std::string& key,
                      const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0') {
    throw ConfigError("config " + section + "." + key + ": '" + value +
                      "' is not an integer");
  }
  return v;
}

inline bool parse_bool(const std::string& section, const std::string& key,
                       const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config " + section + "." + key + ": '" + value +
                    "' is not a boolean (true/false)");
}

inline std::vector<double> parse_real_list(const std::string& section,
                                           const std::string& key,
                                           const std::string& value) {
  std::string spaced = value;           // commas and whitespace both separate
  for (char& ch : spaced)
    if (ch == ',') ch = ' ';
  std::vector<double> out;
  std::istringstream in(spaced);
  std::string tok;
  while (in >> tok) out.push_back(parse_real(section, key, tok));
  return out;
}

}  // namespace detail

// All keys have defaults; the loader validates the closed schema first and
// the cross-field constraints afterwards, so a malformed file never reaches
// the point where outputs would be produced.
struct RunConfig {
  // [potential]
  double a = 0.0, b = 1.0, q = 0.5, scale = 1.0;
  // [profile]
  double profile_alpha = 0.0;  // default: well a
  int profile_samples = 257;
  // [weight]  omega(t) = 1 + lambda t on [0, length]
  double weight_length = 0.5;
  double weight_lambda = 0.0;
  // [boundary]  alpha_eps = alpha + alpha_shift * eps^alpha_power
  double alpha = 0.2;  // default: a + 0.2 (b - a)
  double alpha_shift = 0.0;
  double alpha_power = 2.0;
  double beta = 1.0;  // default: well b
  double alpha_minus = 0.1;
  double kappa0 = -1.0;
  // [sweep]
  std::vector<double> eps{0.04, 0.02, 0.01, 0.005};
  int cells_per_eps = 32;
  // [curve]
  std::string curve_kind = "circle";  // circle | inner_circle | fourier
  double radius = 1.0;
  double r0 = 0.5;
  double fourier_c0 = 1.0;
  std::vector<double> fourier_cos, fourier_sin;
  // [datum]  constant boundary datum for 2-D runs
  double datum_value = 1.0;  // default: well b
  // [expansion]
  int boundary_samples = 64;
  double tube_delta = 0.0;
  double slice_length = 0.0;
  double end_gap_amplitude = -1.0;
  double end_gap_rate = 1.0;
  double tolerance = 0.03;  // predicted vs extrapolated acceptance band
  // [solver]
  int max_newton = 100;
  double solver_tolerance = 1e-10;
  bool continuation = true;
  // [fixtures]
  std::string fixtures_file = "fixtures/oracles.csv";
  std::vector<double> fixtures_alphas;  // default: a, a+0.2(b-a), a+0.5(b-a)
  // [output]
  unsigned long seed = 12345;
  std::string output_directory = "out";

  static RunConfig from_ini(const IniFile& ini);
  static RunConfig load(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
  }
  std::string snapshot() const;
};

namespace detail {

// Closed schema: section -> allowed keys.
inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"potential", {"a", "b", "q", "scale"}},
      {"profile", {"alpha", "samples"}},
      {"weight", {"length", "lambda"}},
      {"boundary",
       {"alpha", "alpha_shift", "alpha_power", "beta", "alpha_minus", "kappa0"}},
      {"sweep", {"eps", "cells_per_eps"}},
      {"curve", {"kind", "radius", "r0", "fourier_c0", "fourier_cos", "fourier_sin"}},
      {"datum", {"value"}},
      {"expansion",
       {"boundary_samples", "tube_delta", "slice_length", "end_gap_amplitude",
        "end_gap_rate", "tolerance"}},
      {"solver", {"max_newton", "tolerance", "continuation"}},
      {"fixtures", {"file", "alphas"}},
      {"output", {"seed", "directory"}},
  };
  return schema;
}

}  // namespace detail

inline RunConfig RunConfig::from_ini(const IniFile& ini) {
  const auto& schema = detail::config_schema();
  for (const auto& [section, keys] : ini.sections) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : keys) {
      (void)value;
      if (!it->second.count(key)) {
        throw ConfigError("config: unknown key " + section + "." + key);
      }
    }
  }

  RunConfig c;
  bool have_profile_alpha = false, have_alpha = false, have_beta = false,
       have_datum = false, have_fixture_alphas = false;
  for (const auto& [section, keys] : ini.sections) {
    for (const auto& [key, value] : keys) {
      const auto real = [&] { return detail::parse_real(section, key, value); };
      const auto integer = [&] { return detail::parse_int(section, key, value); };
      if (section == "potential") {
        if (key == "a") c.a = real();
        else if (key == "b") c.b = real();
        else if (key == "q") c.q = real();
        else c.scale = real();
      } else if (section == "profile") {
        if (key == "alpha") { c.profile_alpha = real(); have_profile_alpha = true; }
        else c.profile_samples = static_cast<int>(integer());
      } else if (section == "weight") {
        if (key == "length") c.weight_length = real();
        else c.weight_lambda = real();
      } else if (section == "boundary") {
        if (key == "alpha") { c.alpha = real(); have_alpha = true; }
        else if (key == "alpha_shift") c.alpha_shift = real();
        else if (key == "alpha_power") c.alpha_power = real();
        else if (key == "beta") { c.beta = real(); have_beta = true; }
        else if (key == "alpha_minus") c.alpha_minus = real();
        else c.kappa0 = real();
      } else if (section == "sweep") {
        if (key == "eps") c.eps = detail::parse_real_list(section, key, value);
        else c.cells_per_eps = static_cast<int>(integer());
      } else if (section == "curve") {
        if (key == "kind") c.curve_kind = value;
        else if (key == "radius") c.radius = real();
        else if (key == "r0") c.r0 = real();
        else if (key == "fourier_c0") c.fourier_c0 = real();
        else if (key == "fourier_cos")
          c.fourier_cos = detail::parse_real_list(section, key, value);
        else c.fourier_sin = detail::parse_real_list(section, key, value);
      } else if (section == "datum") {
        c.datum_value = real();
        have_datum = true;
      } else if (section == "expansion") {
        if (key == "boundary_samples") c.boundary_samples = static_cast<int>(integer());
        else if (key == "tube_delta") c.tube_delta = real();
        else if (key == "slice_length") c.slice_length = real();
        else if (key == "end_gap_amplitude") c.end_gap_amplitude = real();
        else if (key == "end_gap_rate") c.end_gap_rate = real();
        else c.tolerance = real();
      } else if (section == "solver") {
        if (key == "max_newton") c.max_newton = static_cast<int>(integer());
        else if (key == "tolerance") c.solver_tolerance = real();
        else c.continuation = detail::parse_bool(section, key, value);
      } else if (section == "fixtures") {
        if (key == "file") c.fixtures_file = value;
        else {
          c.fixtures_alphas = detail::parse_real_list(section, key, value);
          have_fixture_alphas = true;
        }
      } else {  // output
        if (key == "seed") {
          const long s = detail::parse_int(section, key, value);
          if (s < 0) throw ConfigError("config output.seed: must be nonnegative");
          c.seed = static_cast<unsigned long>(s);
        } else {
          c.output_directory = value;
        }
      }
    }
  }

  // Cross-field validation.  Potential first: well-relative defaults below.
  if (!(c.a < c.b)) throw ConfigError("config [potential]: requires a < b");
  if (!(c.q > 0.0 && c.q < 1.0))
    throw ConfigError("config [potential]: requires q in (0,1)");
  if (!(c.scale > 0.0)) throw ConfigError("config [potential]: requires scale > 0");
  const double span = c.b - c.a;
  if (!have_profile_alpha) c.profile_alpha = c.a;
  if (!have_alpha) c.alpha = c.a + 0.2 * span;
  if (!have_beta) c.beta = c.b;
  if (!have_datum) c.datum_value = c.b;
  if (!have_fixture_alphas) {
    c.fixtures_alphas = {c.a, c.a + 0.2 * span, c.a + 0.5 * span};
  }

  if (!(c.profile_alpha >= c.a && c.profile_alpha <= c.b))
    throw ConfigError("config profile.alpha: must lie in [a, b]");
  if (c.profile_samples < 2)
    throw ConfigError("config profile.samples: need at least 2");
  if (!(c.weight_length > 0.0 && c.weight_length <= 1.0))
    throw ConfigError("config weight.length: must lie in (0, 1]");
  if (!(c.alpha >= c.a && c.alpha < c.b))
    throw ConfigError("config boundary.alpha: must lie in [a, b)");
  if (!(c.beta > c.a && c.beta <= c.b))
    throw ConfigError("config boundary.beta: must lie in (a, b]");
  if (!(c.alpha_power > 0.0))
    throw ConfigError("config boundary.alpha_power: must be positive");
  if (c.eps.empty()) throw ConfigError("config sweep.eps: list is empty");
  for (double e : c.eps) {
    if (!(e > 0.0)) throw ConfigError("config sweep.eps: values must be positive");
  }
  {
    std::set<double> uniq(c.eps.begin(), c.eps.end());
    if (uniq.size() != c.eps.size())
      throw ConfigError("config sweep.eps: duplicate values");
  }
  for (double e : c.eps) {
    const double ae = c.alpha + c.alpha_shift * std::pow(e, c.alpha_power);
    if (!(ae >= c.a && ae < c.b)) {
      throw ConfigError("config [boundary]: alpha_eps leaves [a, b) at eps = " +
                        detail::format_real(e));
    }
  }
  if (c.cells_per_eps < 4)
    throw ConfigError("config sweep.cells_per_eps: need at least 4");
  if (c.curve_kind != "circle" && c.curve_kind != "inner_circle" &&
      c.curve_kind != "fourier") {
    throw ConfigError("config curve.kind: '" + c.curve_kind +
                      "' is not one of circle, inner_circle, fourier");
  }
  if (!(c.radius > 0.0)) throw ConfigError("config curve.radius: must be positive");
  if (!(c.r0 > 0.0)) throw ConfigError("config curve.r0: must be positive");
  if (c.fourier_cos.size() != c.fourier_sin.size() && !c.fourier_sin.empty() &&
      !c.fourier_cos.empty()) {
    throw ConfigError("config [curve]: fourier_cos and fourier_sin lengths differ");
  }
  if (c.boundary_samples < 4)
    throw ConfigError("config expansion.boundary_samples: need at least 4");
  if (c.tube_delta < 0.0)
    throw ConfigError("config expansion.tube_delta: must be nonnegative");
  if (c.slice_length < 0.0)
    throw ConfigError("config expansion.slice_length: must be nonnegative");
  if (!(c.end_gap_rate > 0.0))
    throw ConfigError("config expansion.end_gap_rate: must be positive");
  if (!(c.tolerance > 0.0))
    throw ConfigError("config expansion.tolerance: must be positive");
  if (c.max_newton < 1)
    throw ConfigError("config solver.max_newton: need at least 1");
  if (!(c.solver_tolerance > 0.0))
    throw ConfigError("config solver.tolerance: must be positive");
  for (double av : c.fixtures_alphas) {
    if (!(av >= c.a && av <= c.b))
      throw ConfigError("config fixtures.alphas: values must lie in [a, b]");
  }
  if (c.fixtures_alphas.empty())
    throw ConfigError("config fixtures.alphas: list is empty");
  if (c.output_directory.empty())
    throw ConfigError("config output.directory: empty path");
  return c;
}

// Canonical text form with every key resolved; loading the snapshot again
// reproduces the same configuration, which is what makes reruns auditable.
inline std::string RunConfig::snapshot() const {
  using detail::format_real;
  std::ostringstream out;
  const auto list = [](const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ' ';
      s += detail::format_real(v[i]);
    }
    return s;
  };
  out << "# resolved run configuration\n";
  out << "[potential]\n"
      << "a = " << format_real(a) << "\n"
      << "b = " << format_real(b) << "\n"
      << "q = " << format_real(q) << "\n"
      << "scale = " << format_real(scale) << "\n";
  out << "[profile]\n"
      << "alpha = " << format_real(profile_alpha) << "\n"
      << "samples = " << profile_samples << "\n";
  out << "[weight]\n"
      << "length = " << format_real(weight_length) << "\n"
      << "lambda = " << format_real(weight_lambda) << "\n";
  out << "[boundary]\n"
      << "alpha = " << format_real(alpha) << "\n"
      << "alpha_shift = " << format_real(alpha_shift) << "\n"
      << "alpha_power = " << format_real(alpha_power) << "\n"
      << "beta = " << format_real(beta) << "\n"
      << "alpha_minus = " << format_real(alpha_minus) << "\n"
      << "kappa0 = " << format_real(kappa0) << "\n";
  out << "[sweep]\n"
      << "eps = " << list(eps) << "\n"
      << "cells_per_eps = " << cells_per_eps << "\n";
  out << "[curve]\n"
      << "kind = " << curve_kind << "\n"
      << "radius = " << format_real(radius) << "\n"
      << "r0 = " << format_real(r0) << "\n"
      << "fourier_c0 = " << format_real(fourier_c0) << "\n";
  if (!fourier_cos.empty()) out << "fourier_cos = " << list(fourier_cos) << "\n";
  if (!fourier_sin.empty()) out << "fourier_sin = " << list(fourier_sin) << "\n";
  out << "[datum]\n"
      << "value = " << format_real(datum_value) << "\n";
  out << "[expansion]\n"
      << "boundary_samples = " << boundary_samples << "\n"
      << "tube_delta = " << format_real(tube_delta) << "\n"
      << "slice_length = " << format_real(slice_length) << "\n"
      << "end_gap_amplitude = " << format_real(end_gap_amplitude) << "\n"
      << "end_gap_rate = " << format_real(end_gap_rate) << "\n"
      << "tolerance = " << format_real(tolerance) << "\n";
  out << "[solver]\n"
      << "max_newton = " << max_newton << "\n"
      << "tolerance = " << format_real(solver_tolerance) << "\n"
      << "continuation = " << (continuation ? "true" : "false") << "\n";
  out << "[fixtures]\n"
      << "file = " << fixtures_file << "\n"
      << "alphas = " << list(fixtures_alphas) << "\n";
  out << "[output]\n"
      << "seed = " << seed << "\n"
      << "directory = " << output_directory << "\n";
  return out.str();
}

}  // namespace cahn
