#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "filter.hpp"
#include "wave_grid.hpp"

namespace deconv {

/// How an initial condition or forcing field is produced.
struct FieldSpec {
  enum class Kind { zero, single_mode, random_spectrum, snapshot };

  Kind kind = Kind::zero;
  // single_mode: w_hat(k) = amplitude, w_hat(-k) = amplitude (real field 2a cos(k.x))
  std::array<int, 3> k{1, 0, 0};
  std::array<double, 3> amplitude{0.0, 1.0, 0.0};
  // random_spectrum: E(kappa) ~ kappa^exponent exp(-2 kappa^2 / peak^2)
  std::uint64_t seed = 1;
  double exponent = 4.0;
  double cutoff = 0.0;  ///< 0: every retained mode
  double peak = 0.0;    ///< 0: K / 6
  double norm = 1.0;    ///< target H_0 norm
  bool filtered_norm = false;  ///< target applies to H_N of the field
  // snapshot
  std::string path;
};

/// Everything needed to reproduce one run.
struct SolverConfig {
  int K = 16;
  DealiasRule dealias = DealiasRule::two_thirds;
  double nu = 1.0;
  double delta = 1.0;
  int N = 0;
  double dt = 1e-2;
  double T = 1.0;
  int cadence = 1;
  FieldSpec ic;
  FieldSpec forcing;
  bool auto_project = false;
  double epsilon = 0.05;

  FilterParams filter() const { return FilterParams{delta, N}; }
};

/// All problems found while parsing, one message per entry.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : ValidationError(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s = "invalid configuration:";
    for (const auto& x : e) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> errors_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) return std::nullopt;
  return v;
}

template <typename T>
std::optional<std::array<T, 3>> parse_triple(std::string_view s) {
  std::array<T, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const auto comma = s.find(',');
    if ((i < 2) == (comma == std::string_view::npos)) return std::nullopt;
    auto v = parse_number<T>(i < 2 ? s.substr(0, comma) : s);
    if (!v) return std::nullopt;
    out[i] = *v;
    if (i < 2) s.remove_prefix(comma + 1);
  }
  return out;
}

class FieldReader {
 public:
  FieldReader(std::map<std::string, std::pair<std::string, int>>& kv,
              std::vector<std::string>& errors)
      : kv_(kv), errors_(errors) {}

  template <typename T>
  void number(const std::string& key, T& out, bool required) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (required) errors_.push_back("missing required field '" + key + "'");
      return;
    }
    auto v = parse_number<T>(it->second.first);
    if (!v)
      errors_.push_back(where(it) + "field '" + key + "': cannot parse '" + it->second.first + "'");
    else
      out = *v;
    kv_.erase(it);
  }

  template <typename T>
  void triple(const std::string& key, std::array<T, 3>& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    auto v = parse_triple<T>(it->second.first);
    if (!v)
      errors_.push_back(where(it) + "field '" + key + "': expected three comma-separated values");
    else
      out = *v;
    kv_.erase(it);
  }

  void boolean(const std::string& key, bool& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    const auto& v = it->second.first;
    if (v == "true" || v == "1" || v == "yes")
      out = true;
    else if (v == "false" || v == "0" || v == "no")
      out = false;
    else
      errors_.push_back(where(it) + "field '" + key + "': expected true/false, got '" + v + "'");
    kv_.erase(it);
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::string v = it->second.first;
    kv_.erase(it);
    return v;
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

 private:
  static std::string where(std::map<std::string, std::pair<std::string, int>>::iterator it) {
    return "line " + std::to_string(it->second.second) + ": ";
  }
  std::map<std::string, std::pair<std::string, int>>& kv_;
  std::vector<std::string>& errors_;
};

inline void read_field_spec(FieldReader& r, const std::string& prefix, FieldSpec& spec) {
  if (auto type = r.text(prefix + ".type")) {
    if (*type == "zero")
      spec.kind = FieldSpec::Kind::zero;
    else if (*type == "single_mode")
      spec.kind = FieldSpec::Kind::single_mode;
    else if (*type == "random_spectrum")
      spec.kind = FieldSpec::Kind::random_spectrum;
    else if (*type == "snapshot")
      spec.kind = FieldSpec::Kind::snapshot;
    else
      r.error("field '" + prefix + ".type': unknown kind '" + *type + "'");
  }
  r.triple(prefix + ".k", spec.k);
  r.triple(prefix + ".amplitude", spec.amplitude);
  r.number(prefix + ".seed", spec.seed, false);
  r.number(prefix + ".exponent", spec.exponent, false);
  r.number(prefix + ".cutoff", spec.cutoff, false);
  r.number(prefix + ".peak", spec.peak, false);
  r.number(prefix + ".norm", spec.norm, false);
  r.boolean(prefix + ".filtered_norm", spec.filtered_norm);
  if (auto p = r.text(prefix + ".path")) spec.path = *p;

  if (spec.kind == FieldSpec::Kind::single_mode) {
    const auto& k = spec.k;
    if (k[0] == 0 && k[1] == 0 && k[2] == 0)
      r.error("field '" + prefix + ".k': wavevector must be nonzero");
    const double dot = k[0] * spec.amplitude[0] + k[1] * spec.amplitude[1] + k[2] * spec.amplitude[2];
    if (dot != 0.0) r.error("field '" + prefix + ".amplitude': must be orthogonal to k");
  }
  if (spec.kind == FieldSpec::Kind::random_spectrum) {
    if (spec.norm < 0.0) r.error("field '" + prefix + ".norm': must be nonnegative");
    if (spec.cutoff < 0.0) r.error("field '" + prefix + ".cutoff': must be nonnegative");
    if (spec.peak < 0.0) r.error("field '" + prefix + ".peak': must be nonnegative");
  }
  if (spec.kind == FieldSpec::Kind::snapshot && spec.path.empty())
    r.error("field '" + prefix + ".path': required for snapshot fields");
}

}  // namespace detail

/// Parses `key = value` lines. `[section]` headers prefix the following keys
/// with `section.`; `#` and `;` start comments. Every problem is collected
/// before a ConfigError is thrown.
///
/// Required: K, nu, delta, N, dt, T.
/// Optional: dealias, cadence, auto_project, epsilon, ic.*, forcing.* where
/// the field keys are type, k, amplitude, seed, exponent, cutoff, peak, norm,
/// filtered_norm and path.
inline SolverConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::vector<std::string> errors;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    std::string key(detail::trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    std::string value(detail::trim(line.substr(eq + 1)));
    if (kv.contains(key)) errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv[key] = {value, line_no};
  }

  SolverConfig cfg;
  detail::FieldReader r(kv, errors);
  r.number("K", cfg.K, true);
  if (auto d = r.text("dealias")) {
    if (*d == "two_thirds" || *d == "2/3")
      cfg.dealias = DealiasRule::two_thirds;
    else if (*d == "none")
      cfg.dealias = DealiasRule::none;
    else
      errors.push_back("field 'dealias': unknown rule '" + *d + "'");
  }
  r.number("nu", cfg.nu, true);
  r.number("delta", cfg.delta, true);
  r.number("N", cfg.N, true);
  r.number("dt", cfg.dt, true);
  r.number("T", cfg.T, true);
  r.number("cadence", cfg.cadence, false);
  r.boolean("auto_project", cfg.auto_project);
  r.number("epsilon", cfg.epsilon, false);
  detail::read_field_spec(r, "ic", cfg.ic);
  detail::read_field_spec(r, "forcing", cfg.forcing);

  for (const auto& [key, v] : kv)
    errors.push_back("line " + std::to_string(v.second) + ": unknown key '" + key + "'");

  if (cfg.K < 4 || cfg.K % 2 != 0)
    errors.push_back("field 'K': must be an even integer >= 4, got " + std::to_string(cfg.K));
  if (!(cfg.nu > 0.0)) errors.push_back("field 'nu': must be positive");
  if (!(cfg.delta > 0.0)) errors.push_back("field 'delta': must be positive");
  if (cfg.N < 0 || cfg.N > kMaxDeconvolutionOrder)
    errors.push_back("field 'N': must lie in [0, " + std::to_string(kMaxDeconvolutionOrder) + "]");
  if (!(cfg.dt > 0.0)) errors.push_back("field 'dt': must be positive");
  if (!(cfg.T > 0.0)) errors.push_back("field 'T': must be positive");
  if (cfg.cadence < 1) errors.push_back("field 'cadence': must be >= 1");
  if (!(cfg.epsilon >= 0.0)) errors.push_back("field 'epsilon': must be nonnegative");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

}  // namespace deconv
