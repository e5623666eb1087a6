#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mecsched/analysis.hpp"
#include "mecsched/catalog.hpp"
#include "mecsched/dynamics.hpp"
#include "mecsched/error.hpp"
#include "mecsched/policy.hpp"
#include "mecsched/workload.hpp"

namespace mecsched {

enum class SweepAxis : std::uint8_t { none, cache_m, f_local_hz, v_param, rate_bps };

inline std::string_view to_string(SweepAxis a) noexcept {
  switch (a) {
    case SweepAxis::cache_m: return "cache_m";
    case SweepAxis::f_local_hz: return "f_local_hz";
    case SweepAxis::v_param: return "v_param";
    case SweepAxis::rate_bps: return "rate_bps";
    case SweepAxis::none: break;
  }
  return "none";
}

// Defaults reproduce the reference operating point: N=1000, alpha=0.8,
// tau=5 Mbit, M=50, Delta=0.2 s, lambda=0.4, f_l=1 GHz, f_c=10 GHz, R=500 Mbit/s,
// K ~ U{40..60}. W is not given there and defaults to 1 cycle/bit.
struct ExperimentConfig {
  std::size_t n_contents = 1000;
  double zipf_alpha = 0.8;
  double tau_bits = 5e6;
  std::size_t cache_m = 50;
  double slot_seconds = 0.2;
  double lambda = 0.4;
  double w_cycles_per_bit = 1.0;
  double f_local_hz = 1e9;
  double f_mec_hz = 10e9;
  double rate_bps = 500e6;
  double v_param = 2e-7;  // per bit
  std::uint64_t horizon_slots = 100000;
  unsigned k_min = 40;
  unsigned k_max = 60;
  PolicyKind policy = PolicyKind::lyapunov;
  SweepAxis sweep_axis = SweepAxis::none;
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds{1};
  double warmup_frac = 0.1;

  // analyze
  std::uint64_t analysis_samples = 100000;

  // frontier
  double target_delay_s = 1.0;
  double delay_tolerance_s = 0.05;
  std::vector<double> frontier_f_local_values{1e9, 2e9, 4e9};
  std::vector<double> frontier_cache_values{0, 50, 200};
  double frontier_rate_min_bps = 10e6;
  double frontier_rate_max_bps = 10e9;
  double frontier_rate_rel_tol = 1e-3;

  std::string out_path;  // empty = stdout

  SystemParams system_params() const {
    return {slot_seconds, w_cycles_per_bit, f_local_hz, f_mec_hz, rate_bps};
  }
  WorkloadConfig workload(std::uint64_t seed) const { return {lambda, k_min, k_max, seed}; }
  CacheConfig cache() const { return {cache_m}; }
  PolicySpec policy_spec() const { return {policy, v_param}; }
  ContentCatalog catalog() const { return ContentCatalog(n_contents, tau_bits, zipf_alpha); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  return v;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  // Accept integral values written in scientific notation (1e5).
  const double d = parse_double(key, text);
  if (d < 0.0 || d != std::floor(d) || d > 0x1.0p63) throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"n_contents", [](auto& c, auto& k, auto& v) { c.n_contents = parse_uint(k, v); }},
      {"zipf_alpha", [](auto& c, auto& k, auto& v) { c.zipf_alpha = parse_double(k, v); }},
      {"tau_bits", [](auto& c, auto& k, auto& v) { c.tau_bits = parse_double(k, v); }},
      {"cache_m", [](auto& c, auto& k, auto& v) { c.cache_m = parse_uint(k, v); }},
      {"slot_seconds", [](auto& c, auto& k, auto& v) { c.slot_seconds = parse_double(k, v); }},
      {"lambda", [](auto& c, auto& k, auto& v) { c.lambda = parse_double(k, v); }},
      {"w_cycles_per_bit", [](auto& c, auto& k, auto& v) { c.w_cycles_per_bit = parse_double(k, v); }},
      {"f_local_hz", [](auto& c, auto& k, auto& v) { c.f_local_hz = parse_double(k, v); }},
      {"f_mec_hz", [](auto& c, auto& k, auto& v) { c.f_mec_hz = parse_double(k, v); }},
      {"rate_bps", [](auto& c, auto& k, auto& v) { c.rate_bps = parse_double(k, v); }},
      {"v_param", [](auto& c, auto& k, auto& v) { c.v_param = parse_double(k, v); }},
      {"horizon_slots", [](auto& c, auto& k, auto& v) { c.horizon_slots = parse_uint(k, v); }},
      {"k_min", [](auto& c, auto& k, auto& v) { c.k_min = static_cast<unsigned>(parse_uint(k, v)); }},
      {"k_max", [](auto& c, auto& k, auto& v) { c.k_max = static_cast<unsigned>(parse_uint(k, v)); }},
      {"policy",
       [](auto& c, auto& k, auto& v) {
         try {
           c.policy = parse_policy(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"sweep_axis",
       [](auto& c, auto& k, auto& v) {
         for (auto a : {SweepAxis::none, SweepAxis::cache_m, SweepAxis::f_local_hz, SweepAxis::v_param, SweepAxis::rate_bps})
           if (v == to_string(a)) {
             c.sweep_axis = a;
             return;
           }
         throw ConfigError(k + ": unknown axis '" + v + "' (expected cache_m, f_local_hz, v_param or rate_bps)");
       }},
      {"sweep_values", [](auto& c, auto& k, auto& v) { c.sweep_values = parse_double_list(k, v); }},
      {"seeds",
       [](auto& c, auto& k, auto& v) {
         c.seeds.clear();
         for (const auto& item : split_list(v)) c.seeds.push_back(parse_uint(k, item));
       }},
      {"warmup_frac", [](auto& c, auto& k, auto& v) { c.warmup_frac = parse_double(k, v); }},
      {"analysis_samples", [](auto& c, auto& k, auto& v) { c.analysis_samples = parse_uint(k, v); }},
      {"target_delay_s", [](auto& c, auto& k, auto& v) { c.target_delay_s = parse_double(k, v); }},
      {"delay_tolerance_s", [](auto& c, auto& k, auto& v) { c.delay_tolerance_s = parse_double(k, v); }},
      {"frontier_f_local_values", [](auto& c, auto& k, auto& v) { c.frontier_f_local_values = parse_double_list(k, v); }},
      {"frontier_cache_values", [](auto& c, auto& k, auto& v) { c.frontier_cache_values = parse_double_list(k, v); }},
      {"frontier_rate_min_bps", [](auto& c, auto& k, auto& v) { c.frontier_rate_min_bps = parse_double(k, v); }},
      {"frontier_rate_max_bps", [](auto& c, auto& k, auto& v) { c.frontier_rate_max_bps = parse_double(k, v); }},
      {"frontier_rate_rel_tol", [](auto& c, auto& k, auto& v) { c.frontier_rate_rel_tol = parse_double(k, v); }},
  };
  return table;
}

}  // namespace detail

// Applies one `key = value` assignment; unknown keys are rejected.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = detail::setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(cfg, key, value);
}

// `key=value` as given to --set.
inline void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  apply_setting(cfg, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

inline void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* key, const std::string& why) {
    if (!ok) throw ConfigError(std::string(key) + ": " + why);
  };
  require(c.n_contents >= 1, "n_contents", "must be >= 1");
  require(c.zipf_alpha >= 0.0, "zipf_alpha", "must be >= 0");
  require(c.tau_bits > 0.0, "tau_bits", "must be > 0");
  require(c.cache_m <= c.n_contents, "cache_m", "must not exceed n_contents");
  require(c.slot_seconds > 0.0, "slot_seconds", "must be > 0");
  require(c.lambda >= 0.0 && c.lambda <= 1.0, "lambda", "must lie in [0, 1]");
  require(c.w_cycles_per_bit > 0.0, "w_cycles_per_bit", "must be > 0");
  require(c.f_local_hz > 0.0, "f_local_hz", "must be > 0");
  require(c.f_mec_hz > 0.0, "f_mec_hz", "must be > 0");
  require(c.rate_bps > 0.0, "rate_bps", "must be > 0");
  require(c.v_param >= 0.0, "v_param", "must be >= 0");
  require(c.horizon_slots >= 1, "horizon_slots", "must be >= 1");
  require(c.k_min >= 1, "k_min", "must be >= 1");
  require(c.k_max >= c.k_min, "k_max", "must be >= k_min");
  require(!c.seeds.empty(), "seeds", "list must not be empty");
  require(c.warmup_frac >= 0.0 && c.warmup_frac < 1.0, "warmup_frac", "must lie in [0, 1)");
  require(c.analysis_samples >= 1, "analysis_samples", "must be >= 1");
  require(c.target_delay_s > 0.0, "target_delay_s", "must be > 0");
  require(c.delay_tolerance_s > 0.0, "delay_tolerance_s", "must be > 0");
  require(c.frontier_rate_min_bps > 0.0 && c.frontier_rate_min_bps < c.frontier_rate_max_bps, "frontier_rate_min_bps",
          "must be > 0 and below frontier_rate_max_bps");
  require(c.frontier_rate_rel_tol > 0.0, "frontier_rate_rel_tol", "must be > 0");
  for (double m : c.frontier_cache_values)
    require(m >= 0.0 && m == std::floor(m) && m <= static_cast<double>(c.n_contents), "frontier_cache_values",
            "entries must be integers in [0, n_contents]");
  for (double f : c.frontier_f_local_values) require(f > 0.0, "frontier_f_local_values", "entries must be > 0");
  for (double v : c.sweep_values) {
    switch (c.sweep_axis) {
      case SweepAxis::cache_m:
        require(v >= 0.0 && v == std::floor(v) && v <= static_cast<double>(c.n_contents), "sweep_values",
                "cache_m values must be integers in [0, n_contents]");
        break;
      case SweepAxis::v_param: require(v >= 0.0, "sweep_values", "v_param values must be >= 0"); break;
      case SweepAxis::f_local_hz:
      case SweepAxis::rate_bps: require(v > 0.0, "sweep_values", "values must be > 0"); break;
      case SweepAxis::none: break;
    }
  }
  try {
    (void)zipf_popularity(c.n_contents, c.zipf_alpha);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("zipf_alpha: ") + e.what());
  }
}

// Parses `key = value` lines; '#' starts a comment. Unspecified keys keep
// their defaults, unknown or repeated keys are errors.
inline ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>") {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = detail::trim(std::string_view(body).substr(0, eq));
    const auto value = detail::trim(std::string_view(body).substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

// Copy of `cfg` with the sweep axis set to `value`.
inline ExperimentConfig with_axis_value(ExperimentConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::cache_m: cfg.cache_m = static_cast<std::size_t>(value); break;
    case SweepAxis::f_local_hz: cfg.f_local_hz = value; break;
    case SweepAxis::v_param: cfg.v_param = value; break;
    case SweepAxis::rate_bps: cfg.rate_bps = value; break;
    case SweepAxis::none: break;
  }
  return cfg;
}

}  // namespace mecsched
