#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mecsched/analysis.hpp"
#include "mecsched/config.hpp"
#include "mecsched/engine.hpp"
#include "mecsched/parallel.hpp"

namespace mecsched {

// ---------------------------------------------------------------------------
// CSV helpers. Numbers use the shortest round-trip representation so that
// output is byte-identical for identical inputs.

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}
inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  std::size_t n = 0;
  double se() const noexcept { return n > 0 ? sd / std::sqrt(static_cast<double>(n)) : 0.0; }
};

inline SampleStats summarize(const std::vector<double>& xs) {
  SampleStats s;
  s.n = xs.size();
  if (s.n == 0) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationRow {
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::lyapunov;
  double v_param = 0.0;
  std::size_t cache_m = 0;
  double f_local_hz = 0.0;
  double rate_bps = 0.0;
  double lambda = 0.0;
  double avg_data_per_task_bits = 0.0;
  double avg_queue_len = 0.0;
  double little_delay_s = 0.0;
  double measured_mean_delay_s = 0.0;
  std::uint64_t completions = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t dispatched = 0;
  std::uint64_t drift_violations = 0;
  bool zero_arrivals = false;
  bool divergent = false;
};

inline SimulationRow simulate_one(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto catalog = cfg.catalog();
  const auto m = run_simulation(catalog, cfg.cache(), cfg.system_params(), cfg.workload(seed), cfg.policy_spec(),
                                cfg.horizon_slots, RunOptions{cfg.warmup_frac, 1});
  SimulationRow r;
  r.seed = seed;
  r.policy = cfg.policy;
  r.v_param = cfg.v_param;
  r.cache_m = cfg.cache_m;
  r.f_local_hz = cfg.f_local_hz;
  r.rate_bps = cfg.rate_bps;
  r.lambda = cfg.lambda;
  r.completions = m.window.completions;
  r.arrivals = m.window.arrivals;
  r.dispatched = m.window.dispatched;
  r.drift_violations = m.drift_violations;
  r.divergent = m.infeasibility_flag;
  r.avg_queue_len = avg_queue_length(m);
  r.measured_mean_delay_s = measured_mean_delay(m, cfg.slot_seconds);
  if (m.window.arrivals == 0) {
    r.zero_arrivals = true;
  } else {
    r.avg_data_per_task_bits = avg_data_per_task(m);
    r.little_delay_s = little_delay(m, cfg.lambda, cfg.slot_seconds);
  }
  return r;
}

inline std::vector<SimulationRow> cmd_simulate(const ExperimentConfig& cfg) {
  validate(cfg);
  auto seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  return parallel_map(seeds.size(), [&](std::size_t i) { return simulate_one(cfg, seeds[i]); });
}

inline constexpr const char* kSimulationColumns =
    "seed,policy,v_param,cache_m,f_local_hz,rate_bps,lambda,avg_data_per_task_bits,avg_queue_len,little_delay_s,"
    "measured_mean_delay_s,completions,arrivals,dispatched,status";

inline std::string simulation_fields(const SimulationRow& r) {
  std::string s;
  s += fmt(r.seed) + ',' + std::string(to_string(r.policy)) + ',' + fmt(r.v_param) + ',' + fmt(std::uint64_t{r.cache_m}) +
       ',' + fmt(r.f_local_hz) + ',' + fmt(r.rate_bps) + ',' + fmt(r.lambda) + ',' + fmt(r.avg_data_per_task_bits) + ',' +
       fmt(r.avg_queue_len) + ',' + fmt(r.little_delay_s) + ',' + fmt(r.measured_mean_delay_s) + ',' +
       fmt(r.completions) + ',' + fmt(r.arrivals) + ',' + fmt(r.dispatched) + ',';
  s += r.zero_arrivals ? "zero_arrivals" : (r.divergent ? "divergent" : "ok");
  return s;
}

inline void write_simulation_csv(std::ostream& os, const std::vector<SimulationRow>& rows) {
  os << kSimulationColumns << '\n';
  for (const auto& r : rows) os << simulation_fields(r) << '\n';
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double axis_value = 0.0;
  SimulationRow run;
};

struct SweepGroup {
  double axis_value = 0.0;
  SampleStats avg_data;
  SampleStats avg_queue;
  SampleStats measured_delay;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::none;
  std::vector<SweepRow> rows;      // sorted by axis value, then seed
  std::vector<SweepGroup> groups;  // one per axis value, ascending
};

inline SweepResult cmd_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.sweep_axis == SweepAxis::none || cfg.sweep_values.empty())
    throw ConfigError("sweep: set sweep_axis and a non-empty sweep_values list");

  auto values = cfg.sweep_values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  auto seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());

  const std::size_t jobs = values.size() * seeds.size();
  auto runs = parallel_map(jobs, [&](std::size_t i) {
    const double value = values[i / seeds.size()];
    return simulate_one(with_axis_value(cfg, cfg.sweep_axis, value), seeds[i % seeds.size()]);
  });

  SweepResult result;
  result.axis = cfg.sweep_axis;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    std::vector<double> data, queue, delay;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const auto& r = runs[vi * seeds.size() + si];
      result.rows.push_back({values[vi], r});
      if (r.zero_arrivals) continue;
      data.push_back(r.avg_data_per_task_bits);
      queue.push_back(r.avg_queue_len);
      delay.push_back(r.measured_mean_delay_s);
    }
    result.groups.push_back({values[vi], summarize(data), summarize(queue), summarize(delay)});
  }
  return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& s) {
  os << "axis,axis_value," << kSimulationColumns
     << ",mean_avg_data_per_task_bits,sd_avg_data_per_task_bits,mean_avg_queue_len,sd_avg_queue_len,"
        "mean_measured_delay_s,sd_measured_delay_s\n";
  std::map<double, const SweepGroup*> by_value;
  for (const auto& g : s.groups) by_value[g.axis_value] = &g;
  for (const auto& row : s.rows) {
    const auto& g = *by_value.at(row.axis_value);
    os << to_string(s.axis) << ',' << fmt(row.axis_value) << ',' << simulation_fields(row.run) << ','
       << fmt(g.avg_data.mean) << ',' << fmt(g.avg_data.sd) << ',' << fmt(g.avg_queue.mean) << ','
       << fmt(g.avg_queue.sd) << ',' << fmt(g.measured_delay.mean) << ',' << fmt(g.measured_delay.sd) << '\n';
  }
}

// ---------------------------------------------------------------------------
// frontier: smallest rate R meeting a delay target, per (f_l, M)

enum class FrontierStatus : std::uint8_t { ok, unreachable, at_lower_bound, tolerance_miss };

inline std::string_view to_string(FrontierStatus s) noexcept {
  switch (s) {
    case FrontierStatus::unreachable: return "unreachable";
    case FrontierStatus::at_lower_bound: return "at_lower_bound";
    case FrontierStatus::tolerance_miss: return "tolerance_miss";
    case FrontierStatus::ok: break;
  }
  return "ok";
}

struct FrontierPoint {
  double f_local_hz = 0.0;
  std::size_t cache_m = 0;
  std::optional<double> required_rate_bps;
  double measured_delay_s = 0.0;
  FrontierStatus status = FrontierStatus::ok;
  unsigned evaluations = 0;
};

// Mean measured delay over the configured seeds; infinite when any seed is
// starved or divergent.
inline double mean_measured_delay(const ExperimentConfig& cfg) {
  const auto catalog = cfg.catalog();
  double sum = 0.0;
  for (auto seed : cfg.seeds) {
    const auto m = run_simulation(catalog, cfg.cache(), cfg.system_params(), cfg.workload(seed), cfg.policy_spec(),
                                  cfg.horizon_slots, RunOptions{cfg.warmup_frac, 1});
    if (m.drift_violations != 0) throw ContractViolation("drift inequality violated during frontier evaluation");
    // nothing finished, or the queue is running away: the target cannot be met
    if ((m.window.arrivals > 0 && m.window.completions == 0) || m.infeasibility_flag)
      return std::numeric_limits<double>::infinity();
    sum += measured_mean_delay(m, cfg.slot_seconds);
  }
  return sum / static_cast<double>(cfg.seeds.size());
}

inline FrontierPoint find_required_rate(ExperimentConfig cfg, double target_delay_s, double tolerance_s) {
  FrontierPoint pt;
  pt.f_local_hz = cfg.f_local_hz;
  pt.cache_m = cfg.cache_m;
  auto delay_at = [&](double rate) {
    cfg.rate_bps = rate;
    ++pt.evaluations;
    return mean_measured_delay(cfg);
  };

  double lo = cfg.frontier_rate_min_bps, hi = cfg.frontier_rate_max_bps;

  // Monotonicity probe on a log grid across the bracket.
  constexpr int kProbes = 5;
  double prev = std::numeric_limits<double>::infinity();
  double d_lo = 0.0, d_hi = 0.0;
  for (int i = 0; i < kProbes; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / (kProbes - 1));
    const double d = delay_at(r);
    if (d > prev + tolerance_s) {
      std::ostringstream msg;
      msg << "frontier: measured delay is not monotone in R at f_local_hz=" << fmt(pt.f_local_hz)
          << " cache_m=" << pt.cache_m << " (" << fmt(prev) << " s then " << fmt(d) << " s at R=" << fmt(r) << ")";
      throw ContractViolation(msg.str());
    }
    prev = d;
    if (i == 0) d_lo = d;
    if (i == kProbes - 1) d_hi = d;
  }

  if (d_hi > target_delay_s) {
    pt.status = d_hi <= target_delay_s + tolerance_s ? FrontierStatus::ok : FrontierStatus::unreachable;
    if (pt.status == FrontierStatus::ok) pt.required_rate_bps = hi;
    pt.measured_delay_s = d_hi;
    return pt;
  }
  if (d_lo <= target_delay_s) {
    pt.status = FrontierStatus::at_lower_bound;
    pt.required_rate_bps = lo;
    pt.measured_delay_s = d_lo;
    return pt;
  }

  // Invariant: delay(lo) > target >= delay(hi). Bisect in log space.
  while (hi / lo - 1.0 > cfg.frontier_rate_rel_tol) {
    const double mid = std::sqrt(lo * hi);
    const double d = delay_at(mid);
    if (d > target_delay_s) {
      lo = mid;
    } else {
      hi = mid;
      d_hi = d;
    }
  }
  pt.required_rate_bps = hi;
  pt.measured_delay_s = d_hi;
  pt.status = std::abs(d_hi - target_delay_s) <= tolerance_s ? FrontierStatus::ok : FrontierStatus::tolerance_miss;
  return pt;
}

inline std::vector<FrontierPoint> cmd_frontier(const ExperimentConfig& cfg, double target_delay_s,
                                               double tolerance_s) {
  validate(cfg);
  if (!(target_delay_s > 0.0)) throw ConfigError("target_delay_s: must be > 0");
  if (!(tolerance_s > 0.0)) throw ConfigError("delay_tolerance_s: must be > 0");
  auto fls = cfg.frontier_f_local_values;
  auto ms = cfg.frontier_cache_values;
  std::sort(fls.begin(), fls.end());
  std::sort(ms.begin(), ms.end());
  return parallel_map(fls.size() * ms.size(), [&](std::size_t i) {
    ExperimentConfig point = cfg;
    point.f_local_hz = fls[i / ms.size()];
    point.cache_m = static_cast<std::size_t>(ms[i % ms.size()]);
    return find_required_rate(point, target_delay_s, tolerance_s);
  });
}

inline void write_frontier_csv(std::ostream& os, const std::vector<FrontierPoint>& pts, double target_delay_s) {
  os << "f_local_hz,cache_m,target_delay_s,required_rate_bps,measured_delay_s,evaluations,status\n";
  for (const auto& p : pts)
    os << fmt(p.f_local_hz) << ',' << p.cache_m << ',' << fmt(target_delay_s) << ','
       << (p.required_rate_bps ? fmt(*p.required_rate_bps) : std::string("nan")) << ',' << fmt(p.measured_delay_s)
       << ',' << p.evaluations << ',' << to_string(p.status) << '\n';
}

// ---------------------------------------------------------------------------
// analyze

struct AnalysisRow {
  double v_param = 0.0;
  SlotMeans slots;
  RegimeReport regime;
  double lemma2_gap_bits = 0.0;
};

inline std::vector<AnalysisRow> cmd_analyze(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto catalog = cfg.catalog();
  const auto kdist = KDistribution::uniform(cfg.k_min, cfg.k_max);
  const double d_ct = expected_dct(cfg.tau_bits, kdist);
  const double d_lt = expected_dlt(cfg.tau_bits, catalog.popularity(), cfg.cache_m, kdist);
  const auto slots = estimate_slot_means(catalog, cfg.cache(), cfg.system_params(), cfg.workload(cfg.seeds.front()),
                                         cfg.analysis_samples, cfg.seeds.front());
  const auto regime = prop1_dopt(slots.nl_bar, slots.nc_bar, cfg.lambda, d_ct, d_lt);

  std::vector<double> vs{cfg.v_param};
  if (cfg.sweep_axis == SweepAxis::v_param && !cfg.sweep_values.empty()) vs = cfg.sweep_values;
  std::sort(vs.begin(), vs.end());

  std::vector<AnalysisRow> rows;
  for (double v : vs) rows.push_back({v, slots, regime, lemma2_gap(v)});
  return rows;
}

inline void write_analysis_csv(std::ostream& os, const std::vector<AnalysisRow>& rows) {
  os << "v_param,d_ct_bar_bits,d_lt_bar_bits,d_lc_bar_bits,nl_bar,nl_se,nc_bar,nc_se,samples,lambda,inv_nl_bar,"
        "inv_nl_plus_inv_nc,regime,d_opt_bits,lemma2_gap_bits\n";
  for (const auto& r : rows) {
    const auto& g = r.regime;
    os << fmt(r.v_param) << ',' << fmt(g.d_ct_bar) << ',' << fmt(g.d_lt_bar) << ',' << fmt(g.d_lc_bar) << ','
       << fmt(r.slots.nl_bar) << ',' << fmt(r.slots.nl_se) << ',' << fmt(r.slots.nc_bar) << ',' << fmt(r.slots.nc_se)
       << ',' << r.slots.samples << ',' << fmt(g.lambda) << ',' << fmt(g.local_capacity()) << ','
       << fmt(g.total_capacity()) << ',' << to_string(g.regime) << ','
       << (g.d_opt_bits ? fmt(*g.d_opt_bits) : std::string("nan")) << ',' << fmt(r.lemma2_gap_bits) << '\n';
  }
}

inline void write_analysis_text(std::ostream& os, const std::vector<AnalysisRow>& rows) {
  if (rows.empty()) return;
  const auto& g = rows.front().regime;
  const auto& s = rows.front().slots;
  os << std::setprecision(6);
  os << "E[D_ct]  = " << g.d_ct_bar << " bits\n"
     << "E[D_lt]  = " << g.d_lt_bar << " bits\n"
     << "E[D_lc]  = " << g.d_lc_bar << " bits\n"
     << "E[N_l]   = " << s.nl_bar << " +- " << s.nl_se << " slots (" << s.samples << " samples)\n"
     << "E[N_c]   = " << s.nc_bar << " +- " << s.nc_se << " slots\n"
     << "lambda   = " << g.lambda << "\n"
     << "1/N_l    = " << g.local_capacity() << (g.local_capacity() >= g.lambda ? " >= " : " < ") << "lambda\n"
     << "1/N_l + 1/N_c = " << g.total_capacity() << (g.total_capacity() >= g.lambda ? " >= " : " < ") << "lambda\n"
     << "regime   = " << to_string(g.regime) << "\n"
     << "D_opt    = " << (g.d_opt_bits ? fmt(*g.d_opt_bits) + " bits" : std::string("undefined (infeasible)")) << "\n";
  for (const auto& r : rows) os << "V = " << r.v_param << "  gap bound 5/(2V) = " << r.lemma2_gap_bits << " bits\n";
}

}  // namespace mecsched
