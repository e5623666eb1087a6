#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecsched/catalog.hpp"
#include "mecsched/dynamics.hpp"
#include "mecsched/error.hpp"
#include "mecsched/policy.hpp"
#include "mecsched/workload.hpp"

namespace mecsched {

// Counters over a contiguous range of slots.
struct MetricWindow {
  std::uint64_t first_slot = 0;
  std::uint64_t slots = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t dispatched = 0;  // tasks handed to a processor
  std::uint64_t completions = 0;
  std::uint64_t dispatched_local = 0;
  double tx_bits = 0.0;
  double queue_len_sum = 0.0;  // sum of Q(t), observed before the decision
  std::vector<std::uint64_t> delays_slots;  // tasks that arrived in the window and completed before T
};

struct RunMetrics {
  std::uint64_t horizon_slots = 0;
  MetricWindow total;   // every slot
  MetricWindow window;  // slots after warm-up
  std::vector<std::uint32_t> queue_len_series;  // Q(t) every `series_stride` slots
  std::uint32_t series_stride = 1;
  std::size_t final_queue = 0;
  std::size_t final_in_service = 0;
  std::uint64_t drift_violations = 0;
  bool infeasibility_flag = false;  // windowed queue means grew across every decile
};

struct RunOptions {
  double warmup_frac = 0.1;
  std::uint32_t series_stride = 1;
};

// Mean of each tenth of `series` (needs at least 10 samples).
inline std::vector<double> decile_means(const std::vector<std::uint32_t>& series) {
  std::vector<double> means;
  if (series.size() < 10) return means;
  const std::size_t n = series.size();
  for (std::size_t d = 0; d < 10; ++d) {
    const std::size_t lo = d * n / 10, hi = (d + 1) * n / 10;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += series[i];
    means.push_back(s / static_cast<double>(hi - lo));
  }
  return means;
}

inline bool strictly_increasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

namespace detail {

inline void check_run_config(const ContentCatalog& catalog, const CacheConfig& cache, const SystemParams& params,
                             const WorkloadConfig& workload, const PolicySpec& policy, std::uint64_t horizon,
                             const RunOptions& opts) {
  try {
    validate(cache, catalog);
    params.validate();
    workload.validate();
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (horizon < 1) throw ConfigError("horizon must be >= 1 slot");
  if (!(opts.warmup_frac >= 0.0 && opts.warmup_frac < 1.0)) throw ConfigError("warmup_frac must lie in [0, 1)");
  if (opts.series_stride < 1) throw ConfigError("series_stride must be >= 1");
  const double max_bits = catalog.size_bits() * workload.k_max;
  const double worst_slots =
      max_bits * params.cycles_per_bit / (std::min(params.f_local_hz, params.f_mec_hz) * params.slot_seconds) +
      max_bits / (params.rate_bps * params.slot_seconds);
  if (!std::isfinite(max_bits) || !(worst_slots < 4e9))
    throw ConfigError("k_max * tau yields slot counts beyond the 32-bit busy counters");
  if (!(max_bits * static_cast<double>(horizon) < 0x1.0p53))
    throw ConfigError("k_max * tau * horizon exceeds exact double accounting");
}

}  // namespace detail

// Slotted loop: observe (Q, S_l, S_c), decide, step, record.
inline RunMetrics run_simulation(const ContentCatalog& catalog, const CacheConfig& cache, const SystemParams& params,
                                 const WorkloadConfig& workload, const PolicySpec& policy, std::uint64_t horizon,
                                 const RunOptions& opts = {}) {
  detail::check_run_config(catalog, cache, params, workload, policy, horizon, opts);

  RunMetrics m;
  m.horizon_slots = horizon;
  m.series_stride = opts.series_stride;
  m.queue_len_series.reserve(horizon / opts.series_stride + 1);
  const auto warmup = static_cast<std::uint64_t>(std::floor(opts.warmup_frac * static_cast<double>(horizon)));
  m.window.first_slot = warmup;

  TaskSource source(catalog, workload);
  SystemState state;

  for (std::uint64_t t = 0; t < horizon; ++t) {
    const bool in_window = t >= warmup;
    const std::size_t q = state.q_len();
    if (t % opts.series_stride == 0) m.queue_len_series.push_back(static_cast<std::uint32_t>(q));

    const Action action = decide(policy, state);

    std::optional<TaskProfile> arrival;
    if (source.next_arrival()) arrival = profile(source.next_task(t), cache, catalog, params);

    const StepOutcome out = step(state, action, arrival, t);

    if (!drift_inequality_holds(static_cast<std::int64_t>(q), out.scheduled, out.arrived,
                                static_cast<std::int64_t>(out.q_after)))
      ++m.drift_violations;

    auto record = [&](MetricWindow& w, bool count_delays) {
      ++w.slots;
      w.queue_len_sum += static_cast<double>(q);
      w.arrivals += static_cast<std::uint64_t>(out.arrived);
      w.dispatched += static_cast<std::uint64_t>(out.scheduled);
      w.dispatched_local += uses_local(action) ? 1u : 0u;
      w.tx_bits += out.transmitted_bits;
      w.completions += out.completions.size();
      if (count_delays)
        for (const auto& c : out.completions)
          if (c.arrival_slot >= w.first_slot) w.delays_slots.push_back(c.delay_slots());
    };
    record(m.total, true);
    if (in_window) record(m.window, true);
  }

  m.final_queue = state.q_len();
  m.final_in_service = state.in_service_count();
  if (m.total.arrivals != m.total.completions + m.final_queue + m.final_in_service)
    throw ContractViolation("task conservation violated at end of run");
  m.infeasibility_flag = strictly_increasing(decile_means(m.queue_len_series));
  return m;
}

// Transmitted bits per dispatched task in the window. Dispatched tasks are the
// ones whose data was counted, so the ratio stays a per-task quantity even
// when the queue diverges.
inline double avg_data_per_task(const MetricWindow& w) {
  if (w.arrivals == 0) throw MetricError("average data per task is undefined: no arrivals");
  if (w.dispatched == 0) return 0.0;
  return w.tx_bits / static_cast<double>(w.dispatched);
}
inline double avg_data_per_task(const RunMetrics& m) { return avg_data_per_task(m.window); }

// tx_bits / arrivals: the finite-T surrogate of the 1/(lambda T) normalization.
inline double avg_data_per_arrival(const MetricWindow& w) {
  if (w.arrivals == 0) throw MetricError("average data per arrival is undefined: no arrivals");
  return w.tx_bits / static_cast<double>(w.arrivals);
}

inline double avg_queue_length(const MetricWindow& w) {
  return w.slots == 0 ? 0.0 : w.queue_len_sum / static_cast<double>(w.slots);
}
inline double avg_queue_length(const RunMetrics& m) { return avg_queue_length(m.window); }

// Little's law waiting time: mean queue length / lambda, in seconds.
inline double little_delay(double avg_queue_len, double lambda, double slot_seconds) {
  if (!(lambda > 0.0)) throw MetricError("Little's-law delay is undefined for lambda = 0");
  return avg_queue_len / lambda * slot_seconds;
}
inline double little_delay(const RunMetrics& m, double lambda, double slot_seconds) {
  return little_delay(avg_queue_length(m), lambda, slot_seconds);
}

// Mean measured sojourn (arrival slot through completion slot), seconds.
inline double measured_mean_delay(const MetricWindow& w, double slot_seconds) {
  if (w.delays_slots.empty()) return 0.0;
  const double sum = std::accumulate(w.delays_slots.begin(), w.delays_slots.end(), 0.0);
  return sum / static_cast<double>(w.delays_slots.size()) * slot_seconds;
}
inline double measured_mean_delay(const RunMetrics& m, double slot_seconds) {
  return measured_mean_delay(m.window, slot_seconds);
}

}  // namespace mecsched
