#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mecsched/catalog.hpp"
#include "mecsched/dynamics.hpp"
#include "mecsched/workload.hpp"

namespace mecsched {

// Distribution of K_t on {k_min, ..., k_max}.
class KDistribution {
 public:
  KDistribution(unsigned k_min, std::vector<double> pmf) : k_min_(k_min), pmf_(std::move(pmf)) {
    if (k_min_ < 1 || pmf_.empty()) throw std::invalid_argument("KDistribution needs k_min >= 1 and a non-empty pmf");
    double s = 0.0;
    for (double x : pmf_) {
      if (!(x >= 0.0)) throw std::invalid_argument("KDistribution: negative probability");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("KDistribution: pmf does not sum to 1");
  }

  static KDistribution uniform(unsigned k_min, unsigned k_max) {
    if (k_min < 1 || k_max < k_min) throw std::invalid_argument("KDistribution::uniform needs 1 <= k_min <= k_max");
    const std::size_t n = k_max - k_min + 1;
    return KDistribution(k_min, std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static KDistribution from(const WorkloadConfig& w) { return uniform(w.k_min, w.k_max); }

  unsigned k_min() const noexcept { return k_min_; }
  unsigned k_max() const noexcept { return k_min_ + static_cast<unsigned>(pmf_.size()) - 1; }
  double probability(unsigned k) const noexcept {
    return (k < k_min_ || k > k_max()) ? 0.0 : pmf_[k - k_min_];
  }
  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) m += pmf_[i] * static_cast<double>(k_min_ + i);
    return m;
  }

 private:
  unsigned k_min_;
  std::vector<double> pmf_;
};

// E[D_ct] = tau E[K].
inline double expected_dct(double tau_bits, const KDistribution& k) { return tau_bits * k.mean(); }

// E[D_lc] = E[D] as well: local mode processes the whole task.
inline double expected_dlc(double tau_bits, const KDistribution& k) { return tau_bits * k.mean(); }

// E[D_lt] = tau sum_{n>M} sum_k (1 - (1 - p_n)^k) Pr(K = k), for i.i.d. draws.
inline double expected_dlt(double tau_bits, const std::vector<double>& popularity, std::size_t cache_m,
                           const KDistribution& k) {
  if (cache_m > popularity.size()) throw std::invalid_argument("expected_dlt: M exceeds N");
  long double acc = 0.0L;
  for (std::size_t n = cache_m; n < popularity.size(); ++n) {
    const double log_miss = std::log1p(-popularity[n]);
    for (unsigned kk = k.k_min(); kk <= k.k_max(); ++kk) {
      const double pk = k.probability(kk);
      if (pk == 0.0) continue;
      acc += -std::expm1(static_cast<double>(kk) * log_miss) * pk;
    }
  }
  return tau_bits * static_cast<double>(acc);
}

struct SlotMeans {
  double nl_bar = 0.0;
  double nl_se = 0.0;
  double nc_bar = 0.0;
  double nc_se = 0.0;
  double dlt_bar = 0.0;  // Monte Carlo E[D_lt] from the same draws
  double dlt_se = 0.0;
  std::uint64_t samples = 0;
};

// Monte Carlo estimates of E[N_l] and E[N_c] over freshly sampled tasks.
inline SlotMeans estimate_slot_means(const ContentCatalog& catalog, const CacheConfig& cache,
                                     const SystemParams& params, const WorkloadConfig& workload,
                                     std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("estimate_slot_means: samples must be >= 1");
  validate(cache, catalog);
  params.validate();
  workload.validate();

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xE5u};
  std::mt19937_64 rng(seq);

  // Welford accumulators
  struct Acc {
    double mean = 0.0, m2 = 0.0;
    std::uint64_t n = 0;
    void add(double x) {
      ++n;
      const double d = x - mean;
      mean += d / static_cast<double>(n);
      m2 += d * (x - mean);
    }
    double se() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; }
  } nl, nc, dlt;

  for (std::uint64_t i = 0; i < samples; ++i) {
    const TaskProfile tp = profile(sample_task(rng, catalog, workload, 0, i), cache, catalog, params);
    nl.add(tp.slots_local);
    nc.add(tp.slots_mec);
    dlt.add(tp.local_bits);
  }
  return {nl.mean, nl.se(), nc.mean, nc.se(), dlt.mean, dlt.se(), samples};
}

enum class Regime : std::uint8_t { local_only_optimal, mixed, infeasible };

inline std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::local_only_optimal: return "local_only_optimal";
    case Regime::mixed: return "mixed";
    case Regime::infeasible: break;
  }
  return "infeasible";
}

struct RegimeReport {
  double nl_bar = 0.0;
  double nc_bar = 0.0;
  double lambda = 0.0;
  Regime regime = Regime::infeasible;
  std::optional<double> d_opt_bits;
  double d_ct_bar = 0.0;
  double d_lt_bar = 0.0;
  double d_lc_bar = 0.0;

  double local_capacity() const noexcept { return 1.0 / nl_bar; }                  // 1/N_l
  double total_capacity() const noexcept { return 1.0 / nl_bar + 1.0 / nc_bar; }   // 1/N_l + 1/N_c
};

// Mixed-regime optimum: D_ct - (D_ct - D_lt) / (lambda N_l).
inline double mixed_regime_data(double d_ct_bar, double d_lt_bar, double lambda, double nl_bar) {
  return d_ct_bar - (d_ct_bar - d_lt_bar) / (lambda * nl_bar);
}

// Optimal long-run data per task and its regime.
inline RegimeReport prop1_dopt(double nl_bar, double nc_bar, double lambda, double d_ct_bar, double d_lt_bar) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("prop1_dopt: lambda must lie in (0, 1]");
  if (!(nl_bar >= 1.0) || !(nc_bar >= 1.0)) throw std::invalid_argument("prop1_dopt: slot means must be >= 1");

  RegimeReport r;
  r.nl_bar = nl_bar;
  r.nc_bar = nc_bar;
  r.lambda = lambda;
  r.d_ct_bar = d_ct_bar;
  r.d_lt_bar = d_lt_bar;
  r.d_lc_bar = d_ct_bar;
  if (1.0 / nl_bar >= lambda) {
    r.regime = Regime::local_only_optimal;
    r.d_opt_bits = d_lt_bar;
  } else if (1.0 / nl_bar + 1.0 / nc_bar >= lambda) {
    r.regime = Regime::mixed;
    r.d_opt_bits = mixed_regime_data(d_ct_bar, d_lt_bar, lambda, nl_bar);
  } else {
    r.regime = Regime::infeasible;
  }
  return r;
}

// Additive optimality gap 5/(2V), in the data unit V is expressed against
// (bits here). Unbounded for V = 0.
inline double lemma2_gap(double v) {
  if (v < 0.0 || std::isnan(v)) throw std::invalid_argument("lemma2_gap: V must be non-negative");
  if (v == 0.0) return std::numeric_limits<double>::infinity();
  return 5.0 / (2.0 * v);
}

// Drift-bound constant (5 + 2 Q A) / 2.
inline double lemma1_cmax(std::uint64_t q, unsigned a) {
  if (a > 1) throw std::invalid_argument("lemma1_cmax: A(t) must be 0 or 1");
  return (5.0 + 2.0 * static_cast<double>(q) * a) / 2.0;
}

}  // namespace mecsched
