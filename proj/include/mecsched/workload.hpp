#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mecsched/catalog.hpp"

namespace mecsched {

struct Task {
  std::uint64_t id = 0;
  std::uint64_t arrival_slot = 0;
  std::vector<ContentIndex> contents;  // h_1..h_K, repeats allowed

  std::size_t k() const noexcept { return contents.size(); }
  double total_bits(const ContentCatalog& catalog) const noexcept {
    return catalog.size_bits() * static_cast<double>(contents.size());
  }
};

struct WorkloadConfig {
  double arrival_prob = 0.4;
  unsigned k_min = 40;
  unsigned k_max = 60;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0))
      throw std::invalid_argument("arrival_prob must lie in [0, 1]");
    if (k_min < 1 || k_min > k_max) throw std::invalid_argument("need 1 <= k_min <= k_max");
  }
};

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
template <class Urbg>
double uniform01(Urbg& rng) {
  static_assert(Urbg::max() - Urbg::min() == ~std::uint64_t{0}, "expects a full 64-bit engine");
  return static_cast<double>((rng() - Urbg::min()) >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi]. Rejection sampling keeps it exactly unbiased.
template <class Urbg>
std::uint64_t uniform_int(Urbg& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x;
  do {
    x = rng() - Urbg::min();
  } while (x >= limit);
  return lo + x % span;
}

// A(t): Bernoulli(lambda).
template <class Urbg>
bool sample_arrival(Urbg& rng, double lambda) {
  return uniform01(rng) < lambda;
}

// K_t ~ U{k_min..k_max}; contents drawn i.i.d. from the catalog popularity.
template <class Urbg>
Task sample_task(Urbg& rng, const ContentCatalog& catalog, const WorkloadConfig& cfg,
                 std::uint64_t slot, std::uint64_t id = 0) {
  Task task;
  task.id = id;
  task.arrival_slot = slot;
  const auto k = uniform_int(rng, cfg.k_min, cfg.k_max);
  task.contents.resize(k);
  for (auto& c : task.contents) c = catalog.index_for(uniform01(rng));
  return task;
}

// Two independently seeded streams so that the content of the j-th task does
// not depend on the arrival probability.
class TaskSource {
 public:
  TaskSource(const ContentCatalog& catalog, WorkloadConfig cfg)
      : catalog_(&catalog), cfg_(cfg), arrivals_(seed_for(cfg.seed, 0xA1)),
        composition_(seed_for(cfg.seed, 0xC0)) {
    cfg_.validate();
  }

  bool next_arrival() { return sample_arrival(arrivals_, cfg_.arrival_prob); }

  Task next_task(std::uint64_t slot) { return sample_task(composition_, *catalog_, cfg_, slot, next_id_++); }

  const WorkloadConfig& config() const noexcept { return cfg_; }

 private:
  static std::mt19937_64 seed_for(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
  }

  const ContentCatalog* catalog_;
  WorkloadConfig cfg_;
  std::mt19937_64 arrivals_;
  std::mt19937_64 composition_;
  std::uint64_t next_id_ = 0;
};

}  // namespace mecsched
