#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mecsched {

// 1-based content index; 1 is the most popular content.
using ContentIndex = std::uint32_t;

// p_k = k^-alpha / sum_m m^-alpha for k = 1..n. alpha = 0 gives the uniform law.
inline std::vector<double> zipf_popularity(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("zipf_popularity: n must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("zipf_popularity: alpha must be a finite non-negative number");

  std::vector<double> p(n);
  long double norm = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    p[k - 1] = std::pow(static_cast<double>(k), -alpha);
    norm += p[k - 1];
  }
  for (auto& x : p) {
    x = static_cast<double>(x / norm);
    if (!(x > 0.0))
      throw std::invalid_argument("zipf_popularity: alpha too large, tail probabilities underflow");
  }
  return p;
}

class ContentCatalog {
 public:
  ContentCatalog(std::size_t n_contents, double size_bits, double zipf_alpha)
      : size_bits_(size_bits), zipf_alpha_(zipf_alpha) {
    if (!(size_bits > 0.0) || !std::isfinite(size_bits))
      throw std::invalid_argument("ContentCatalog: size_bits must be positive");
    popularity_ = zipf_popularity(n_contents, zipf_alpha);
    cumulative_.resize(popularity_.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < popularity_.size(); ++i) {
      acc += popularity_[i];
      cumulative_[i] = static_cast<double>(acc);
    }
    cumulative_.back() = 1.0;
  }

  std::size_t n_contents() const noexcept { return popularity_.size(); }
  double size_bits() const noexcept { return size_bits_; }
  double zipf_alpha() const noexcept { return zipf_alpha_; }
  const std::vector<double>& popularity() const noexcept { return popularity_; }

  // Probability of content `index` (1-based).
  double probability(ContentIndex index) const {
    check_index(index);
    return popularity_[index - 1];
  }

  // Inverse-CDF draw; u must lie in [0, 1).
  ContentIndex index_for(double u) const noexcept {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<ContentIndex>(it - cumulative_.begin()) + 1;
  }

  void check_index(ContentIndex index) const {
    if (index < 1 || index > popularity_.size())
      throw std::invalid_argument("content index " + std::to_string(index) + " outside 1.." +
                                  std::to_string(popularity_.size()));
  }

 private:
  double size_bits_;
  double zipf_alpha_;
  std::vector<double> popularity_;
  std::vector<double> cumulative_;
};

// Most-popular caching: the device holds exactly contents 1..capacity.
struct CacheConfig {
  std::size_t capacity = 0;
};

inline void validate(const CacheConfig& cache, const ContentCatalog& catalog) {
  if (cache.capacity > catalog.n_contents())
    throw std::invalid_argument("cache capacity " + std::to_string(cache.capacity) +
                                " exceeds catalog size " + std::to_string(catalog.n_contents()));
}

inline bool is_cached(ContentIndex index, const CacheConfig& cache, const ContentCatalog& catalog) {
  catalog.check_index(index);
  return index <= cache.capacity;
}

}  // namespace mecsched
