#include <cmath>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "mecsched/analysis.hpp"

using namespace mecsched;

namespace {

// Exact E[#distinct uncached] by enumerating every content sequence of every
// length; only feasible for tiny catalogs.
double enumerate_expected_dlt(double tau, const std::vector<double>& p, std::size_t m, const KDistribution& kd) {
  const std::size_t n = p.size();
  double total = 0.0;
  for (unsigned k = kd.k_min(); k <= kd.k_max(); ++k) {
    std::vector<std::size_t> seq(k, 0);
    double expect_k = 0.0;
    while (true) {
      double prob = 1.0;
      std::set<std::size_t> missing;
      for (auto c : seq) {
        prob *= p[c];
        if (c >= m) missing.insert(c);
      }
      expect_k += prob * static_cast<double>(missing.size());
      std::size_t i = 0;
      while (i < k && ++seq[i] == n) seq[i++] = 0;
      if (i == k) break;
    }
    total += kd.probability(k) * expect_k;
  }
  return tau * total;
}

SystemParams reference_params() { return SystemParams{0.2, 1.0, 1e9, 10e9, 500e6}; }

}  // namespace

TEST(ExpectedDct, Values) {
  EXPECT_DOUBLE_EQ(expected_dct(5e6, KDistribution::uniform(40, 60)), 250e6);
  EXPECT_DOUBLE_EQ(expected_dct(5e6, KDistribution::uniform(1, 1)), 5e6);
  EXPECT_DOUBLE_EQ(expected_dct(3 * 5e6, KDistribution::uniform(40, 60)), 3 * 250e6);
  EXPECT_DOUBLE_EQ(expected_dlc(5e6, KDistribution::uniform(40, 60)), 250e6);
}

TEST(ExpectedDlt, EdgeCases) {
  const auto p = zipf_popularity(100, 0.8);
  EXPECT_EQ(expected_dlt(5e6, p, 100, KDistribution::uniform(40, 60)), 0.0);
  EXPECT_DOUBLE_EQ(expected_dlt(5e6, zipf_popularity(1, 0.8), 0, KDistribution::uniform(1, 1)), 5e6);
  EXPECT_THROW(expected_dlt(5e6, p, 101, KDistribution::uniform(1, 1)), std::invalid_argument);
}

TEST(ExpectedDlt, MatchesEnumerationOracle) {
  for (double alpha : {0.0, 0.8, 1.5}) {
    const auto p = zipf_popularity(4, alpha);
    const KDistribution kd(1, {0.2, 0.5, 0.3, 0.0, 0.0});  // K in {1,2,3}
    for (std::size_t m = 0; m <= 4; ++m)
      EXPECT_NEAR(expected_dlt(1.0, p, m, kd), enumerate_expected_dlt(1.0, p, m, kd), 1e-12)
          << "alpha=" << alpha << " M=" << m;
  }
}

TEST(ExpectedDlt, MonotoneInCacheAndBelowDct) {
  const auto p = zipf_popularity(1000, 0.8);
  const auto kd = KDistribution::uniform(40, 60);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m <= 1000; m += 25) {
    const double d = expected_dlt(5e6, p, m, kd);
    EXPECT_LE(d, prev);
    EXPECT_LE(d, expected_dct(5e6, kd));
    prev = d;
  }
}

TEST(EstimateSlotMeans, ZeroVariancePopulation) {
  ContentCatalog cat(50, 5e6, 0.8);
  const WorkloadConfig w{0.4, 50, 50, 0};
  const auto s = estimate_slot_means(cat, CacheConfig{50}, reference_params(), w, 1000, 3);
  // nothing transmitted locally: ceil(1.25) = 2; MEC: ceil(0.125 + 2.5) = 3
  EXPECT_EQ(s.nl_bar, 2.0);
  EXPECT_EQ(s.nc_bar, 3.0);
  EXPECT_EQ(s.nl_se, 0.0);
  EXPECT_EQ(s.nc_se, 0.0);
  EXPECT_EQ(s.samples, 1000u);
}

TEST(EstimateSlotMeans, FasterDeviceNeverSlower) {
  ContentCatalog cat(1000, 5e6, 0.8);
  const WorkloadConfig w{0.4, 40, 60, 0};
  auto p = reference_params();
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    const auto s = estimate_slot_means(cat, CacheConfig{50}, p, w, 20000, 8);
    EXPECT_LE(s.nl_bar, prev);
    prev = s.nl_bar;
    p.f_local_hz *= 2;
  }
}

TEST(EstimateSlotMeans, SeedsAgreeWithinStandardErrors) {
  ContentCatalog cat(1000, 5e6, 0.8);
  const WorkloadConfig w{0.4, 40, 60, 0};
  const auto a = estimate_slot_means(cat, CacheConfig{50}, reference_params(), w, 100000, 1);
  const auto b = estimate_slot_means(cat, CacheConfig{50}, reference_params(), w, 100000, 2);
  EXPECT_NEAR(a.nl_bar, b.nl_bar, 3 * std::hypot(a.nl_se, b.nl_se));
  EXPECT_NEAR(a.nc_bar, b.nc_bar, 3 * std::hypot(a.nc_se, b.nc_se));
  EXPECT_GT(a.nl_se, 0.0);
  EXPECT_THROW(estimate_slot_means(cat, CacheConfig{50}, reference_params(), w, 0, 1), std::invalid_argument);
}

TEST(OptimalAverageData, Regimes) {
  // 1/N_l >= lambda: D_opt = D_lt
  auto r = prop1_dopt(2.0, 3.0, 0.4, 250.0, 140.0);
  EXPECT_EQ(r.regime, Regime::local_only_optimal);
  EXPECT_DOUBLE_EQ(*r.d_opt_bits, 140.0);
  // mixed: 250 - (250 - 140) / (0.4 * 3)
  r = prop1_dopt(3.0, 3.0, 0.4, 250.0, 140.0);
  EXPECT_EQ(r.regime, Regime::mixed);
  EXPECT_DOUBLE_EQ(*r.d_opt_bits, 250.0 - 110.0 / 1.2);
  // 1/4 + 1/4 < 0.6
  r = prop1_dopt(4.0, 4.0, 0.6, 250.0, 140.0);
  EXPECT_EQ(r.regime, Regime::infeasible);
  EXPECT_FALSE(r.d_opt_bits.has_value());
  EXPECT_THROW(prop1_dopt(3.0, 3.0, 0.0, 250.0, 140.0), std::invalid_argument);
  EXPECT_THROW(prop1_dopt(0.5, 3.0, 0.4, 250.0, 140.0), std::invalid_argument);
}

TEST(OptimalAverageData, ContinuousAtLocalBoundary) {
  // lambda N_l = 1 makes the mixed expression collapse to D_lt.
  EXPECT_DOUBLE_EQ(mixed_regime_data(250.0, 140.0, 0.25, 4.0), 140.0);
  const auto r = prop1_dopt(4.0, 3.0, 0.25, 250.0, 140.0);
  EXPECT_EQ(r.regime, Regime::local_only_optimal);
  EXPECT_DOUBLE_EQ(*r.d_opt_bits, 140.0);
}

TEST(OptimalAverageData, PartitionAndBounds) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> n(1.0, 10.0), lam(1e-3, 1.0), d(0.0, 1e9);
  for (int i = 0; i < 100000; ++i) {
    const double nl = n(rng), nc = n(rng), l = lam(rng);
    double dct = d(rng), dlt = d(rng);
    if (dlt > dct) std::swap(dlt, dct);
    const auto r = prop1_dopt(nl, nc, l, dct, dlt);
    const int matches = (1.0 / nl >= l) + (1.0 / nl < l && 1.0 / nl + 1.0 / nc >= l) + (1.0 / nl + 1.0 / nc < l);
    ASSERT_EQ(matches, 1);
    ASSERT_EQ(r.d_opt_bits.has_value(), r.regime != Regime::infeasible);
    if (r.d_opt_bits) {
      ASSERT_GE(*r.d_opt_bits, dlt - 1e-6);
      ASSERT_LE(*r.d_opt_bits, dct + 1e-6);
    }
  }
}

TEST(DataGapBound, Values) {
  EXPECT_DOUBLE_EQ(lemma2_gap(2.5), 1.0);
  EXPECT_DOUBLE_EQ(lemma2_gap(5.0), 0.5);
  EXPECT_LT(lemma2_gap(1e12), 1e-11);
  EXPECT_TRUE(std::isinf(lemma2_gap(0.0)));
  EXPECT_THROW(lemma2_gap(-1.0), std::invalid_argument);
}

TEST(PerSlotCostBound, Values) {
  EXPECT_DOUBLE_EQ(lemma1_cmax(17, 0), 2.5);
  EXPECT_DOUBLE_EQ(lemma1_cmax(3, 1), 5.5);
  EXPECT_DOUBLE_EQ(lemma1_cmax(0, 1), 2.5);
  EXPECT_THROW(lemma1_cmax(0, 2), std::invalid_argument);
}

TEST(KDistribution, Validation) {
  EXPECT_DOUBLE_EQ(KDistribution::uniform(40, 60).mean(), 50.0);
  EXPECT_THROW(KDistribution(1, {0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(KDistribution::uniform(5, 4), std::invalid_argument);
  EXPECT_EQ(KDistribution::uniform(40, 60).probability(61), 0.0);
}
