#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "signbias/rng.hpp"

using namespace signbias;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, KnownXoshiroOutputFromSplitMixSeeding) {
  // Reference: state from four splitmix64 steps of seed 0, then one
  // xoshiro256** step computed by hand from the published recurrence.
  std::uint64_t sm = 0;
  std::uint64_t s[4];
  for (auto& x : s) x = splitmix64(sm);
  EXPECT_EQ(s[0], 0xe220a8397b1dcdafULL);
  const auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t expected = rotl(s[1] * 5, 7) * 9;
  Rng rng(0);
  EXPECT_EQ(rng.next(), expected);
}

TEST(Rng, DerivedSeedsDifferByNameAndIndex) {
  std::set<std::uint64_t> seen;
  for (const char* name : {"gen", "sampler", "augment", "init"}) {
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, name, i));
  }
  EXPECT_EQ(seen.size(), 200u);
  EXPECT_EQ(derive_seed(7, "gen", 3), derive_seed(7, "gen", 3));
  EXPECT_NE(derive_seed(7, "gen"), derive_seed(8, "gen"));
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(1);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, BelowIsUnbiased) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // 0.999 quantile, 6 dof
  EXPECT_EQ(rng.below(0), 0u);
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(s2 / n - mean * mean, 1.0, 0.02);
}

TEST(Rng, LaplaceMeanAbsoluteDeviation) {
  Rng rng(9);
  const int n = 200000;
  double mad = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.laplace(2.0);
    ASSERT_TRUE(std::isfinite(x));
    mad += std::abs(x);
  }
  EXPECT_NEAR(mad / n, 2.0, 0.03);
}
