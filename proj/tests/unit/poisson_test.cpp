#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "adequate/errors.hpp"
#include "adequate/numerics/distributions.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/poisson/adequacy.hpp"

namespace ap = adequate::poisson;
namespace an = adequate::numerics;

namespace {

std::vector<long> poisson_counts(double lambda, std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::poisson_distribution<long> d(lambda);
  std::vector<long> out(n);
  for (auto& c : out) c = d(gen);
  return out;
}

// Naive recomputation: factorials by product, overflow by complement.
double naive_stat(const std::vector<long>& counts, int k, double lambda) {
  std::vector<double> freq(k + 2, 0.0), p(k + 2, 0.0);
  for (long c : counts) freq[std::min<long>(c, k + 1)] += 1.0 / counts.size();
  double fact = 1.0, rest = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) fact *= j;
    p[j] = std::pow(lambda, j) * std::exp(-lambda) / fact;
    rest -= p[j];
  }
  p[k + 1] = rest;
  double s = 0.0;
  for (int j = 0; j <= k + 1; ++j) s += (freq[j] - p[j]) * (freq[j] - p[j]) / p[j];
  return s;
}

}  // namespace

TEST(CountSample, FrequenciesAndTruncation) {
  const ap::CountSample s({0, 1, 1, 2, 7, 3, 0, 0}, 3);
  ASSERT_EQ(s.frequencies().size(), 5u);
  EXPECT_DOUBLE_EQ(s.frequencies()[0], 3.0 / 8);
  EXPECT_DOUBLE_EQ(s.frequencies()[4], 1.0 / 8);
  double sum = 0.0;
  for (double f : s.frequencies()) sum += f;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_THROW(ap::CountSample({}), adequate::DomainError);
  EXPECT_THROW(ap::CountSample({1, -1}), adequate::DomainError);
  EXPECT_THROW(ap::CountSample({1, 2}, 0), adequate::ConfigurationError);
}

TEST(CountSample, DefaultTruncationMatchesBruteForce) {
  for (std::size_t n : {5u, 50u, 200u, 5000u}) {
    for (double m : {0.1, 1.0, 2.0, 7.5, 40.0}) {
      int expected = 1;
      for (int k = 1; k < 500; ++k) {
        double cdf = 0.0;
        for (int j = 0; j <= k; ++j) cdf += std::exp(j * std::log(m) - m - std::lgamma(j + 1.0));
        if (n * (1.0 - cdf) >= 1.0) expected = k;
      }
      EXPECT_EQ(ap::default_truncation(n, m), expected) << n << " " << m;
    }
  }
}

TEST(ChisqStat, ZeroAtExactFrequencies) {
  for (double lambda : {0.5, 2.0, 9.0}) {
    const auto p = ap::cell_probabilities(6, lambda);
    EXPECT_EQ(ap::chisq_stat(p, lambda), 0.0);
  }
}

TEST(ChisqStat, PermutationInvariant) {
  auto counts = poisson_counts(3.0, 60, 4);
  const ap::CountSample a(counts);
  std::shuffle(counts.begin(), counts.end(), std::mt19937(9));
  const ap::CountSample b(counts);
  EXPECT_EQ(ap::chisq_family_stat(a), ap::chisq_family_stat(b));
  EXPECT_EQ(ap::chisq_stat(a, 2.5), ap::chisq_stat(b, 2.5));
}

TEST(ChisqStat, MatchesNaiveRecomputation) {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto counts = poisson_counts(2.0, 200, seed);
    const ap::CountSample s(counts);
    EXPECT_NEAR(ap::chisq_family_stat(s), naive_stat(counts, s.k(), s.mean()), 1e-12);
    EXPECT_NEAR(ap::chisq_stat(s, 2.0), naive_stat(counts, s.k(), 2.0), 1e-12);
  }
}

TEST(ChisqStat, AllZeroCountsAreADomainError) {
  const ap::CountSample s({0, 0, 0});
  EXPECT_THROW(ap::chisq_family_stat(s), adequate::DomainError);
  EXPECT_GT(ap::chisq_stat(s, 0.5), 0.0);
}

TEST(DrawPoisson, MatchesPmf) {
  for (double lambda : {0.3, 2.0, 30.0, 1000.0}) {
    std::map<long, double> freq;
    const int draws = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      an::CounterRng rng(5, 77, i);
      const long k = ap::draw_poisson(rng, lambda);
      freq[k] += 1.0 / draws;
      sum += k;
      sq += static_cast<double>(k) * k;
    }
    const double mean = sum / draws, var = sq / draws - mean * mean;
    EXPECT_NEAR(mean, lambda, 4.0 * std::sqrt(lambda / draws));
    EXPECT_NEAR(var / lambda, 1.0, 0.02);
    const long mode = static_cast<long>(lambda);
    const double p = an::poisson_pmf(static_cast<int>(mode), lambda);
    EXPECT_NEAR(freq[mode], p, 4.0 * std::sqrt(p / draws));
  }
}

TEST(CriticalValue, IndependentOfWorkerCount) {
  ap::PoissonConfig cfg;
  cfg.replications = 500;
  an::set_worker_count(1);
  const double one = ap::critical_value(40, 4, 2.0, cfg);
  an::set_worker_count(3);
  const double three = ap::critical_value(40, 4, 2.0, cfg);
  an::set_worker_count(0);
  EXPECT_EQ(one, three);
}

TEST(LambdaSet, CoversTheGeneratingModel) {
  // Critical values depend on k, so cache them per k.
  std::map<int, double> crit;
  const int runs = 400;
  int covered = 0;
  for (int r = 0; r < runs; ++r) {
    const ap::CountSample s(poisson_counts(2.0, 200, 1000 + r));
    if (!crit.count(s.k())) crit[s.k()] = ap::critical_value(200, s.k(), 2.0);
    covered += ap::chisq_stat(s, 2.0) <= crit[s.k()];
  }
  const double se = std::sqrt(0.95 * 0.05 / runs);
  EXPECT_GE(static_cast<double>(covered) / runs, 0.95 - 3.0 * se);
}

TEST(LambdaSet, ContainsTruthAndExcludesExtremes) {
  const ap::CountSample s(poisson_counts(2.0, 500, 77));
  std::vector<double> grid{1e-3, 0.5, 1.0, 1.5, 1.8, 1.9, 2.0, 2.1, 2.2, 2.5, 3.0, 5.0, 100.0};
  ap::PoissonConfig cfg;
  cfg.replications = 1000;
  const auto set = ap::lambda_adequacy_set(s, grid, cfg);
  EXPECT_TRUE(set.profile[6].adequate);
  EXPECT_FALSE(set.profile.front().adequate);
  EXPECT_FALSE(set.profile.back().adequate);
  EXPECT_LT(set.count(), grid.size());
  const auto hull = set.hull();
  ASSERT_TRUE(hull);
  EXPECT_LE(hull->low, 2.0);
  EXPECT_GE(hull->high, 2.0);
}

TEST(LambdaSet, ProfileHasASingleLocalMinimum) {
  for (unsigned seed : {3u, 4u, 5u}) {
    const ap::CountSample s(poisson_counts(2.0, 300, seed));
    const auto grid = ap::default_lambda_grid(s);
    std::vector<double> prof;
    for (double l : grid) prof.push_back(ap::chisq_stat(s, l));
    int minima = 0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      const bool left = i == 0 || prof[i] < prof[i - 1];
      const bool right = i + 1 == prof.size() || prof[i] < prof[i + 1];
      minima += left && right;
    }
    EXPECT_EQ(minima, 1) << seed;
  }
}

TEST(LambdaSet, MinimizerAgreesWithGridSearch) {
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    const ap::CountSample s(poisson_counts(4.0, 100, seed));
    const auto grid = ap::default_lambda_grid(s, 2001);
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (ap::chisq_stat(s, grid[i]) < ap::chisq_stat(s, grid[best])) best = i;
    }
    const double m = ap::minimize_statistic(s, grid.front(), grid.back());
    EXPECT_LE(std::fabs(m - grid[best]), grid[1] - grid[0]);
    EXPECT_LE(ap::chisq_stat(s, m), ap::chisq_stat(s, grid[best]) + 1e-12);
  }
}
