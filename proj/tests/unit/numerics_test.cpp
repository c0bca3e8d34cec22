#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <random>
#include <vector>

#include "adequate/errors.hpp"
#include "adequate/numerics/distributions.hpp"
#include "adequate/numerics/empirical.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/random.hpp"
#include "adequate/numerics/simulation.hpp"
#include "adequate/numerics/special.hpp"

namespace an = adequate::numerics;

namespace {

// Independent erf via its Maclaurin series; fine for |x| < 3.
double erf_series(double x) {
  double term = x;
  double sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= -x * x / k;
    sum += term / (2 * k + 1);
  }
  return 2.0 / std::sqrt(M_PI) * sum;
}

double bisect_normal_quantile(double p) {
  double lo = -8.0, hi = 8.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * (1.0 + erf_series(mid / std::sqrt(2.0))) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// O(n^2) sup search: F_n by counting at each data point and its left limit.
an::EdfDeviation brute_deviation(const std::vector<double>& sample) {
  const double n = static_cast<double>(sample.size());
  double d_plus = 0.0, d_minus = 0.0;
  for (double t : sample) {
    double at = 0.0, below = 0.0;
    for (double s : sample) {
      if (s <= t) at += 1.0;
      if (s < t) below += 1.0;
    }
    const double f = an::normal_cdf(t);
    d_plus = std::max(d_plus, at / n - f);
    d_minus = std::max(d_minus, f - below / n);
  }
  return {d_plus, d_minus};
}

const std::vector<double> kCopper = {2.16, 2.21, 2.15, 2.05, 2.06, 2.04, 1.90, 2.03, 2.06,
                                     2.02, 2.06, 1.92, 2.08, 2.05, 1.88, 1.99, 2.01, 1.86,
                                     1.70, 1.88, 1.99, 1.93, 2.20, 2.02, 1.92, 2.13, 2.13};

}  // namespace

TEST(Distributions, JeffreysTwoSidedTail) {
  const double tail = 2.0 * (1.0 - an::cdf(an::StandardNormal{}, 3.121));
  EXPECT_NEAR(tail, 0.0018, 1e-4);
}

TEST(Distributions, BoundaryAndSymmetryValues) {
  EXPECT_EQ(an::cdf(an::Beta{0.5, 12}, 0.0), 0.0);
  EXPECT_EQ(an::cdf(an::Beta{0.5, 12}, 1.0), 1.0);
  EXPECT_NEAR(an::cdf(an::StudentT{26}, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(an::quantile(an::StandardNormal{}, 0.5), 0.0, 1e-15);
}

TEST(Distributions, NormalQuantileMatchesSeriesBisection) {
  const double oracle = bisect_normal_quantile(0.975);
  EXPECT_NEAR(oracle, 1.959964, 1e-5);
  EXPECT_NEAR(an::quantile(an::StandardNormal{}, 0.975), oracle, 1e-9);
}

TEST(Distributions, NormalCdfAgainstSeries) {
  for (double x = -2.5; x <= 2.5; x += 0.25) {
    EXPECT_NEAR(an::normal_cdf(x), 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))), 1e-12) << x;
  }
}

TEST(Distributions, ClosedFormOracles) {
  // Cauchy and t_2 have closed-form cdfs.
  for (double t : {-30.0, -3.0, -0.7, 0.2, 1.5, 12.0}) {
    EXPECT_NEAR(an::cdf(an::StudentT{1}, t), 0.5 + std::atan(t) / M_PI, 1e-12) << t;
    EXPECT_NEAR(an::cdf(an::StudentT{2}, t), 0.5 + t / (2.0 * std::sqrt(2.0 + t * t)), 1e-12) << t;
  }
  // I_x(1, b) = 1 - (1 - x)^b and I_x(a, 1) = x^a.
  for (double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(an::cdf(an::Beta{1.0, 7.5}, x), 1.0 - std::pow(1.0 - x, 7.5), 1e-12);
    EXPECT_NEAR(an::cdf(an::Beta{3.25, 1.0}, x), std::pow(x, 3.25), 1e-12);
    EXPECT_NEAR(an::cdf(an::Beta{40.0, 40.0}, 0.5), 0.5, 1e-12);
  }
  // Upper tail keeps relative accuracy: I_x(1, b) upper = (1 - x)^b.
  const auto tails = an::incomplete_beta(1.0, 600.0, 0.05);
  EXPECT_NEAR(tails.upper / std::pow(0.95, 600.0), 1.0, 1e-10);
  // chi^2_2 is exponential.
  for (double x : {0.1, 1.0, 5.0, 30.0}) {
    EXPECT_NEAR(an::chi_square_cdf(x, 2.0), 1.0 - std::exp(-x / 2.0), 1e-13);
  }
}

TEST(Distributions, PoissonCdfMatchesPmfSum) {
  for (double lambda : {0.3, 2.0, 11.5}) {
    double sum = 0.0;
    for (int k = 0; k < 30; ++k) {
      sum += std::pow(lambda, k) * std::exp(-lambda) / std::tgamma(k + 1.0);
      EXPECT_NEAR(an::cdf(an::Poisson{lambda}, k), sum, 1e-12);
      EXPECT_NEAR(an::cdf(an::Poisson{lambda}, k + 0.5), sum, 1e-12);
    }
  }
}

TEST(Distributions, RoundTripOnGrids) {
  const std::vector<an::DistFn> continuous = {an::StandardNormal{}, an::StudentT{3}, an::StudentT{26},
                                              an::Beta{0.5, 12}, an::Beta{2, 3}, an::Beta{0.5, 1785}};
  for (const auto& d : continuous) {
    for (double p = 0.01; p < 0.995; p += 0.01) {
      const double x = an::quantile(d, p);
      EXPECT_NEAR(an::cdf(d, x), p, 1e-10);
    }
  }
  for (double x = 0.1; x < 0.95; x += 0.1) {
    for (an::DistFn b : {an::Beta{0.5, 12}, an::Beta{2, 3}, an::Beta{7, 0.8}}) {
      const auto& beta = std::get<an::Beta>(b);
      const auto tails = an::incomplete_beta(beta.a, beta.b, x);
      // Invert whichever tail still carries the information.
      const double back = tails.lower < 0.5 ? an::beta_quantile(tails.lower, beta.a, beta.b)
                                            : an::beta_quantile_upper(tails.upper, beta.a, beta.b);
      EXPECT_NEAR(back, x, 1e-8);
    }
  }
  for (double x = -4.0; x <= 4.0; x += 0.5) {
    EXPECT_NEAR(an::quantile(an::StandardNormal{}, an::cdf(an::StandardNormal{}, x)), x, 1e-8);
    EXPECT_NEAR(an::quantile(an::StudentT{5}, an::cdf(an::StudentT{5}, x)), x, 1e-8);
  }
  for (int k = 0; k < 12; ++k) {
    const an::DistFn pois = an::Poisson{3.7};
    EXPECT_EQ(an::quantile(pois, an::cdf(pois, k)), k);
  }
}

TEST(Distributions, QuantileIsMonotone) {
  double prev = -INFINITY;
  for (double p = 0.001; p < 1.0; p += 0.001) {
    const double x = an::quantile(an::StudentT{4}, p);
    EXPECT_GT(x, prev);
    prev = x;
  }
}

TEST(Distributions, UpperBetaQuantileInvertsUpperTail) {
  for (double q : {1e-12, 1e-6, 0.01, 0.4}) {
    const double x = an::beta_quantile_upper(q, 0.5, 33.0);
    EXPECT_NEAR(an::incomplete_beta(0.5, 33.0, x).upper / q, 1.0, 1e-9);
  }
}

TEST(Distributions, ParameterAndDomainErrors) {
  EXPECT_THROW(an::cdf(an::StudentT{0}, 1.0), adequate::ParameterError);
  EXPECT_THROW(an::cdf(an::Beta{-1, 2}, 0.5), adequate::ParameterError);
  EXPECT_THROW(an::cdf(an::Beta{1, 0}, 0.5), adequate::ParameterError);
  EXPECT_THROW(an::cdf(an::Beta{1, 2}, 1.5), adequate::DomainError);
  EXPECT_THROW(an::cdf(an::StandardNormal{}, NAN), adequate::DomainError);
  EXPECT_THROW(an::quantile(an::StandardNormal{}, 0.0), adequate::DomainError);
  EXPECT_THROW(an::quantile(an::StandardNormal{}, 1.0), adequate::DomainError);
  EXPECT_THROW(an::quantile(an::Poisson{-2}, 0.5), adequate::ParameterError);
}

TEST(EdfDistances, SingleObservationAtZero) {
  const an::EmpiricalDist e({0.0});
  const auto d = an::edf_deviation(e, an::StandardNormal{});
  EXPECT_DOUBLE_EQ(d.d_plus, 0.5);
  EXPECT_DOUBLE_EQ(d.d_minus, 0.5);
  EXPECT_DOUBLE_EQ(an::kuiper_distance(e, an::StandardNormal{}), 1.0);
  EXPECT_DOUBLE_EQ(an::kolmogorov_distance(e, an::StandardNormal{}), 0.5);
}

TEST(EdfDistances, TwoPointSampleMatchesEnumeration) {
  // Sup over intervals: the open interval (-1.96, 1.96) holds no data but
  // 0.95 of the normal mass.
  const std::vector<double> y = {-1.96, 1.96};
  const auto brute = brute_deviation(y);
  EXPECT_NEAR(brute.kuiper(), 0.95, 1e-3);
  EXPECT_NEAR(an::kuiper_distance(an::EmpiricalDist(y), an::StandardNormal{}), brute.kuiper(), 1e-12);
}

TEST(EdfDistances, NegationInvariance) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> norm(0.3, 1.2);
  std::vector<double> y(37);
  for (double& v : y) v = norm(gen);
  std::vector<double> neg(y.size());
  std::transform(y.begin(), y.end(), neg.begin(), [](double v) { return -v; });
  EXPECT_NEAR(an::kuiper_distance(an::EmpiricalDist(y), an::StandardNormal{}),
              an::kuiper_distance(an::EmpiricalDist(neg), an::StandardNormal{}), 1e-14);
}

TEST(EdfDistances, CopperStandardizedMatchesBruteForce) {
  std::vector<double> y;
  for (double v : kCopper) y.push_back((v - 2.016) / 0.116);
  const auto brute = brute_deviation(y);
  const an::EmpiricalDist e(y);
  EXPECT_NEAR(an::kolmogorov_distance(e, an::StandardNormal{}), brute.kolmogorov(), 1e-12);
  EXPECT_NEAR(an::kuiper_distance(e, an::StandardNormal{}), brute.kuiper(), 1e-12);
}

TEST(EdfDistances, BruteForcePropertyWithTies) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::normal_distribution<double> norm(0.2 * (trial % 5), 0.5 + 0.1 * (trial % 7));
    std::vector<double> y(n);
    // Rounding to 0.05 produces ties.
    for (double& v : y) v = std::round(norm(gen) * 20.0) / 20.0;
    const auto brute = brute_deviation(y);
    const an::EmpiricalDist e(y);
    const auto fast = an::edf_deviation(e, an::StandardNormal{});
    EXPECT_NEAR(fast.kuiper(), brute.kuiper(), 1e-12);
    EXPECT_NEAR(fast.kolmogorov(), brute.kolmogorov(), 1e-12);
    EXPECT_LE(fast.kolmogorov(), fast.kuiper());
  }
}

TEST(EdfDistances, EmptySampleIsDomainError) {
  EXPECT_THROW(an::EmpiricalDist({}), adequate::DomainError);
  EXPECT_THROW(an::EmpiricalDist({1.0, INFINITY}), adequate::DomainError);
}

TEST(CounterRng, SubstreamsAreReproducible) {
  an::CounterRng a(42, 7, 1000), b(42, 7, 1000), c(42, 7, 1001);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(CounterRng, NormalMoments) {
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  an::CounterRng rng(1, 2, 3);
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Simulation, HalfNormalQuantileOfT1) {
  const double probs[] = {0.975};
  const auto q = an::simulate_quantiles({400, 10000, 3, "T1"}, probs);
  EXPECT_NEAR(q[0], an::normal_quantile(0.9875), 0.05);
  EXPECT_NEAR(q[0], 2.24, 0.05);
}

TEST(Simulation, MedianStableAcrossSeeds) {
  const double probs[] = {0.5};
  const std::size_t reps = 10000;
  const double a = an::simulate_quantiles({30, reps, 1, "T1"}, probs)[0];
  const double b = an::simulate_quantiles({30, reps, 2, "T1"}, probs)[0];
  // Half-normal median and density there give the quantile's standard error.
  const double median = an::normal_quantile(0.75);
  const double se = std::sqrt(0.25 / reps) / (2.0 * an::normal_pdf(median));
  EXPECT_LT(std::fabs(a - b), 3.0 * std::sqrt(2.0) * se);
}

TEST(Simulation, SumOfSquaresHasChiSquareMean) {
  const auto values = an::simulate_values({27, 10000, 9, "T2"});
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  EXPECT_NEAR(mean, 27.0, 0.5);
}

TEST(Simulation, IdenticalSpecGivesIdenticalBytesForAnyWorkerCount) {
  an::set_worker_count(1);
  const auto serial = an::simulate_values({19, 3000, 77, "T4"});
  an::set_worker_count(4);
  const auto parallel = an::simulate_values({19, 3000, 77, "T4"});
  an::set_worker_count(0);
  ASSERT_EQ(serial.size(), parallel.size());
  EXPECT_EQ(0, std::memcmp(serial.data(), parallel.data(), serial.size() * sizeof(double)));
}

TEST(Simulation, DifferentSeedsAgreeWithinMonteCarloError) {
  const double probs[] = {0.9};
  const std::size_t reps = 20000;
  const double a = an::simulate_quantiles({25, reps, 100, "T3"}, probs)[0];
  const double b = an::simulate_quantiles({25, reps, 200, "T3"}, probs)[0];
  // P(T3 <= t) = (2 Phi(t) - 1)^n gives the density at the quantile.
  const double t = a;
  const double dens = 25.0 * std::pow(2.0 * an::normal_cdf(t) - 1.0, 24.0) * 2.0 * an::normal_pdf(t);
  const double se = std::sqrt(0.09 / reps) / dens;
  EXPECT_LT(std::fabs(a - b), 4.0 * std::sqrt(2.0) * se);
}

TEST(Simulation, UnregisteredStatisticIsConfigurationError) {
  const double probs[] = {0.5};
  EXPECT_THROW(an::simulate_quantiles({10, 1000, 1, "T9"}, probs), adequate::ConfigurationError);
  EXPECT_THROW(an::simulate_quantiles({10, 999, 1, "T1"}, probs), adequate::DomainError);
}

TEST(Simulation, EmpiricalQuantileConvention) {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(an::empirical_quantile(v, 0.1), 1);
  EXPECT_EQ(an::empirical_quantile(v, 0.11), 2);
  EXPECT_EQ(an::empirical_quantile(v, 0.5), 5);
  EXPECT_EQ(an::empirical_quantile(v, 0.975), 10);
  EXPECT_EQ(an::empirical_quantile(v, 1.0), 10);
}

TEST(KolmogorovQuantile, BoundedByOne) {
  EXPECT_LE(an::kolmogorov_quantile(0.999, 5, 1, 2000), 1.0);
  EXPECT_THROW(an::kolmogorov_quantile(1.0, 5), adequate::DomainError);
}

TEST(KolmogorovQuantile, AgreesWithIndependentSimulation) {
  const double ours = an::kolmogorov_quantile(0.9667, 27);
  // Oracle: 1e5 replicates of sorted std::mt19937_64 uniforms.
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> stats(100000);
  std::vector<double> u(27);
  for (double& s : stats) {
    for (double& v : u) v = unif(gen);
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      d = std::max({d, (i + 1) / 27.0 - u[i], u[i] - i / 27.0});
    }
    s = d;
  }
  std::sort(stats.begin(), stats.end());
  const double oracle = stats[static_cast<std::size_t>(std::ceil(0.9667 * stats.size())) - 1];
  EXPECT_NEAR(ours, oracle, 0.01);
}

TEST(KolmogorovQuantile, ScalesLikeRootN) {
  const double q20 = an::kolmogorov_quantile(0.9, 20);
  const double q80 = an::kolmogorov_quantile(0.9, 80);
  EXPECT_GE(q20 / q80, 1.8);
  EXPECT_LE(q20 / q80, 2.2);
}

TEST(QuantileCache, RoundTripsBitExactly) {
  const auto path = std::filesystem::temp_directory_path() / "adequate_cache_test.v1.csv";
  std::filesystem::remove(path);
  const double probs[] = {0.1, 0.9};
  const an::SimSpec spec{12, 2000, 5, "T4"};
  std::vector<double> first;
  {
    an::QuantileCache cache(path);
    first = an::simulate_quantiles(spec, probs, an::StatisticRegistry::builtin(), &cache);
    cache.flush();
  }
  an::QuantileCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 2u);
  const auto hit = reloaded.lookup({"T4", 12, 2000, 5, 0.9});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(*hit, first[1]);
  std::filesystem::remove(path);
}

TEST(QuantileCache, RejectsUnknownHeader) {
  const auto path = std::filesystem::temp_directory_path() / "adequate_cache_bad.csv";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("# something else v9\n", f);
    std::fclose(f);
  }
  EXPECT_THROW(an::QuantileCache{path}, adequate::ConfigurationError);
  std::filesystem::remove(path);
}

TEST(Kolmogorov, AsymptoticQuantileMatchesSimulation) {
  for (std::size_t n : {50u, 400u}) {
    for (double p : {0.9, 0.99}) {
      const double sim = an::kolmogorov_quantile(p, n, 5, 20000);
      EXPECT_NEAR(an::kolmogorov_quantile_asymptotic(p, n) / sim, 1.0, 0.02) << n << " " << p;
    }
  }
  // Classical large-sample constants.
  EXPECT_NEAR(an::kolmogorov_quantile_asymptotic(0.95, 1000000) * 1000.0, 1.3581, 1e-3);
  EXPECT_NEAR(an::kolmogorov_quantile_asymptotic(0.99, 1000000) * 1000.0, 1.6276, 1e-3);
}
