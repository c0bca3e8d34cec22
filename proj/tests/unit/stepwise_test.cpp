#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "adequate/errors.hpp"
#include "adequate/numerics/special.hpp"
#include "adequate/stepwise/stepwise.hpp"

namespace as = adequate::stepwise;
namespace an = adequate::numerics;

namespace {

struct Problem {
  std::vector<double> y;
  std::vector<std::vector<double>> cols;
};

Problem noise_problem(std::size_t n, std::size_t p, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Problem out{std::vector<double>(n), std::vector<std::vector<double>>(p, std::vector<double>(n))};
  for (double& v : out.y) v = g(gen);
  for (auto& c : out.cols) {
    for (double& v : c) v = g(gen);
  }
  return out;
}

// Residual sum of squares of a full least-squares refit (intercept optional).
double refit_rss(const Problem& pr, const std::vector<std::size_t>& cols, bool intercept) {
  const Eigen::Index n = static_cast<Eigen::Index>(pr.y.size());
  const Eigen::Index k = static_cast<Eigen::Index>(cols.size()) + (intercept ? 1 : 0);
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(pr.y.data(), n);
  Eigen::Index c = 0;
  if (intercept) X.col(c++).setOnes();
  for (std::size_t j : cols) X.col(c++) = Eigen::Map<const Eigen::VectorXd>(pr.cols[j].data(), n);
  if (k == 0) return y.squaredNorm();
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return (y - X * beta).squaredNorm();
}

}  // namespace

TEST(StepPvalue, Limits) {
  EXPECT_EQ(as::step_pvalue(2.0, 2.0, 20, 3, 10), 1.0);
  EXPECT_EQ(as::step_pvalue(2.0, 0.0, 20, 3, 10), 0.0);
  EXPECT_THROW(as::step_pvalue(1.0, 2.0, 20, 3, 10), adequate::DomainError);
  EXPECT_THROW(as::step_pvalue(2.0, 1.0, 20, 19, 30), adequate::DomainError);
  EXPECT_THROW(as::step_pvalue(2.0, 1.0, 20, 3, 3), adequate::DomainError);
}

TEST(StepPvalue, MatchesDirectPower) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 5 + gen() % 60, p0 = gen() % (n - 2), m = 1 + gen() % 6;
    const double ss0 = 1.0 + 10.0 * u(gen), ss01 = ss0 * u(gen);
    const double F = an::incomplete_beta(0.5, (n - p0 - 1.0) / 2.0, 1.0 - ss01 / ss0).lower;
    EXPECT_NEAR(as::step_pvalue(ss0, ss01, n, p0, p0 + m), 1.0 - std::pow(F, static_cast<double>(m)), 1e-12);
  }
}

TEST(StepPvalue, SmallTailsKeepRelativeAccuracy) {
  // With one candidate, the p-value is the upper beta tail itself.
  const double ss0 = 1.0, ss01 = 1e-6;
  const double upper = an::incomplete_beta(0.5, 15.5, 1.0 - ss01).upper;
  EXPECT_NEAR(as::step_pvalue(ss0, ss01, 35, 3, 4) / upper, 1.0, 1e-10);
  // Many candidates: 1 - F^m ~ m (1 - F) when (1 - F) m is small.
  const double tail = an::incomplete_beta(0.5, 33.5, 0.6).upper;
  EXPECT_NEAR(as::step_pvalue(1.0, 0.4, 72, 4, 3575) / (3571.0 * tail), 1.0, 3571.0 * tail);
}

TEST(ShouldStop, EquivalentToPvalueAboveAlpha) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 5 + gen() % 100, p0 = gen() % (n - 2), m = 1 + gen() % 4000;
    const double alpha = u(gen), ss0 = 0.1 + 100.0 * u(gen);
    // Bias ss01 towards the interesting region just below ss0.
    const double ss01 = ss0 * (1.0 - std::pow(u(gen), 3.0) * 0.5);
    const double p = as::step_pvalue(ss0, ss01, n, p0, p0 + m);
    if (as::should_stop(ss0, ss01, n, p0, p0 + m, alpha) != (p > alpha)) {
      ++disagreements;
      EXPECT_LT(std::fabs(p - alpha), 1e-12) << n << " " << p0 << " " << m << " " << alpha;
    }
  }
  EXPECT_LE(disagreements, 0);
}

TEST(ShouldStop, AlphaLimits) {
  EXPECT_FALSE(as::should_stop(1.0, 0.999999, 30, 2, 100, 1.0));
  EXPECT_TRUE(as::should_stop(1.0, 1e-9, 30, 2, 100, 0.0));
  EXPECT_FALSE(as::should_stop(1.0, 0.0, 30, 2, 100, 0.0));
  const auto pr = noise_problem(12, 40, 5);
  const auto sel = as::run_selection(as::RegressionData(pr.y, pr.cols), 1.0);
  // One step for each p0 = 1 .. n - 2 (p0 counts the intercept).
  EXPECT_EQ(sel.selected.size(), 12u - 2u);
  for (const auto& s : sel.steps) EXPECT_FALSE(s.stopped);
}

TEST(BestCandidate, ExactMatchChosenFirst) {
  auto pr = noise_problem(25, 8, 2);
  pr.y = pr.cols[5];
  as::SelectionState st(as::RegressionData(pr.y, pr.cols));
  const auto c = st.best_candidate();
  ASSERT_TRUE(c);
  EXPECT_EQ(c->index, 5u);
  EXPECT_LT(c->ss01, 1e-20);
}

TEST(BestCandidate, MatchesNaiveRefitAlongThePath) {
  for (unsigned seed = 0; seed < 30; ++seed) {
    std::mt19937 g(seed);
    const std::size_t n = 20 + g() % 31, p = 5 + g() % 26;
    const auto pr = noise_problem(n, p, 100 + seed);
    for (bool centered : {true, false}) {
      as::SelectionState st(as::RegressionData(pr.y, pr.cols), {centered});
      std::vector<std::size_t> chosen;
      for (int step = 0; step < 4; ++step) {
        const auto c = st.best_candidate();
        ASSERT_TRUE(c);
        std::size_t best = 0;
        double best_rss = INFINITY;
        for (std::size_t j = 0; j < p; ++j) {
          if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
          auto cols = chosen;
          cols.push_back(j);
          const double rss = refit_rss(pr, cols, centered);
          if (rss < best_rss) {
            best_rss = rss;
            best = j;
          }
        }
        EXPECT_EQ(c->index, best);
        EXPECT_NEAR(c->ss01, best_rss, 1e-9);
        EXPECT_NEAR(st.ss0(), refit_rss(pr, chosen, centered), 1e-9);
        st.include(c->index);
        chosen.push_back(c->index);
      }
    }
  }
}

TEST(BestCandidate, CollinearColumnsAreSkipped) {
  auto pr = noise_problem(30, 6, 8);
  pr.cols.push_back(pr.cols[2]);
  for (double& v : pr.cols.back()) v = 3.0 * v + 1.0;  // affine copy of column 2
  pr.cols.push_back(std::vector<double>(30, 4.0));     // constant
  pr.y = pr.cols[2];
  for (std::size_t i = 0; i < 30; ++i) pr.y[i] += 0.01 * pr.cols[0][i];
  const as::RegressionData data(pr.y, pr.cols);
  EXPECT_EQ(data.zero_columns(true), std::vector<std::size_t>{7});
  const auto sel = as::run_selection(data, 0.5);
  ASSERT_FALSE(sel.selected.empty());
  EXPECT_EQ(sel.selected[0], 2u);
  std::vector<std::size_t> skipped;
  for (const auto& s : sel.skipped) skipped.push_back(s.index);
  std::sort(skipped.begin(), skipped.end());
  EXPECT_EQ(skipped, (std::vector<std::size_t>{6, 7}));
  for (std::size_t j : sel.selected) EXPECT_NE(j, 6u);
}

TEST(RunSelection, PlantedSignal) {
  auto pr = noise_problem(100, 50, 21);
  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < 100; ++i) pr.y[i] = pr.cols[3][i] + 0.5 * pr.cols[7][i] + 0.1 * g(gen);
  const auto sel = as::run_selection(as::RegressionData(pr.y, pr.cols), 0.05);
  ASSERT_GE(sel.steps.size(), 2u);
  EXPECT_EQ(sel.steps[0].index, 3u);
  EXPECT_EQ(sel.steps[1].index, 7u);
  EXPECT_LT(sel.steps[0].p_value, 0.01);
  EXPECT_LT(sel.steps[1].p_value, 0.01);
  for (std::size_t s = 0; s + 1 < sel.steps.size(); ++s) {
    EXPECT_LE(sel.steps[s].p_value, 0.05);
    EXPECT_LT(sel.steps[s + 1].ss0, sel.steps[s].ss0 + 1e-12);
  }
  EXPECT_TRUE(sel.steps.back().stopped || sel.selected.size() == sel.steps.size());
}

TEST(RunSelection, ScaleAndShiftInvariance) {
  auto pr = noise_problem(40, 25, 33);
  for (std::size_t i = 0; i < 40; ++i) pr.y[i] += 0.8 * pr.cols[4][i] - 0.5 * pr.cols[11][i];
  const auto base = as::run_selection(as::RegressionData(pr.y, pr.cols), 0.5);
  auto moved = pr;
  for (std::size_t j = 0; j < moved.cols.size(); ++j) {
    const double a = j % 2 ? 10.0 : -0.01, b = static_cast<double>(j);
    for (double& v : moved.cols[j]) v = a * v + b;
  }
  const auto image = as::run_selection(as::RegressionData(moved.y, moved.cols), 0.5);
  ASSERT_EQ(image.steps.size(), base.steps.size());
  for (std::size_t s = 0; s < base.steps.size(); ++s) {
    EXPECT_EQ(image.steps[s].index, base.steps[s].index);
    EXPECT_NEAR(image.steps[s].p_value, base.steps[s].p_value, 1e-9);
  }
}

TEST(RunSelection, PermutationEquivariance) {
  auto pr = noise_problem(40, 25, 34);
  for (std::size_t i = 0; i < 40; ++i) pr.y[i] += pr.cols[9][i] + 0.4 * pr.cols[20][i];
  const auto base = as::run_selection(as::RegressionData(pr.y, pr.cols), 0.5);
  std::vector<std::size_t> perm(25);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(1));
  Problem shuffled{pr.y, {}};
  for (std::size_t j : perm) shuffled.cols.push_back(pr.cols[j]);
  const auto image = as::run_selection(as::RegressionData(shuffled.y, shuffled.cols), 0.5);
  ASSERT_EQ(image.steps.size(), base.steps.size());
  for (std::size_t s = 0; s < base.steps.size(); ++s) {
    EXPECT_EQ(perm[image.steps[s].index], base.steps[s].index);
    EXPECT_NEAR(image.steps[s].p_value, base.steps[s].p_value, 1e-12);
  }
}

TEST(RunSelection, FirstStepPvalueMatchesMonteCarlo) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> g;
  const std::size_t n = 30, p = 20;
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto pr = noise_problem(n, p, 500 + seed);
    const auto sel = as::run_selection(as::RegressionData(pr.y, pr.cols), 1.0);
    const double ss0 = sel.steps[0].ss0, ss01 = sel.steps[0].ss01;
    std::vector<double> r = pr.y;
    const double ybar = std::accumulate(r.begin(), r.end(), 0.0) / n;
    for (double& v : r) v -= ybar;
    const int reps = 20000;
    int below = 0;
    for (int rep = 0; rep < reps; ++rep) {
      double best = INFINITY;
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> z(n);
        double m = 0.0;
        for (double& v : z) m += (v = g(gen));
        m /= n;
        double zz = 0.0, rz = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          z[i] -= m;
          zz += z[i] * z[i];
          rz += r[i] * z[i];
        }
        best = std::min(best, ss0 - rz * rz / zz);
      }
      below += best < ss01;
    }
    EXPECT_NEAR(sel.steps[0].p_value, static_cast<double>(below) / reps, 0.01) << seed;
  }
}

TEST(RunSelection, NoiseSelectsRarely) {
  int nonempty = 0;
  const int runs = 300;
  for (int r = 0; r < runs; ++r) {
    const auto pr = noise_problem(30, 40, 9000 + r);
    nonempty += !as::run_selection(as::RegressionData(pr.y, pr.cols), 0.1).selected.empty();
  }
  EXPECT_NEAR(static_cast<double>(nonempty) / runs, 0.1, 4.0 * std::sqrt(0.09 / runs));
}

TEST(BetaLaw, ValidatorPasses) {
  const auto rep = as::validate_beta_law(20, 3, {20, 2000, 17, "beta"});
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.ks_distance, rep.ks_threshold);
  EXPECT_DOUBLE_EQ(rep.expected_mean, 1.0 / 17.0);
  EXPECT_NEAR(rep.mean, rep.expected_mean, 4.0 * rep.mean_se);
  const auto again = as::validate_beta_law(20, 3, {20, 2000, 17, "beta"});
  EXPECT_EQ(again.ks_distance, rep.ks_distance);
  EXPECT_EQ(again.mean, rep.mean);
}

TEST(BetaLaw, MeanIdentitySeparatesDegrees) {
  const auto right = as::validate_beta_law(12, 0, {12, 20000, 2, "beta"});
  EXPECT_TRUE(right.passed);
  EXPECT_NEAR(right.mean, 1.0 / 12.0, 4.0 * right.mean_se);
  EXPECT_GT(std::fabs(right.mean - 1.0 / 8.0), 10.0 * right.mean_se);
}

TEST(Classification, CountsDisagreements) {
  std::vector<double> y{0, 0, 0, 0, 1, 1, 1, 1};
  std::vector<double> x{0.1, 0.2, 0.0, 0.9, 1.0, 0.8, 1.1, 0.1};
  const as::RegressionData data(y, {x});
  EXPECT_EQ(as::misclassifications(data, {0}), 2u);
  EXPECT_THROW(as::misclassifications(as::RegressionData({0, 2, 1}, {{1, 2, 3}}), {0}), adequate::DomainError);
}
