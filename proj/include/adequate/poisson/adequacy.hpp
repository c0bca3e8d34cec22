#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adequate/gauss/region.hpp"
#include "adequate/numerics/random.hpp"
#include "adequate/numerics/simulation.hpp"

namespace adequate::poisson {

// Raw counts with cells 0..k and an overflow cell {> k}. Unless k is given,
// it is the largest k >= 1 whose overflow cell has expected count >= 1 under
// Poisson(mean).
class CountSample {
 public:
  explicit CountSample(std::vector<long> counts, std::optional<int> k = std::nullopt);

  const std::vector<long>& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return counts_.size(); }
  int k() const noexcept { return k_; }
  double mean() const noexcept { return mean_; }
  // p-hat_0 .. p-hat_k followed by the overflow frequency; sums to 1.
  const std::vector<double>& frequencies() const noexcept { return freq_; }

 private:
  std::vector<long> counts_;
  int k_;
  double mean_;
  std::vector<double> freq_;
};

int default_truncation(std::size_t n, double mean);

// Cell probabilities p_0(lambda) .. p_k(lambda) and P(X > k).
std::vector<double> cell_probabilities(int k, double lambda);

// sum_j (p-hat_j - p_j(lambda))^2 / p_j(lambda) over the k + 2 cells. A cell
// with p_j = 0 and p-hat_j > 0 makes the statistic infinite.
double chisq_stat(std::span<const double> frequencies, double lambda);
double chisq_stat(const CountSample& s, double lambda);

// The statistic at lambda = mean. Throws DomainError for all-zero counts.
double chisq_family_stat(const CountSample& s);

// Inversion from the mode, so the cost is O(sqrt(lambda)) per draw.
long draw_poisson(numerics::CounterRng& rng, double lambda);

struct PoissonConfig {
  double level = 0.95;  // lambda is adequate when the statistic is <= the level quantile
  std::size_t replications = 2000;
  std::uint64_t seed = numerics::kDefaultSeed;
};

// Simulated level quantile of the statistic for samples of size n from
// Poisson(lambda), with the same cells 0..k.
double critical_value(std::size_t n, int k, double lambda, const PoissonConfig& cfg = {});

struct LambdaPoint {
  double lambda;
  double statistic;
  double critical;
  bool adequate;
};

struct LambdaSet {
  double level;
  int k;
  std::vector<LambdaPoint> profile;

  // Smallest and largest adequate grid values.
  std::optional<gauss::Interval> hull() const;
  std::size_t count() const;
};

// mean -+ 10 sqrt(mean / n), clipped below at mean / 100.
std::vector<double> default_lambda_grid(const CountSample& s, std::size_t points = 201);

LambdaSet lambda_adequacy_set(const CountSample& s, std::span<const double> lambdas,
                              const PoissonConfig& cfg = {});

// Minimizer of the model-level statistic over [low, high]: a 200-cell scan
// followed by golden-section refinement of the best bracket.
double minimize_statistic(const CountSample& s, double low, double high);

}  // namespace adequate::poisson
