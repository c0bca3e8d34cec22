#include "adequate/poisson/adequacy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "adequate/errors.hpp"
#include "adequate/numerics/distributions.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::poisson {

namespace {

double overflow_probability(int k, double lambda) {
  return numerics::incomplete_gamma(k + 1.0, lambda).lower;
}

std::vector<double> frequencies_of(std::span<const long> counts, int k) {
  std::vector<double> freq(static_cast<std::size_t>(k) + 2, 0.0);
  for (long c : counts) {
    freq[c > k ? k + 1 : c] += 1.0;
  }
  for (double& f : freq) f /= static_cast<double>(counts.size());
  return freq;
}

}  // namespace

int default_truncation(std::size_t n, double mean) {
  if (!(mean > 0.0)) return 1;
  int k = 1;
  while (static_cast<double>(n) * overflow_probability(k + 1, mean) >= 1.0) ++k;
  return k;
}

CountSample::CountSample(std::vector<long> counts, std::optional<int> k) : counts_(std::move(counts)) {
  if (counts_.empty()) throw DomainError("count sample is empty");
  double sum = 0.0;
  for (long c : counts_) {
    if (c < 0) throw DomainError("counts must be nonnegative");
    sum += static_cast<double>(c);
  }
  mean_ = sum / static_cast<double>(counts_.size());
  if (k && *k < 1) throw ConfigurationError("truncation cell k must be >= 1");
  k_ = k.value_or(default_truncation(counts_.size(), mean_));
  freq_ = frequencies_of(counts_, k_);
}

std::vector<double> cell_probabilities(int k, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  std::vector<double> p(static_cast<std::size_t>(k) + 2);
  for (int j = 0; j <= k; ++j) p[j] = numerics::poisson_pmf(j, lambda);
  p[k + 1] = overflow_probability(k, lambda);
  return p;
}

double chisq_stat(std::span<const double> frequencies, double lambda) {
  const int k = static_cast<int>(frequencies.size()) - 2;
  const auto p = cell_probabilities(k, lambda);
  double stat = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) {
      if (frequencies[j] > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = frequencies[j] - p[j];
    stat += d * d / p[j];
  }
  return stat;
}

double chisq_stat(const CountSample& s, double lambda) { return chisq_stat(s.frequencies(), lambda); }

double chisq_family_stat(const CountSample& s) {
  if (!(s.mean() > 0.0)) throw DomainError("family statistic needs a positive mean");
  return chisq_stat(s, s.mean());
}

long draw_poisson(numerics::CounterRng& rng, double lambda) {
  const double u = rng.uniform();
  long k = static_cast<long>(std::floor(lambda));
  double p = numerics::poisson_pmf(static_cast<int>(k), lambda);
  double F = numerics::poisson_cdf(static_cast<int>(k), lambda);
  if (u <= F) {
    while (k > 0 && u <= F - p) {
      F -= p;
      p *= static_cast<double>(k) / lambda;
      --k;
    }
    return k;
  }
  while (u > F) {
    ++k;
    p *= lambda / static_cast<double>(k);
    if (p == 0.0) break;
    F += p;
  }
  return k;
}

double critical_value(std::size_t n, int k, double lambda, const PoissonConfig& cfg) {
  if (cfg.replications < 100) throw ConfigurationError("poisson critical values need >= 100 replications");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw DomainError("level must lie in (0, 1)");
  const std::uint64_t stream = numerics::stream_id("poisson/null") ^
                               numerics::splitmix64(n) ^
                               numerics::splitmix64(std::bit_cast<std::uint64_t>(lambda) + k);
  std::vector<double> values(cfg.replications);
  numerics::parallel_for(cfg.replications, [&](std::size_t r) {
    numerics::CounterRng rng(cfg.seed, stream, r);
    std::vector<long> counts(n);
    for (auto& c : counts) c = draw_poisson(rng, lambda);
    values[r] = chisq_stat(frequencies_of(counts, k), lambda);
  });
  std::sort(values.begin(), values.end());
  return numerics::empirical_quantile(values, cfg.level);
}

std::optional<gauss::Interval> LambdaSet::hull() const {
  std::optional<gauss::Interval> out;
  for (const auto& p : profile) {
    if (!p.adequate) continue;
    if (!out) out = gauss::Interval{p.lambda, p.lambda};
    out->low = std::min(out->low, p.lambda);
    out->high = std::max(out->high, p.lambda);
  }
  return out;
}

std::size_t LambdaSet::count() const {
  return static_cast<std::size_t>(
      std::count_if(profile.begin(), profile.end(), [](const LambdaPoint& p) { return p.adequate; }));
}

std::vector<double> default_lambda_grid(const CountSample& s, std::size_t points) {
  if (points < 2) throw ConfigurationError("lambda grid needs at least 2 points");
  const double m = std::max(s.mean(), 1.0 / static_cast<double>(s.size()));
  const double half = 10.0 * std::sqrt(m / static_cast<double>(s.size()));
  const double low = std::max(m / 100.0, m - half), high = m + half;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = low + (high - low) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

LambdaSet lambda_adequacy_set(const CountSample& s, std::span<const double> lambdas, const PoissonConfig& cfg) {
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("lambda grid must be positive");
  }
  LambdaSet out{cfg.level, s.k(), std::vector<LambdaPoint>(lambdas.size())};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double stat = chisq_stat(s, lambdas[i]);
    const double crit = critical_value(s.size(), s.k(), lambdas[i], cfg);
    out.profile[i] = {lambdas[i], stat, crit, stat <= crit};
  }
  return out;
}

double minimize_statistic(const CountSample& s, double low, double high) {
  if (!(low > 0.0 && high > low)) throw DomainError("minimize_statistic needs 0 < low < high");
  constexpr int kCells = 200;
  const double h = (high - low) / kCells;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kCells; ++i) {
    const double v = chisq_stat(s, low + h * i);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = low + h * std::max(0, best - 1), b = low + h * std::min(kCells, best + 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = chisq_stat(s, c), fd = chisq_stat(s, d);
  while (b - a > 1e-12 * std::max(1.0, b)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = chisq_stat(s, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = chisq_stat(s, d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace adequate::poisson
