#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "adequate/numerics/distributions.hpp"

namespace adequate::numerics {

// Empirical distribution of a finite sample; observations kept sorted.
class EmpiricalDist {
 public:
  // Throws DomainError on an empty or non-finite sample.
  explicit EmpiricalDist(std::vector<double> observations);

  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

  // Mass of the largest atom.
  double largest_atom() const noexcept;

 private:
  std::vector<double> sorted_;
};

// One-sided sup deviations between an empirical cdf and a continuous cdf F:
// d_plus = max_i (i/n - F(y_(i))), d_minus = max_i (F(y_(i)) - (i-1)/n).
struct EdfDeviation {
  double d_plus;
  double d_minus;

  double kuiper() const noexcept { return d_plus + d_minus; }
  double kolmogorov() const noexcept { return std::max(d_plus, d_minus); }
};

// Hot-path kernel over already sorted values; `cdf_values` receives F at
// each sorted point (so callers can transform, e.g. standardize, on the fly).
template <typename CdfAt>
EdfDeviation edf_deviation(std::size_t n, CdfAt&& cdf_at) {
  double d_plus = 0.0;
  double d_minus = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf_at(i);
    d_plus = std::max(d_plus, static_cast<double>(i + 1) * inv_n - f);
    d_minus = std::max(d_minus, f - static_cast<double>(i) * inv_n);
  }
  return {d_plus, d_minus};
}

EdfDeviation edf_deviation(const EmpiricalDist& e, const DistFn& reference);

// D+ + D-. Only continuous references are meaningful (standard normal in
// practice).
double kuiper_distance(const EmpiricalDist& e, const DistFn& reference);

// max(D+, D-).
double kolmogorov_distance(const EmpiricalDist& e, const DistFn& reference);

// Kolmogorov distance of sorted values in [0, 1] to the uniform law.
double kolmogorov_uniform(std::span<const double> sorted_uniforms);

}  // namespace adequate::numerics
