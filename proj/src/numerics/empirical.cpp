#include "adequate/numerics/empirical.hpp"

#include <cmath>

#include "adequate/errors.hpp"

namespace adequate::numerics {

EmpiricalDist::EmpiricalDist(std::vector<double> observations)
    : sorted_(std::move(observations)) {
  if (sorted_.empty()) throw DomainError("empirical distribution needs at least one observation");
  for (double v : sorted_) {
    if (!std::isfinite(v)) throw DomainError("empirical distribution needs finite observations");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDist::largest_atom() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 0; i < sorted_.size();) {
    std::size_t j = i;
    while (j < sorted_.size() && sorted_[j] == sorted_[i]) ++j;
    best = std::max(best, j - i);
    i = j;
  }
  return static_cast<double>(best) / static_cast<double>(sorted_.size());
}

EdfDeviation edf_deviation(const EmpiricalDist& e, const DistFn& reference) {
  const auto values = e.sorted();
  return edf_deviation(values.size(), [&](std::size_t i) { return cdf(reference, values[i]); });
}

double kuiper_distance(const EmpiricalDist& e, const DistFn& reference) {
  return edf_deviation(e, reference).kuiper();
}

double kolmogorov_distance(const EmpiricalDist& e, const DistFn& reference) {
  return edf_deviation(e, reference).kolmogorov();
}

double kolmogorov_uniform(std::span<const double> sorted_uniforms) {
  if (sorted_uniforms.empty()) throw DomainError("kolmogorov distance of an empty sample");
  return edf_deviation(sorted_uniforms.size(), [&](std::size_t i) { return sorted_uniforms[i]; })
      .kolmogorov();
}

}  // namespace adequate::numerics
