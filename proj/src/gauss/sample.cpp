#include "adequate/gauss/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adequate/errors.hpp"
#include "adequate/numerics/empirical.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::gauss {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("sample is empty");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("sample contains a non-finite value");
  }
}

double Sample::mean() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(size());
}

double Sample::sd() const noexcept {
  if (size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(size() - 1));
}

Sample Sample::with_value(std::size_t index, double value) const {
  if (index >= size()) throw DomainError("sample index out of range");
  auto copy = values_;
  copy[index] = value;
  return Sample(std::move(copy));
}

Sample Sample::without(std::size_t index) const {
  if (index >= size()) throw DomainError("sample index out of range");
  auto copy = values_;
  copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(index));
  return Sample(std::move(copy));
}

Sample Sample::affine(double a, double b) const {
  auto copy = values_;
  for (double& v : copy) v = a * v + b;
  return Sample(std::move(copy));
}

GaussFeatures gauss_features(const Sample& x, LocationScale theta) {
  if (!(theta.sigma > 0.0)) throw DomainError("sigma must be positive");
  std::vector<double> y(x.values().begin(), x.values().end());
  for (double& v : y) v = (v - theta.mu) / theta.sigma;
  const double n = static_cast<double>(y.size());
  GaussFeatures f{};
  f.t1 = std::fabs(std::accumulate(y.begin(), y.end(), 0.0)) / std::sqrt(n);
  f.t2 = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
  f.t3 = 0.0;
  for (double v : y) f.t3 = std::max(f.t3, std::fabs(v));
  std::sort(y.begin(), y.end());
  f.t4 = numerics::edf_deviation(y.size(), [&](std::size_t i) { return numerics::normal_cdf(y[i]); })
             .kuiper();
  return f;
}

}  // namespace adequate::gauss
