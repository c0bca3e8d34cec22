#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adequate/numerics/empirical.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::gauss::detail {

double p_from_t1(double t1) { return std::erfc(t1 / std::numbers::sqrt2); }

double p_from_t2(double t2, std::size_t n) {
  const auto tails = numerics::incomplete_gamma(0.5 * static_cast<double>(n), 0.5 * t2);
  return std::min(1.0, 2.0 * std::min(tails.lower, tails.upper));
}

double p_from_t3(double t3, std::size_t n) {
  // 1 - (1 - 2 (1 - Phi(t3)))^n without cancellation.
  const double tail = std::erfc(t3 / std::numbers::sqrt2);
  if (tail >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-tail));
}

PminKernel::PminKernel(std::span<const double> values, const T4Table& table)
    : sorted_(values.begin(), values.end()), table_(&table) {
  std::sort(sorted_.begin(), sorted_.end());
  mean_ = std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(n());
  for (double v : sorted_) centered_ss_ += (v - mean_) * (v - mean_);
}

double PminKernel::p1(double mu, double sigma) const {
  return p_from_t1(std::sqrt(static_cast<double>(n())) * std::fabs(mean_ - mu) / sigma);
}

double PminKernel::p2(double mu, double sigma) const {
  const double d = mean_ - mu;
  return p_from_t2((centered_ss_ + static_cast<double>(n()) * d * d) / (sigma * sigma), n());
}

double PminKernel::p3(double mu, double sigma) const {
  return p_from_t3(std::max(sorted_.back() - mu, mu - sorted_.front()) / sigma, n());
}

double PminKernel::p4(double mu, double sigma) const {
  const double inv = 1.0 / sigma;
  const auto d = numerics::edf_deviation(
      n(), [&](std::size_t i) { return numerics::normal_cdf((sorted_[i] - mu) * inv); });
  return table_->upper_tail(d.kuiper());
}

std::array<double, 4> PminKernel::pvalues(double mu, double sigma) const {
  return {p1(mu, sigma), p2(mu, sigma), p3(mu, sigma), p4(mu, sigma)};
}

double PminKernel::pmin_above(double mu, double sigma, double floor) const {
  double m = p1(mu, sigma);
  if (m < floor) return m;
  m = std::min(m, p3(mu, sigma));
  if (m < floor) return m;
  m = std::min(m, p2(mu, sigma));
  if (m < floor) return m;
  return std::min(m, p4(mu, sigma));
}

}  // namespace adequate::gauss::detail
