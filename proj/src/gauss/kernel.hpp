#pragma once

#include <array>
#include <span>
#include <vector>

#include "adequate/gauss/tables.hpp"

namespace adequate::gauss::detail {

// p-values of one sample at many (mu, sigma). Sorting once suffices since
// standardization preserves order; T1..T3 come from sufficient statistics.
class PminKernel {
 public:
  PminKernel(std::span<const double> values, const T4Table& table);

  std::size_t n() const noexcept { return sorted_.size(); }
  double mean() const noexcept { return mean_; }
  double centered_ss() const noexcept { return centered_ss_; }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }

  std::array<double, 4> pvalues(double mu, double sigma) const;

  // Exact min(p1..p4) when it is >= floor; otherwise some value < floor.
  double pmin_above(double mu, double sigma, double floor) const;

 private:
  double p1(double mu, double sigma) const;
  double p2(double mu, double sigma) const;
  double p3(double mu, double sigma) const;
  double p4(double mu, double sigma) const;

  std::vector<double> sorted_;
  const T4Table* table_;
  double mean_ = 0.0;
  double centered_ss_ = 0.0;
};

double p_from_t1(double t1);
double p_from_t2(double t2, std::size_t n);
double p_from_t3(double t3, std::size_t n);

}  // namespace adequate::gauss::detail
