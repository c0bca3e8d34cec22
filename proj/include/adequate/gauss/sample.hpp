#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adequate::gauss {

// Observations in data units, kept in input order.
class Sample {
 public:
  // Throws DomainError on an empty or non-finite sample.
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const noexcept;
  // Sample standard deviation (divisor n - 1); 0 for n = 1.
  double sd() const noexcept;

  Sample with_value(std::size_t index, double value) const;
  Sample without(std::size_t index) const;
  // Affine image a * x + b.
  Sample affine(double a, double b) const;

 private:
  std::vector<double> values_;
};

struct LocationScale {
  double mu;
  double sigma;
};

struct GaussFeatures {
  double t1;  // sqrt(n) |mean(y)|
  double t2;  // sum y^2
  double t3;  // max |y|
  double t4;  // Kuiper distance of y to N(0, 1)
};

// Features of y = (x - mu) / sigma. Throws DomainError unless sigma > 0.
GaussFeatures gauss_features(const Sample& x, LocationScale theta);

}  // namespace adequate::gauss
