#pragma once

#include <variant>

namespace adequate::numerics {

struct StandardNormal {};

struct StudentT {
  double df;
};

struct Beta {
  double a;
  double b;
};

struct Poisson {
  double lambda;
};

// The four reference laws the library needs. Not a general distribution
// library.
using DistFn = std::variant<StandardNormal, StudentT, Beta, Poisson>;

// P(X <= x). Throws ParameterError for invalid parameters and DomainError for
// non-finite x (or x outside [0, 1] for Beta).
double cdf(const DistFn& d, double x);

// Smallest x with cdf(x) >= p (continuous laws: the inverse). p in (0, 1).
double quantile(const DistFn& d, double p);

double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);

double poisson_pmf(int k, double lambda);
double poisson_cdf(int k, double lambda);

}  // namespace adequate::numerics
