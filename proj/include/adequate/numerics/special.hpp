#pragma once

// Special functions backing the distribution layer: normal tails and
// quantile, regularized incomplete beta and gamma functions.

namespace adequate::numerics {

// Lower and upper regularized tails. Both are computed directly (one of them
// by the symmetry relation) so that a tail near 1 keeps its complement's
// relative accuracy.
struct TailPair {
  double lower;
  double upper;
};

double normal_cdf(double x);
double normal_sf(double x);
double normal_pdf(double x);

// Wichura's AS 241 (PPND16); relative accuracy about 1e-16.
double normal_quantile(double p);

// I_x(a, b) and 1 - I_x(a, b). Lentz continued fraction with the usual
// x > (a + 1) / (a + b + 2) symmetry split.
TailPair incomplete_beta(double a, double b, double x);

// P(a, x) and Q(a, x); series below x < a + 1, continued fraction above.
TailPair incomplete_gamma(double a, double x);

double log_beta(double a, double b);

// Density of Beta(a, b) at x in (0, 1).
double beta_pdf(double a, double b, double x);

// x with I_x(a, b) = p, and x with 1 - I_x(a, b) = q. Safeguarded Newton on a
// shrinking bracket, absolute accuracy ~1e-15 in x.
double beta_quantile(double p, double a, double b);
double beta_quantile_upper(double q, double a, double b);

double chi_square_cdf(double x, double df);
double chi_square_quantile(double p, double df);

}  // namespace adequate::numerics
