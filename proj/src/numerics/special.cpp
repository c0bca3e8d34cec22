#include "adequate/numerics/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "adequate/errors.hpp"

namespace adequate::numerics {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// Continued fraction for I_x(a, b), modified Lentz.
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw SolverError("incomplete beta continued fraction did not converge", std::fabs(h));
}

double gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 1; n <= kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw SolverError("incomplete gamma series did not converge", del);
}

double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw SolverError("incomplete gamma continued fraction did not converge", h);
}

void check_beta_params(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ParameterError("beta parameters must be positive and finite");
  }
}

// Solve tail(x) = target on [0, 1], tail monotone; `increasing` tells the
// direction. Newton steps use the beta density, falling back to bisection
// whenever a step leaves the bracket.
template <typename Tail>
double solve_beta(double target, double a, double b, Tail tail, bool increasing) {
  double lo = 0.0;
  double hi = 1.0;
  // Start from the mean; cheap and always interior.
  double x = a / (a + b);
  for (int it = 0; it < 400; ++it) {
    const double f = tail(x) - target;
    if (f == 0.0) return x;
    if ((f > 0.0) == increasing) {
      hi = x;
    } else {
      lo = x;
    }
    const double dens = beta_pdf(a, b, x);
    double next = x;
    if (dens > 0.0 && std::isfinite(dens)) {
      next = x - (increasing ? f : -f) / dens;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-16 * std::max(1.0, x) || hi - lo <= 1e-16) return next;
    x = next;
  }
  return x;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile requires 0 < p < 1");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_pdf(double a, double b, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

TailPair incomplete_beta(double a, double b, double x) {
  check_beta_params(a, b);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires 0 <= x <= 1");
  if (x == 0.0) return {0.0, 1.0};
  if (x == 1.0) return {1.0, 0.0};
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::exp(log_front) * beta_cf(a, b, x) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
  return {1.0 - upper, upper};
}

TailPair incomplete_gamma(double a, double x) {
  if (!(a > 0.0)) throw ParameterError("incomplete gamma requires a > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  if (x < a + 1.0) {
    const double p = gamma_series(a, x);
    return {p, 1.0 - p};
  }
  const double q = gamma_cf(a, x);
  return {1.0 - q, q};
}

double beta_quantile(double p, double a, double b) {
  check_beta_params(a, b);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("beta quantile requires 0 < p < 1");
  return solve_beta(p, a, b, [a, b](double x) { return incomplete_beta(a, b, x).lower; }, true);
}

double beta_quantile_upper(double q, double a, double b) {
  check_beta_params(a, b);
  if (!(q > 0.0 && q < 1.0)) throw DomainError("beta upper quantile requires 0 < q < 1");
  return solve_beta(q, a, b, [a, b](double x) { return incomplete_beta(a, b, x).upper; }, false);
}

double chi_square_cdf(double x, double df) {
  if (!(df > 0.0)) throw ParameterError("chi-square requires df > 0");
  if (x <= 0.0) return 0.0;
  return incomplete_gamma(0.5 * df, 0.5 * x).lower;
}

double chi_square_quantile(double p, double df) {
  if (!(df > 0.0)) throw ParameterError("chi-square requires df > 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chi-square quantile requires 0 < p < 1");
  // Wilson-Hilferty start, then bisection/Newton on a bracket.
  const double z = normal_quantile(p);
  const double h = 2.0 / (9.0 * df);
  double x = std::max(1e-12, df * std::pow(1.0 - h + z * std::sqrt(h), 3.0));
  double lo = 0.0;
  double hi = std::max(2.0 * x, df + 50.0 * std::sqrt(2.0 * df) + 100.0);
  const double k = 0.5 * df;
  for (int it = 0; it < 400; ++it) {
    const double f = chi_square_cdf(x, df) - p;
    if (f == 0.0) return x;
    if (f > 0.0) hi = x; else lo = x;
    const double dens = std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - std::lgamma(k));
    double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

}  // namespace adequate::numerics
