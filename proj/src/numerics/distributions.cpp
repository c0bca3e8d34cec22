#include "adequate/numerics/distributions.hpp"

#include <cmath>
#include <limits>

#include "adequate/errors.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::numerics {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_df(double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw ParameterError("student-t requires df > 0");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("poisson requires lambda > 0");
}

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile requires 0 < p < 1");
}

double t_pdf(double t, double df) {
  return std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                  0.5 * std::log(df * M_PI) - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

}  // namespace

double student_t_cdf(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw DomainError("student-t cdf requires a finite argument");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  // Half the two-sided tail mass beyond |t|.
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x).lower;
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  check_df(df);
  check_probability(p);
  if (p == 0.5) return 0.0;
  // Invert the symmetric tail through the incomplete beta quantile, then
  // polish with Newton on the cdf.
  const double tail = p < 0.5 ? p : 1.0 - p;
  const double x = beta_quantile(2.0 * tail, 0.5 * df, 0.5);
  double t = std::sqrt(df * (1.0 - x) / x);
  if (p < 0.5) t = -t;
  for (int i = 0; i < 3; ++i) {
    const double f = student_t_cdf(t, df) - p;
    const double dens = t_pdf(t, df);
    if (dens <= 0.0) break;
    const double step = f / dens;
    t -= step;
    if (std::fabs(step) < 1e-15 * std::max(1.0, std::fabs(t))) break;
  }
  return t;
}

double poisson_pmf(int k, double lambda) {
  check_lambda(lambda);
  if (k < 0) return 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double poisson_cdf(int k, double lambda) {
  check_lambda(lambda);
  if (k < 0) return 0.0;
  return incomplete_gamma(k + 1.0, lambda).upper;
}

double cdf(const DistFn& d, double x) {
  if (!std::isfinite(x)) throw DomainError("cdf requires a finite argument");
  return std::visit(
      Overloaded{
          [x](StandardNormal) { return normal_cdf(x); },
          [x](StudentT t) { return student_t_cdf(x, t.df); },
          [x](Beta b) { return incomplete_beta(b.a, b.b, x).lower; },
          [x](Poisson p) { return poisson_cdf(static_cast<int>(std::floor(x)), p.lambda); },
      },
      d);
}

double quantile(const DistFn& d, double p) {
  check_probability(p);
  return std::visit(
      Overloaded{
          [p](StandardNormal) { return normal_quantile(p); },
          [p](StudentT t) { return student_t_quantile(p, t.df); },
          [p](Beta b) { return beta_quantile(p, b.a, b.b); },
          [p](Poisson pois) {
            check_lambda(pois.lambda);
            // Start below the normal-approximation guess and walk upward.
            const double guess = pois.lambda + normal_quantile(p) * std::sqrt(pois.lambda);
            int k = std::max(0, static_cast<int>(std::floor(guess)) - 2);
            while (k > 0 && poisson_cdf(k - 1, pois.lambda) >= p) --k;
            while (poisson_cdf(k, pois.lambda) < p) ++k;
            return static_cast<double>(k);
          },
      },
      d);
}

}  // namespace adequate::numerics
