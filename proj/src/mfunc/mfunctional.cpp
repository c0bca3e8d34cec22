#include "adequate/mfunc/mfunctional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adequate/errors.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::mfunc {

namespace {

double median_of_sorted(std::span<const double> s) {
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double mean_psi(std::span<const double> x, double m, double s, double c) {
  double sum = 0.0;
  for (double v : x) sum += psi((v - m) / s, c);
  return sum / static_cast<double>(x.size());
}

double mean_chi(std::span<const double> x, double m, double s) {
  double sum = 0.0;
  for (double v : x) sum += chi((v - m) / s);
  return sum / static_cast<double>(x.size());
}

// Root of the decreasing map m -> mean psi on [min x, max x].
double solve_location(std::span<const double> sorted, double s, double c) {
  double lo = sorted.front();
  double hi = sorted.back();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mean_psi(sorted, mid, s, c) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Root of the decreasing map s -> mean chi, bisected in log s.
double solve_scale(std::span<const double> sorted, double m, double start) {
  double lo = start, hi = start;
  for (int i = 0; i < 2000 && mean_chi(sorted, m, lo) <= 0.0; ++i) lo *= 0.5;
  for (int i = 0; i < 2000 && mean_chi(sorted, m, hi) >= 0.0; ++i) hi *= 2.0;
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (mean_chi(sorted, m, std::exp(mid)) > 0.0) a = mid; else b = mid;
  }
  return std::exp(0.5 * (a + b));
}

double robust_scale(std::span<const double> sorted) {
  const double med = median_of_sorted(sorted);
  std::vector<double> dev(sorted.size());
  std::transform(sorted.begin(), sorted.end(), dev.begin(), [&](double v) { return std::fabs(v - med); });
  std::sort(dev.begin(), dev.end());
  double s = 1.4826 * median_of_sorted(dev);
  if (s > 0.0) return s;
  s = (sorted.back() - sorted.front()) / 2.0;
  return s > 0.0 ? s : 1.0;
}

double standardized(double mean, double v, std::size_t n) {
  if (v <= 0.0) return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(static_cast<double>(n)) * std::fabs(mean) / std::sqrt(v);
}

}  // namespace

double psi(double u, double c) { return std::tanh(u / (2.0 * c)); }

double chi(double u) {
  const double u2 = u * u;
  return 1.0 - 2.0 / (1.0 + u2 * u2);
}

MEstimate solve_m(const numerics::EmpiricalDist& e, const MConfig& cfg) {
  if (!(cfg.c > 0.0)) throw ParameterError("tuning constant c must be positive");
  if (e.largest_atom() >= 0.5) {
    throw PreconditionError("M-functional needs the largest atom to have mass below 0.5");
  }
  const auto x = e.sorted();
  MEstimate est{median_of_sorted(x), robust_scale(x)};
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    est.t_l = solve_location(x, est.t_s, cfg.c);
    est.t_s = solve_scale(x, est.t_l, est.t_s);
    est.iterations = it;
    est.psi_residual = mean_psi(x, est.t_l, est.t_s, cfg.c);
    est.chi_residual = mean_chi(x, est.t_l, est.t_s);
    if (std::fabs(est.psi_residual) < cfg.tolerance && std::fabs(est.chi_residual) < cfg.tolerance) {
      return est;
    }
  }
  throw SolverError("M-functional iteration did not converge",
                    std::max(std::fabs(est.psi_residual), std::fabs(est.chi_residual)));
}

MEstimate solve_m(const gauss::Sample& x, const MConfig& cfg) {
  return solve_m(numerics::EmpiricalDist({x.values().begin(), x.values().end()}), cfg);
}

MStats m_stats(const gauss::Sample& x, double t_l, double t_s, const MConfig& cfg) {
  if (!(t_s > 0.0)) throw DomainError("scale must be positive");
  double sp = 0.0, sp2 = 0.0, sc = 0.0, sc2 = 0.0;
  for (double v : x.values()) {
    const double u = (v - t_l) / t_s;
    const double p = psi(u, cfg.c);
    const double q = chi(u);
    sp += p;
    sp2 += p * p;
    sc += q;
    sc2 += q * q;
  }
  const auto n = x.size();
  const double inv = 1.0 / static_cast<double>(n);
  return {standardized(sp * inv, sp2 * inv, n), standardized(sc * inv, sc2 * inv, n), sp2 * inv, sc2 * inv};
}

gauss::GridAxes m_grid_axes(const gauss::Sample& x, const gauss::GridConfig& grid) {
  std::vector<double> sorted(x.values().begin(), x.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double med = median_of_sorted(sorted);
  const double s = robust_scale(sorted);
  const double half = 6.0 * s / std::sqrt(static_cast<double>(x.size()));
  const double intervals = grid.mu_points > 7 ? static_cast<double>(grid.mu_points - 7) : 1.0;
  const double extra = 3.0 * 2.0 * half / intervals;
  const double mu_low = grid.mu_low.value_or(med - half - extra);
  const double mu_high = grid.mu_high.value_or(med + half + extra);
  const double s_low = grid.sigma_low.value_or(s / 8.0);
  const double s_high = grid.sigma_high.value_or(2.0 * s);
  if (grid.mu_points < 2 || grid.sigma_points < 2) throw DomainError("grid axes need at least two points");
  if (!(mu_high > mu_low) || !(s_high > s_low) || !(s_low > 0.0)) throw DomainError("grid range is empty");
  return {{mu_low, (mu_high - mu_low) / static_cast<double>(grid.mu_points - 1), grid.mu_points},
          {s_low, (s_high - s_low) / static_cast<double>(grid.sigma_points - 1), grid.sigma_points}};
}

MRegion m_region(const gauss::Sample& x, double alpha, const MConfig& cfg, const gauss::GridConfig& grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  MRegion region{m_grid_axes(x, grid), alpha, (2.0 + alpha) / 3.0, 0.0, {}};
  region.quantile = numerics::normal_quantile((1.0 + region.alpha_tilde) / 2.0);
  const auto& mu = region.axes.mu;
  const auto& sigma = region.axes.sigma;
  std::vector<std::vector<MPoint>> rows(mu.points);
  numerics::parallel_for(mu.points, [&](std::size_t i) {
    for (std::size_t j = 0; j < sigma.points; ++j) {
      const auto st = m_stats(x, mu.at(i), sigma.at(j), cfg);
      if (st.psi_stat <= region.quantile && st.chi_stat <= region.quantile) {
        rows[i].push_back({i, j, mu.at(i), sigma.at(j), st.psi_stat, st.chi_stat, st.v_psi, st.v_chi});
      }
    }
  });
  for (auto& row : rows) region.points.insert(region.points.end(), row.begin(), row.end());
  return region;
}

std::optional<gauss::Interval> t_l_projection(const MRegion& region) {
  if (region.points.empty()) return std::nullopt;
  gauss::Interval out{region.points.front().t_l, region.points.front().t_l};
  for (const auto& p : region.points) {
    out.low = std::min(out.low, p.t_l);
    out.high = std::max(out.high, p.t_l);
  }
  return out;
}

MEstimate normal_functional(const MConfig& cfg) {
  // Composite Simpson on [-12, 12]; the integrands are smooth and bounded.
  constexpr int kIntervals = 24000;
  const double a = -12.0, h = 24.0 / kIntervals;
  auto expect = [&](auto&& f) {
    double sum = 0.0;
    for (int k = 0; k <= kIntervals; ++k) {
      const double x = a + k * h;
      const double w = (k == 0 || k == kIntervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      sum += w * f(x) * numerics::normal_pdf(x);
    }
    return sum * h / 3.0;
  };
  double lo = std::log(0.01), hi = std::log(100.0);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double s = std::exp(mid);
    if (expect([&](double x) { return chi(x / s); }) > 0.0) lo = mid; else hi = mid;
  }
  MEstimate est{0.0, std::exp(0.5 * (lo + hi))};
  est.chi_residual = expect([&](double x) { return chi(x / est.t_s); });
  est.psi_residual = expect([&](double x) { return psi(x / est.t_s, cfg.c); });
  return est;
}

MQuantiles m_exact_quantiles(const Sampler& model, double alpha_tilde, std::size_t n,
                             const numerics::SimSpec& spec, const MConfig& cfg,
                             std::optional<MEstimate> functional) {
  if (!(alpha_tilde > 0.0 && alpha_tilde < 1.0)) throw DomainError("alpha_tilde must lie in (0, 1)");
  if (n == 0) throw DomainError("need n >= 1");
  if (spec.replications < 1000) throw ConfigurationError("clt validation needs >= 1000 replications");
  constexpr std::size_t kModelDraws = 200000;
  std::vector<double> big(kModelDraws);
  numerics::CounterRng rng(spec.seed, numerics::stream_id("mfunc/model"), 0);
  for (double& v : big) v = model(rng);
  MQuantiles out{};
  out.functional = functional ? *functional : solve_m(numerics::EmpiricalDist(big), cfg);
  const double tl = out.functional.t_l, ts = out.functional.t_s;
  double vp = 0.0, vc = 0.0;
  for (double v : big) {
    vp += std::pow(psi((v - tl) / ts, cfg.c), 2);
    vc += std::pow(chi((v - tl) / ts), 2);
  }
  vp /= kModelDraws;
  vc /= kModelDraws;
  const double z = numerics::normal_quantile((1.0 + alpha_tilde) / 2.0);
  out.asymptotic_psi = z * std::sqrt(vp);
  out.asymptotic_chi = z * std::sqrt(vc);

  std::vector<double> signed_psi(spec.replications), abs_psi(spec.replications), abs_chi(spec.replications);
  const std::uint64_t stream = numerics::stream_id("mfunc/replicate");
  const double root_n = std::sqrt(static_cast<double>(n));
  numerics::parallel_for(spec.replications, [&](std::size_t r) {
    numerics::CounterRng local(spec.seed, stream, r);
    double sp = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (model(local) - tl) / ts;
      sp += psi(u, cfg.c);
      sc += chi(u);
    }
    signed_psi[r] = sp / root_n;
    abs_psi[r] = std::fabs(sp) / root_n;
    abs_chi[r] = std::fabs(sc) / root_n;
  });
  std::sort(abs_psi.begin(), abs_psi.end());
  std::sort(abs_chi.begin(), abs_chi.end());
  out.q_psi = numerics::empirical_quantile(abs_psi, alpha_tilde);
  out.q_chi = numerics::empirical_quantile(abs_chi, alpha_tilde);
  double mean = 0.0, sq = 0.0;
  for (double v : signed_psi) mean += v;
  mean /= static_cast<double>(spec.replications);
  for (double v : signed_psi) sq += (v - mean) * (v - mean);
  out.psi_sum_mean = mean;
  out.psi_sum_se = std::sqrt(sq / static_cast<double>(spec.replications - 1) / static_cast<double>(spec.replications));
  return out;
}

MBoundTest test_tl_bound(const gauss::Sample& x, double bound, const MConfig& cfg, gauss::Direction direction) {
  const auto est = solve_m(x, cfg);
  const bool center_in_h0 = direction == gauss::Direction::AtLeast ? est.t_l >= bound : est.t_l <= bound;
  if (center_in_h0) return {1.0, 0.0, est.t_s};
  auto z = [&](double s) {
    const auto st = m_stats(x, bound, s, cfg);
    return std::max(st.psi_stat, st.chi_stat);
  };
  constexpr int kPoints = 2001;
  const double lo = std::log(est.t_s / 20.0);
  const double step = std::log(400.0) / (kPoints - 1);
  double best_log = lo, best = z(std::exp(lo));
  for (int k = 1; k < kPoints; ++k) {
    const double ls = lo + k * step;
    const double v = z(std::exp(ls));
    if (v < best) {
      best = v;
      best_log = ls;
    }
  }
  for (double h = step / 2.0; h > step / 4096.0;) {
    bool moved = false;
    for (double d : {-h, h}) {
      const double v = z(std::exp(best_log + d));
      if (v < best) {
        best = v;
        best_log += d;
        moved = true;
        break;
      }
    }
    if (!moved) h /= 2.0;
  }
  return {std::min(1.0, 6.0 * numerics::normal_sf(best)), best, std::exp(best_log)};
}

}  // namespace adequate::mfunc
