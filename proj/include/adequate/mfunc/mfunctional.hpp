#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "adequate/gauss/diagnostics.hpp"
#include "adequate/gauss/region.hpp"
#include "adequate/gauss/sample.hpp"
#include "adequate/numerics/empirical.hpp"
#include "adequate/numerics/random.hpp"
#include "adequate/numerics/simulation.hpp"

namespace adequate::mfunc {

// psi(u, c) = (exp(u/c) - 1) / (exp(u/c) + 1). The default c = 0.2 gives the
// steep psi (slope 2.5 at 0) that the copper results need.
struct MConfig {
  double c = 0.2;
  double tolerance = 1e-10;
  int max_iterations = 200;
};

// Evaluated as tanh(u / (2c)), which cannot overflow.
double psi(double u, double c);

// (u^4 - 1) / (u^4 + 1), evaluated as 1 - 2 / (1 + u^4).
double chi(double u);

struct MEstimate {
  double t_l;
  double t_s;
  int iterations = 0;
  double psi_residual = 0.0;  // mean psi((x - t_l) / t_s)
  double chi_residual = 0.0;
};

// Alternating bisection: location from the psi equation at fixed scale, then
// scale from the chi equation at fixed location. Throws PreconditionError if
// the largest atom has mass >= 0.5 and SolverError without convergence.
MEstimate solve_m(const numerics::EmpiricalDist& e, const MConfig& cfg = {});
MEstimate solve_m(const gauss::Sample& x, const MConfig& cfg = {});

struct MPoint {
  std::size_t t_l_index;
  std::size_t t_s_index;
  double t_l;
  double t_s;
  double psi_stat;  // sqrt(n) |mean psi| / sqrt(V_psi)
  double chi_stat;
  double v_psi;
  double v_chi;
};

struct MRegion {
  gauss::GridAxes axes;
  double alpha;
  double alpha_tilde;  // (2 + alpha) / 3
  double quantile;     // qnorm((1 + alpha_tilde) / 2), the bound on both stats
  std::vector<MPoint> points;

  std::size_t count() const noexcept { return points.size(); }
};

// Unset ranges default to median -+ 6 s / sqrt(n) for t_l (plus three grid
// steps) and [s / 8, 2 s] for t_s, with s = 1.4826 MAD; the box therefore
// does not move when an extreme observation does.
gauss::GridAxes m_grid_axes(const gauss::Sample& x, const gauss::GridConfig& grid);

// Points where both moment inequalities hold.
MRegion m_region(const gauss::Sample& x, double alpha, const MConfig& cfg = {},
                 const gauss::GridConfig& grid = {});

std::optional<gauss::Interval> t_l_projection(const MRegion& region);

// Standardized statistics at one (t_l, t_s).
struct MStats {
  double psi_stat;
  double chi_stat;
  double v_psi;
  double v_chi;
};
MStats m_stats(const gauss::Sample& x, double t_l, double t_s, const MConfig& cfg = {});

using Sampler = std::function<double(numerics::CounterRng&)>;

struct MQuantiles {
  double q_psi;  // simulated quantile of |sum psi| / sqrt(n)
  double q_chi;
  double asymptotic_psi;  // qnorm((1 + alpha_tilde) / 2) sqrt(E psi^2)
  double asymptotic_chi;
  double psi_sum_mean;  // mean of the signed sum / sqrt(n)
  double psi_sum_se;
  MEstimate functional;
};

// T_M(P) of the standard normal law by quadrature (t_l = 0 by symmetry).
MEstimate normal_functional(const MConfig& cfg = {});

// Simulated q_psi, q_chi at alpha_tilde for samples of size n from `model`.
// T_M(P) and E psi^2, E chi^2 come from `functional` when given, otherwise
// from a 200000-draw sample of the model.
MQuantiles m_exact_quantiles(const Sampler& model, double alpha_tilde, std::size_t n,
                             const numerics::SimSpec& spec, const MConfig& cfg = {},
                             std::optional<MEstimate> functional = std::nullopt);

struct MBoundTest {
  double p_star;
  double z_min;  // smallest max(psi_stat, chi_stat) under H0
  double t_s;    // where it is attained
};

// H0: T_L >= bound (AtLeast) or T_L <= bound. A point is a member at alpha
// iff both stats are <= qnorm((1 + alpha_tilde) / 2), so
// p* = min(1, 6 (1 - Phi(z_min))).
MBoundTest test_tl_bound(const gauss::Sample& x, double bound, const MConfig& cfg = {},
                         gauss::Direction direction = gauss::Direction::AtLeast);

}  // namespace adequate::mfunc
