#include "adequate/gauss/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adequate/errors.hpp"
#include "adequate/numerics/distributions.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/random.hpp"
#include "kernel.hpp"
#include "search.hpp"

namespace adequate::gauss {

namespace {

void check_table(const Sample& x, const T4Table& table) {
  if (table.n() != x.size()) throw ConfigurationError("T4 table was built for another sample size");
}

bool in_hypothesis(double mu, double mu0, Direction direction) {
  return direction == Direction::AtLeast ? mu >= mu0 : mu <= mu0;
}

}  // namespace

PminOptimum maximize_pmin(const Sample& x, const T4Table& table, const GridConfig& grid) {
  check_table(x, table);
  const detail::PminKernel kernel(x.values(), table);
  return detail::maximize(kernel, detail::default_box(x.values(), grid));
}

PminOptimum grid_max_pmin(const Sample& x, const T4Table& table, const GridConfig& grid) {
  check_table(x, table);
  const detail::PminKernel kernel(x.values(), table);
  const auto hint = detail::maximize(kernel, detail::default_box(x.values(), grid));
  return detail::grid_maximum(kernel, grid_axes(x, grid), hint.theta);
}

bool region_nonempty(const Sample& x, double alpha_tilde, const T4Table& table, const GridConfig& grid) {
  check_table(x, table);
  const detail::PminKernel kernel(x.values(), table);
  const double threshold = 1.0 - alpha_tilde;
  return detail::grid_maximum(kernel, grid_axes(x, grid), std::nullopt, threshold).p_min >= threshold;
}

EmptinessResult min_alpha_nonempty(const Sample& x, const NullTables& tables, const GridConfig& grid) {
  const std::size_t n = x.size();
  const auto best = grid_max_pmin(x, tables.t4_table(n), grid);
  EmptinessResult r{};
  r.region_p = best.p_min;
  const double level = 1.0 - best.p_min;
  r.below_floor = tables.alpha_tilde(n, NullTables::kAlphaHigh) < level;
  r.alpha_star = tables.alpha_for_level(n, level);
  r.p_star = 1.0 - r.alpha_star;
  return r;
}

std::size_t subsample_fit_size(const Sample& x, double alpha, const NullTables& tables,
                               const SubsampleSpec& spec) {
  const std::size_t n = x.size();
  if (spec.m_min < 5 || spec.m_min > n) throw DomainError("subsample sizes must lie in [5, n]");
  if (spec.subsamples == 0) throw DomainError("need at least one subsample");
  auto nonempty_fraction = [&](std::size_t m) {
    const double level = tables.alpha_tilde(m, alpha);
    const T4Table& table = tables.t4_table(m);
    const std::uint64_t stream = numerics::stream_id("gauss/subsample") ^ numerics::splitmix64(m);
    std::vector<char> hit(spec.subsamples, 0);
    numerics::parallel_for(spec.subsamples, [&](std::size_t r) {
      numerics::CounterRng rng(spec.seed, stream, r);
      std::vector<double> pool(x.values().begin(), x.values().end());
      for (std::size_t i = 0; i < m; ++i) {
        std::swap(pool[i], pool[i + rng.below(n - i)]);
      }
      pool.resize(m);
      hit[r] = region_nonempty(Sample(std::move(pool)), level, table) ? 1 : 0;
    });
    return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(hit.size());
  };
  if (nonempty_fraction(n) >= 0.5) return n;
  if (nonempty_fraction(spec.m_min) < 0.5) return spec.m_min - 1;
  std::size_t good = spec.m_min;
  std::size_t bad = n;
  while (bad - good > 1) {
    const std::size_t mid = good + (bad - good) / 2;
    if (nonempty_fraction(mid) >= 0.5) good = mid; else bad = mid;
  }
  return good;
}

RegionPValue region_p_value(const Sample& x, const NullTables& tables) {
  const auto best = grid_max_pmin(x, tables.t4_table(x.size()));
  const auto& null = tables.region_p_null(x.size());
  const auto below = std::upper_bound(null.begin(), null.end(), best.p_min) - null.begin();
  return {best.p_min, static_cast<double>(below) / static_cast<double>(null.size()), best.theta};
}

std::vector<double> region_p_null_quantiles(std::size_t n, std::span<const double> probs,
                                            const NullTables& tables) {
  const auto& null = tables.region_p_null(n);
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back(numerics::empirical_quantile(null, p));
  return out;
}

BoundTest test_mu_bound(const Sample& x, double mu0, Direction direction, const NullTables& tables) {
  const std::size_t n = x.size();
  const T4Table& table = tables.t4_table(n);
  const detail::PminKernel kernel(x.values(), table);
  const auto box = detail::default_box(x.values(), {});
  // The region meets H0 either on the line mu = mu0 or, when the best model
  // already satisfies H0, at that model.
  PminOptimum best = detail::maximize_line(kernel, mu0, 0.5 * box.sigma_low, 2.0 * box.sigma_high);
  const auto global = detail::maximize(kernel, box);
  if (in_hypothesis(global.theta.mu, mu0, direction) && global.p_min > best.p_min) best = global;
  BoundTest r{};
  r.p_min = best.p_min;
  r.theta = best.theta;
  const double level = 1.0 - best.p_min;
  r.below_floor = tables.alpha_tilde(n, NullTables::kAlphaHigh) < level;
  r.alpha_star = tables.alpha_for_level(n, level);
  r.p_star = 1.0 - r.alpha_star;
  return r;
}

double t_test_pvalue(const Sample& x, double mu0, Direction direction) {
  if (x.size() < 2) throw DomainError("t-test needs n >= 2");
  const double sd = x.sd();
  if (!(sd > 0.0)) throw DomainError("t-test needs positive sample variance");
  const double n = static_cast<double>(x.size());
  const double t = std::sqrt(n) * (x.mean() - mu0) / sd;
  const numerics::StudentT law{n - 1.0};
  return numerics::cdf(law, direction == Direction::AtLeast ? t : -t);
}

std::vector<SweepRow> outlier_sweep(const Sample& x, const SweepSpec& spec, const NullTables& tables,
                                    const GridConfig& grid) {
  if (spec.index >= x.size()) throw DomainError("sweep index out of range");
  const std::size_t rows = spec.mode == SweepMode::Drop ? 1 : spec.count;
  std::vector<SweepRow> out;
  out.reserve(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    const double shift = static_cast<double>(k) * spec.step;
    double value = x[spec.index];
    std::optional<Sample> variant;
    switch (spec.mode) {
      case SweepMode::Shift:
        value += shift;
        variant = x.with_value(spec.index, value);
        break;
      case SweepMode::Set:
        value = spec.value + shift;
        variant = x.with_value(spec.index, value);
        break;
      case SweepMode::Drop:
        variant = x.without(spec.index);
        break;
    }
    const auto region = region_scan(*variant, spec.alpha, grid, tables);
    const auto empt = min_alpha_nonempty(*variant, tables, grid);
    out.push_back({value, variant->size(), empt.region_p, region.count(), empt.p_star, mu_projection(region)});
  }
  return out;
}

}  // namespace adequate::gauss
