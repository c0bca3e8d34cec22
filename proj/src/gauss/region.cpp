#include "adequate/gauss/region.hpp"

#include <algorithm>
#include <cmath>

#include "adequate/errors.hpp"
#include "adequate/numerics/distributions.hpp"
#include "adequate/numerics/parallel.hpp"
#include "kernel.hpp"
#include "search.hpp"

namespace adequate::gauss {

namespace {

Axis make_axis(double low, double high, std::size_t points) {
  if (points < 2) throw DomainError("grid axes need at least two points");
  if (!(high > low)) throw DomainError("grid range is empty");
  return {low, (high - low) / static_cast<double>(points - 1), points};
}

}  // namespace

GridAxes grid_axes(const Sample& x, const GridConfig& grid) {
  const auto box = detail::default_box(x.values(), grid);
  return {make_axis(box.mu_low, box.mu_high, grid.mu_points),
          make_axis(box.sigma_low, box.sigma_high, grid.sigma_points)};
}

RegionGrid region_scan(const Sample& x, double alpha, const GridConfig& grid, const NullTables& tables) {
  if (x.size() < 5) throw DomainError("region computation needs n >= 5");
  const double level = tables.alpha_tilde(x.size(), alpha);
  return region_scan_at(x, {level, level, level, level}, grid, tables.t4_table(x.size()));
}

RegionGrid region_scan_at(const Sample& x, const std::array<double, 4>& alpha_tilde,
                          const GridConfig& grid, const T4Table& table) {
  if (x.size() < 5) throw DomainError("region computation needs n >= 5");
  if (table.n() != x.size()) throw ConfigurationError("T4 table was built for another sample size");
  RegionGrid region{grid_axes(x, grid), alpha_tilde, {}, 0.0, {0.0, 0.0}};
  const Axis& mu = region.axes.mu;
  const Axis& sigma = region.axes.sigma;
  const detail::PminKernel kernel(x.values(), table);

  std::vector<std::vector<GridPoint>> rows(mu.points);
  std::vector<PminOptimum> row_best(mu.points, {-1.0, {0.0, 0.0}});
  numerics::parallel_for(mu.points, [&](std::size_t i) {
    for (std::size_t j = 0; j < sigma.points; ++j) {
      const LocationScale theta{mu.at(i), sigma.at(j)};
      const auto p = kernel.pvalues(theta.mu, theta.sigma);
      MembershipResult r{p[0], p[1], p[2], p[3], *std::min_element(p.begin(), p.end()), true};
      for (std::size_t k = 0; k < 4; ++k) r.member = r.member && p[k] >= 1.0 - alpha_tilde[k];
      if (r.p_min > row_best[i].p_min) row_best[i] = {r.p_min, theta};
      if (r.member) rows[i].push_back({i, j, theta, r});
    }
  });
  for (std::size_t i = 0; i < mu.points; ++i) {
    region.points.insert(region.points.end(), rows[i].begin(), rows[i].end());
    if (row_best[i].p_min > region.grid_max_p_min) {
      region.grid_max_p_min = row_best[i].p_min;
      region.grid_argmax = row_best[i].theta;
    }
  }
  return region;
}

std::optional<Interval> mu_projection(const RegionGrid& region) {
  if (region.points.empty()) return std::nullopt;
  Interval out{region.points.front().theta.mu, region.points.front().theta.mu};
  for (const auto& p : region.points) {
    out.low = std::min(out.low, p.theta.mu);
    out.high = std::max(out.high, p.theta.mu);
  }
  return out;
}

TInterval t_confidence_interval(const Sample& x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (x.size() < 2) throw DomainError("t interval needs n >= 2");
  const double mean = x.mean();
  const double sd = x.sd();
  if (sd == 0.0) return {{mean, mean}, true};
  const double n = static_cast<double>(x.size());
  const double q = numerics::quantile(numerics::StudentT{n - 1.0}, (1.0 + alpha) / 2.0);
  const double half = q * sd / std::sqrt(n);
  return {{mean - half, mean + half}, false};
}

}  // namespace adequate::gauss
