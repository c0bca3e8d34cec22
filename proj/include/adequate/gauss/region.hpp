#pragma once

#include <array>
#include <optional>
#include <vector>

#include "adequate/gauss/membership.hpp"
#include "adequate/gauss/sample.hpp"
#include "adequate/gauss/tables.hpp"

namespace adequate::gauss {

// Unset ranges default to mean -+ 6 sd / sqrt(n) widened by three grid steps
// for mu, and [sd / 2.5, 2.5 sd] for sigma.
struct GridConfig {
  std::size_t mu_points = 201;
  std::size_t sigma_points = 201;
  std::optional<double> mu_low;
  std::optional<double> mu_high;
  std::optional<double> sigma_low;
  std::optional<double> sigma_high;
};

struct Axis {
  double low;
  double step;
  std::size_t points;

  double at(std::size_t i) const noexcept { return low + static_cast<double>(i) * step; }
  double high() const noexcept { return at(points - 1); }
};

struct GridAxes {
  Axis mu;
  Axis sigma;
};

// Throws DomainError for fewer than two points per axis or an empty range,
// and when the sample has zero spread and no explicit ranges are given.
GridAxes grid_axes(const Sample& x, const GridConfig& grid);

struct GridPoint {
  std::size_t mu_index;
  std::size_t sigma_index;
  LocationScale theta;
  MembershipResult p;
};

struct RegionGrid {
  GridAxes axes;
  std::array<double, 4> alpha_tilde;
  std::vector<GridPoint> points;  // members only, mu-major order
  // Largest p_min seen on the grid, members or not, and where.
  double grid_max_p_min = 0.0;
  LocationScale grid_argmax{0.0, 0.0};

  std::size_t count() const noexcept { return points.size(); }
};

// Region at content alpha, with alpha_tilde calibrated for n = x.size().
// Throws DomainError for n < 5.
RegionGrid region_scan(const Sample& x, double alpha, const GridConfig& grid, const NullTables& tables);

// Region at fixed per-feature levels.
RegionGrid region_scan_at(const Sample& x, const std::array<double, 4>& alpha_tilde,
                          const GridConfig& grid, const T4Table& table);

struct Interval {
  double low;
  double high;
};

// [min mu, max mu] over member points; nullopt for an empty region.
std::optional<Interval> mu_projection(const RegionGrid& region);

struct TInterval {
  Interval interval;
  bool degenerate;  // zero sample variance
};

// mean -+ t_{(1+alpha)/2, n-1} sd / sqrt(n). Throws DomainError for n < 2.
TInterval t_confidence_interval(const Sample& x, double alpha);

}  // namespace adequate::gauss
