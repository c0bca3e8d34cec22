#pragma once

#include <optional>
#include <span>

#include "adequate/gauss/diagnostics.hpp"
#include "adequate/gauss/region.hpp"
#include "kernel.hpp"

namespace adequate::gauss::detail {

struct Box {
  double mu_low;
  double mu_high;
  double sigma_low;
  double sigma_high;
};

Box default_box(std::span<const double> values, const GridConfig& grid);

// Coarse grid over the box, then pattern search from the best few cells.
// Returns as soon as p_min >= stop_at is found.
PminOptimum maximize(const PminKernel& kernel, const Box& box, double stop_at = 2.0);

// Exact maximum of p_min over the grid points. `hint` (e.g. from maximize)
// only seeds the pruning bound; rows are scanned only on the sigma interval
// where p1..p3 can still exceed the bound. With stop_at, returns the first
// point reaching it.
PminOptimum grid_maximum(const PminKernel& kernel, const GridAxes& axes,
                         std::optional<LocationScale> hint = std::nullopt, double stop_at = 2.0);

// Maximum over sigma at fixed mu.
PminOptimum maximize_line(const PminKernel& kernel, double mu, double sigma_low, double sigma_high);

}  // namespace adequate::gauss::detail
