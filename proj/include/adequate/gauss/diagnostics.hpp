#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adequate/gauss/region.hpp"

namespace adequate::gauss {

struct PminOptimum {
  double p_min;
  LocationScale theta;
};

// max over (mu, sigma) of p_min: a coarse grid over the box of `grid`
// followed by local pattern search. The grid's point counts are ignored.
PminOptimum maximize_pmin(const Sample& x, const T4Table& table, const GridConfig& grid = {});

// Exact maximum of p_min over the points of `grid`.
PminOptimum grid_max_pmin(const Sample& x, const T4Table& table, const GridConfig& grid = {});

struct EmptinessResult {
  double p_star;      // 1 - alpha*
  double alpha_star;  // smallest content with a nonempty region
  double region_p;
  bool below_floor;   // empty even at NullTables::kAlphaHigh
};

EmptinessResult min_alpha_nonempty(const Sample& x, const NullTables& tables, const GridConfig& grid = {});

// Whether some grid point has every p_i >= 1 - alpha_tilde.
bool region_nonempty(const Sample& x, double alpha_tilde, const T4Table& table, const GridConfig& grid = {});

struct SubsampleSpec {
  std::size_t subsamples = 200;
  std::size_t m_min = 5;
  std::uint64_t seed = numerics::kDefaultSeed;
};

// Largest m in [m_min, n] whose random subsamples (without replacement) have
// a nonempty region at content alpha at least half the time; assumes the
// nonempty fraction decreases in m. Returns m_min - 1 if none qualifies.
std::size_t subsample_fit_size(const Sample& x, double alpha, const NullTables& tables,
                               const SubsampleSpec& spec = {});

// region_p is the largest p_min over the default grid; p_of_p places it in
// the null law of the same quantity.
struct RegionPValue {
  double region_p;
  double p_of_p;  // P(null region_p <= region_p)
  LocationScale argmax;
};

RegionPValue region_p_value(const Sample& x, const NullTables& tables);

// Quantiles of the null law of region_p for samples of size n.
std::vector<double> region_p_null_quantiles(std::size_t n, std::span<const double> probs,
                                            const NullTables& tables);

enum class Direction { AtLeast, AtMost };

struct BoundTest {
  double p_star;
  double alpha_star;
  double p_min;  // largest p_min under the null hypothesis
  LocationScale theta;
  bool below_floor;
};

// H0: mu >= mu0 (AtLeast) or mu <= mu0 (AtMost). p* = 1 - alpha* for the
// smallest alpha whose region meets H0.
BoundTest test_mu_bound(const Sample& x, double mu0, Direction direction, const NullTables& tables);

// One-sided t-test p-value for H0: mu >= mu0 (lower tail of t) or mu <= mu0.
// Throws DomainError for n < 2 or zero variance.
double t_test_pvalue(const Sample& x, double mu0, Direction direction = Direction::AtLeast);

enum class SweepMode { Shift, Set, Drop };

struct SweepSpec {
  SweepMode mode = SweepMode::Shift;
  std::size_t index = 0;
  double step = 0.0;
  std::size_t count = 1;
  double value = 0.0;  // first value in Set mode
  double alpha = 0.9;
};

struct SweepRow {
  double value;  // observation at `index`; the removed value in Drop mode
  std::size_t n;
  double region_p;
  std::size_t points;
  double p_star;
  std::optional<Interval> projection;
};

// Shift: x[index] + k step; Set: value + k step; Drop: x without x[index]
// (one row). k = 0..count-1.
std::vector<SweepRow> outlier_sweep(const Sample& x, const SweepSpec& spec, const NullTables& tables,
                                    const GridConfig& grid = {});

}  // namespace adequate::gauss
