#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <span>
#include <tuple>
#include <vector>

#include "adequate/numerics/simulation.hpp"

namespace adequate::gauss {

struct GaussConfig {
  std::size_t t4_replications = 100000;
  std::size_t calibration_replications = 10000;
  std::size_t region_p_replications = 10000;
  std::uint64_t seed = numerics::kDefaultSeed;
  // When set, simulated tables are also read from and written to this
  // directory (see load_table_file).
  std::filesystem::path cache_dir;
};

// Sorted table values stored as hex floats, one per line, after the header
//   # adequate-table v1 <kind> n=<n> replications=<R> seed=<seed>
// Returns nullopt for a missing file; throws ConfigurationError when the
// header does not match.
std::optional<std::vector<double>> load_table_file(const std::filesystem::path& file, const std::string& header);
void save_table_file(const std::filesystem::path& file, const std::string& header, const std::vector<double>& values);

// Asymptotic P(V > v) for the Kuiper statistic of n observations against a
// fully specified continuous law, with Stephens' finite-n correction.
double kuiper_upper_tail(double v, std::size_t n);

// Simulated null law of T4 for samples of size n.
class T4Table {
 public:
  T4Table(std::size_t n, std::vector<double> sorted);

  static T4Table simulate(std::size_t n, std::size_t replications, std::uint64_t seed);

  std::size_t n() const noexcept { return n_; }
  std::size_t replications() const noexcept { return sorted_.size(); }

  // P(T4 > t): the table fraction, or the asymptotic tail once fewer than
  // kTailCount simulated values exceed t.
  double upper_tail(double t) const;
  double quantile(double p) const;

  static constexpr std::size_t kTailCount = 50;

 private:
  std::size_t n_;
  std::vector<double> sorted_;
};

// Null law of min(p1..p4) at the generating parameter.
class MinPNull {
 public:
  explicit MinPNull(std::vector<double> min_p);

  // P(min p >= 1 - alpha_tilde): the joint content at per-feature level
  // alpha_tilde. Below the kTailCount-th smallest simulated value the lower
  // tail of min p is extrapolated linearly to 0.
  double coverage(double alpha_tilde) const;

  // Per-feature level whose joint content is `target`.
  double level_for_coverage(double target) const;

  std::span<const double> sorted() const noexcept { return sorted_; }

  static constexpr std::size_t kTailCount = 50;

 private:
  double lower_fraction(double u) const;

  std::vector<double> sorted_;
};

struct Calibration {
  double alpha = 0.0;
  double alpha_start = 0.0;      // (3 + alpha) / 4
  double alpha_star = 0.0;       // simulated joint content at alpha_start
  double alpha_tilde = 0.0;      // per-feature level used for membership
  double alpha_effective = 0.0;  // joint content at alpha_tilde, independent simulation
  int iterations = 1;
};

struct QuantileSet {
  double q1;   // upper quantile of T1
  double q21;  // lower quantile of T2
  double q22;  // upper quantile of T2
  double q3;
  double q4;
  double alpha_tilde;
  std::size_t n;
};

// Memoized null tables per sample size. Safe to share between threads.
class NullTables {
 public:
  explicit NullTables(GaussConfig config = {});

  const GaussConfig& config() const noexcept { return config_; }

  const T4Table& t4_table(std::size_t n) const;
  const MinPNull& min_p_null(std::size_t n) const;
  // Second min-p simulation on an independent stream; used only to report
  // effective coverage.
  const MinPNull& coverage_null(std::size_t n) const;
  // Sorted region p-values of standard normal samples of size n.
  const std::vector<double>& region_p_null(std::size_t n) const;

  // Calibrated per-feature level for content alpha, one refinement step.
  double alpha_tilde(std::size_t n, double alpha) const;
  // Content alpha whose calibrated level is alpha_tilde, searched over
  // [kAlphaLow, kAlphaHigh]. Returns kAlphaHigh when even that level is
  // too small.
  double alpha_for_level(std::size_t n, double alpha_tilde) const;

  QuantileSet quantile_set(std::size_t n, double alpha_tilde) const;

  static constexpr double kAlphaLow = 0.001;
  static constexpr double kAlphaHigh = 0.999999;

 private:
  const MinPNull& min_p(std::size_t n, const char* label,
                        std::map<std::size_t, MinPNull>& memo) const;
  std::vector<double> cached(const char* kind, std::size_t n, std::size_t replications,
                             const std::function<std::vector<double>()>& compute) const;

  GaussConfig config_;
  mutable std::recursive_mutex mutex_;
  mutable std::map<std::size_t, T4Table> t4_;
  mutable std::map<std::size_t, MinPNull> min_p_;
  mutable std::map<std::size_t, MinPNull> coverage_;
  mutable std::map<std::size_t, std::vector<double>> region_p_;
};

// One refinement from (3 + alpha) / 4, or, with
// fixed_point, iterated until the simulated content is within 0.005 of alpha.
Calibration calibrate(std::size_t n, double alpha, const NullTables& tables, bool fixed_point = false);
Calibration calibrate(std::size_t n, double alpha, const numerics::SimSpec& spec);

}  // namespace adequate::gauss
