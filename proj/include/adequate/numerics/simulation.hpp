#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace adequate::numerics {

inline constexpr std::uint64_t kDefaultSeed = 20170301;

struct SimSpec {
  std::size_t n = 0;
  std::size_t replications = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string statistic;
};

// A statistic of an i.i.d. N(0, 1) sample. The span may be reordered.
using Statistic = std::function<double(std::span<double>)>;

class StatisticRegistry {
 public:
  void add(const std::string& id, Statistic statistic);
  // Throws ConfigurationError for unknown ids.
  const Statistic& find(const std::string& id) const;
  bool contains(const std::string& id) const;

  // T1 (sqrt(n)|mean|), T2 (sum of squares), T3 (max |y|), T4 (Kuiper
  // distance to N(0,1)) and "kolmogorov" (Kolmogorov distance to N(0,1),
  // distribution-free once transformed).
  static const StatisticRegistry& builtin();

 private:
  std::map<std::string, Statistic, std::less<>> statistics_;
};

// Text cache of simulated quantiles, keyed by (statistic, n, replications,
// seed, probability). Values are stored as hex floats so a cache hit is
// bit-identical to a fresh simulation.
//
//   # adequate-quantile-cache v1
//   # statistic,n,replications,seed,probability,value
//   T4,27,100000,20170301,0x1.f0a3d70a3d70ap-1,0x1.5c28f5c28f5c3p-2
class QuantileCache {
 public:
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::uint64_t, double>;

  // Loads the file if it exists; throws ConfigurationError on a bad header.
  explicit QuantileCache(std::filesystem::path file);

  std::optional<double> lookup(const Key& key) const;
  void store(const Key& key, double value);
  // Rewrites the file (sorted by key).
  void flush() const;

  const std::filesystem::path& path() const noexcept { return file_; }
  std::size_t size() const;

  static constexpr const char* kHeader = "# adequate-quantile-cache v1";

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<Key, double> entries_;
};

// Sorted simulated values of spec.statistic over spec.replications samples
// of size spec.n. Replicate r draws from CounterRng(seed, id(statistic), r).
std::vector<double> simulate_values(const SimSpec& spec,
                                    const StatisticRegistry& registry = StatisticRegistry::builtin());

// Order statistic ceil(p * R) (1-based) of R sorted values.
double empirical_quantile(std::span<const double> sorted, double p);

// Empirical quantiles of the statistic; replications >= 1000.
std::vector<double> simulate_quantiles(const SimSpec& spec, std::span<const double> probs,
                                       const StatisticRegistry& registry = StatisticRegistry::builtin(),
                                       QuantileCache* cache = nullptr);

// Quantile of the Kolmogorov distance between the empirical law of n
// uniforms and the uniform law. Memoized per (probability, n, replications,
// seed) in-process, and through `cache` when given.
double kolmogorov_quantile(double probability, std::size_t n, std::uint64_t seed = kDefaultSeed,
                           std::size_t replications = 10000, QuantileCache* cache = nullptr);

// Limiting Kolmogorov law with Stephens' finite-n scaling:
// P(D_n <= x) ~ K((sqrt(n) + 0.12 + 0.11 / sqrt(n)) x). Good to a few
// percent in the upper tail for n >= 35.
double kolmogorov_quantile_asymptotic(double probability, std::size_t n);

}  // namespace adequate::numerics
