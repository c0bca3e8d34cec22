#include "adequate/gauss/tables.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "adequate/errors.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/random.hpp"
#include "adequate/numerics/special.hpp"
#include "kernel.hpp"
#include "search.hpp"

namespace adequate::gauss {

namespace {

std::uint64_t stream_for(const char* label, std::size_t n) {
  return numerics::stream_id(label) ^ numerics::splitmix64(n);
}

std::vector<double> standard_normal_sample(std::uint64_t seed, std::uint64_t stream, std::size_t r,
                                           std::size_t n) {
  numerics::CounterRng rng(seed, stream, r);
  std::vector<double> y(n);
  for (double& v : y) v = rng.normal();
  return y;
}

}  // namespace

double kuiper_upper_tail(double v, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = v * (rn + 0.155 + 0.24 / rn);
  if (lambda < 0.4) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double j2l2 = static_cast<double>(j * j) * lambda * lambda;
    const double term = (4.0 * j2l2 - 1.0) * std::exp(-2.0 * j2l2);
    sum += term;
    if (std::fabs(term) < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

T4Table::T4Table(std::size_t n, std::vector<double> sorted) : n_(n), sorted_(std::move(sorted)) {
  if (sorted_.empty()) throw ConfigurationError("empty T4 table");
  if (!std::is_sorted(sorted_.begin(), sorted_.end())) throw ConfigurationError("T4 table not sorted");
}

T4Table T4Table::simulate(std::size_t n, std::size_t replications, std::uint64_t seed) {
  return T4Table(n, numerics::simulate_values({n, replications, seed, "T4"}));
}

double T4Table::upper_tail(double t) const {
  const auto above = static_cast<std::size_t>(sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), t));
  const double r = static_cast<double>(sorted_.size());
  if (above >= kTailCount) return static_cast<double>(above) / r;
  return std::min(kuiper_upper_tail(t, n_), static_cast<double>(kTailCount) / r);
}

double T4Table::quantile(double p) const { return numerics::empirical_quantile(sorted_, p); }

MinPNull::MinPNull(std::vector<double> min_p) : sorted_(std::move(min_p)) {
  if (sorted_.empty()) throw ConfigurationError("empty min-p null table");
  std::sort(sorted_.begin(), sorted_.end());
}

double MinPNull::lower_fraction(double u) const {
  const double r = static_cast<double>(sorted_.size());
  const auto below = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), u) - sorted_.begin());
  if (below >= kTailCount || sorted_.size() < kTailCount) return static_cast<double>(below) / r;
  const double anchor = sorted_[kTailCount - 1];
  const double at_anchor = static_cast<double>(kTailCount) / r;
  if (!(anchor > 0.0)) return at_anchor;
  return std::min(at_anchor, at_anchor * u / anchor);
}

double MinPNull::coverage(double alpha_tilde) const {
  if (alpha_tilde >= 1.0) return 1.0;
  if (alpha_tilde <= 0.0) return 0.0;
  return 1.0 - lower_fraction(1.0 - alpha_tilde);
}

double MinPNull::level_for_coverage(double target) const {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (coverage(mid) < target) lo = mid; else hi = mid;
  }
  return hi;
}

std::optional<std::vector<double>> load_table_file(const std::filesystem::path& file, const std::string& header) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigurationError("table file " + file.string() + " has an unexpected header");
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw ConfigurationError("table file " + file.string() + " has a malformed value");
    values.push_back(v);
  }
  return values;
}

void save_table_file(const std::filesystem::path& file, const std::string& header, const std::vector<double>& values) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigurationError("cannot write table file " + tmp);
    out << header << '\n';
    char buf[64];
    for (double v : values) {
      std::snprintf(buf, sizeof buf, "%a\n", v);
      out << buf;
    }
    if (!out) throw ConfigurationError("cannot write table file " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

std::vector<double> NullTables::cached(const char* kind, std::size_t n, std::size_t replications,
                                       const std::function<std::vector<double>()>& compute) const {
  if (config_.cache_dir.empty()) return compute();
  std::ostringstream header, name;
  header << "# adequate-table v1 " << kind << " n=" << n << " replications=" << replications
         << " seed=" << config_.seed;
  name << kind << "-n" << n << "-r" << replications << "-s" << config_.seed << ".txt";
  const auto file = config_.cache_dir / name.str();
  if (auto values = load_table_file(file, header.str())) {
    if (values->size() != replications) throw ConfigurationError("table file " + file.string() + " is truncated");
    return *values;
  }
  auto values = compute();
  save_table_file(file, header.str(), values);
  return values;
}

NullTables::NullTables(GaussConfig config) : config_(config) {
  if (config_.t4_replications < 1000 || config_.calibration_replications < 1000) {
    throw DomainError("null tables need at least 1000 replications");
  }
}

const T4Table& NullTables::t4_table(std::size_t n) const {
  std::lock_guard lock(mutex_);
  if (auto it = t4_.find(n); it != t4_.end()) return it->second;
  auto values = cached("t4", n, config_.t4_replications, [&] {
    return numerics::simulate_values({n, config_.t4_replications, config_.seed, "T4"});
  });
  return t4_.emplace(n, T4Table(n, std::move(values))).first->second;
}

const MinPNull& NullTables::min_p(std::size_t n, const char* label,
                                  std::map<std::size_t, MinPNull>& memo) const {
  std::lock_guard lock(mutex_);
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const T4Table& table = t4_table(n);
  auto values = cached(std::strchr(label, '/') + 1, n, config_.calibration_replications, [&] {
    const std::uint64_t stream = stream_for(label, n);
    std::vector<double> v(config_.calibration_replications);
    numerics::parallel_for(v.size(), [&](std::size_t r) {
      const auto y = standard_normal_sample(config_.seed, stream, r, n);
      v[r] = detail::PminKernel(y, table).pmin_above(0.0, 1.0, 0.0);
    });
    std::sort(v.begin(), v.end());
    return v;
  });
  return memo.emplace(n, MinPNull(std::move(values))).first->second;
}

const MinPNull& NullTables::min_p_null(std::size_t n) const { return min_p(n, "gauss/min-p", min_p_); }

const MinPNull& NullTables::coverage_null(std::size_t n) const {
  return min_p(n, "gauss/coverage", coverage_);
}

const std::vector<double>& NullTables::region_p_null(std::size_t n) const {
  std::lock_guard lock(mutex_);
  if (auto it = region_p_.find(n); it != region_p_.end()) return it->second;
  const T4Table& table = t4_table(n);
  auto values = cached("region-p", n, config_.region_p_replications, [&] {
    const std::uint64_t stream = stream_for("gauss/region-p", n);
    std::vector<double> v(config_.region_p_replications);
    numerics::parallel_for(v.size(), [&](std::size_t r) {
      const auto y = standard_normal_sample(config_.seed, stream, r, n);
      const detail::PminKernel kernel(y, table);
      const Sample sample(y);
      const auto hint = detail::maximize(kernel, detail::default_box(y, {}));
      v[r] = detail::grid_maximum(kernel, grid_axes(sample, {}), hint.theta).p_min;
    });
    std::sort(v.begin(), v.end());
    return v;
  });
  return region_p_.emplace(n, std::move(values)).first->second;
}

double NullTables::alpha_tilde(std::size_t n, double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double star = min_p_null(n).coverage((3.0 + alpha) / 4.0);
  return std::min((3.0 + 2.0 * alpha - star) / 4.0, std::nextafter(1.0, 0.0));
}

double NullTables::alpha_for_level(std::size_t n, double level) const {
  if (alpha_tilde(n, kAlphaHigh) < level) return kAlphaHigh;
  if (alpha_tilde(n, kAlphaLow) >= level) return kAlphaLow;
  // Bisection on log(1 - alpha): resolution is relative to 1 - alpha, which
  // matters once p* is of order 1e-4.
  double lo = std::log1p(-kAlphaLow);   // alpha small
  double hi = std::log1p(-kAlphaHigh);  // alpha large
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (alpha_tilde(n, -std::expm1(mid)) >= level) hi = mid; else lo = mid;
  }
  return -std::expm1(hi);
}

QuantileSet NullTables::quantile_set(std::size_t n, double level) const {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("alpha_tilde must lie in (0, 1)");
  const double df = static_cast<double>(n);
  QuantileSet q{};
  q.q1 = numerics::normal_quantile((1.0 + level) / 2.0);
  q.q21 = numerics::chi_square_quantile((1.0 - level) / 2.0, df);
  q.q22 = numerics::chi_square_quantile((1.0 + level) / 2.0, df);
  q.q3 = numerics::normal_quantile((1.0 + std::pow(level, 1.0 / df)) / 2.0);
  q.q4 = t4_table(n).quantile(level);
  q.alpha_tilde = level;
  q.n = n;
  return q;
}

Calibration calibrate(std::size_t n, double alpha, const NullTables& tables, bool fixed_point) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const MinPNull& null = tables.min_p_null(n);
  Calibration c;
  c.alpha = alpha;
  c.alpha_start = (3.0 + alpha) / 4.0;
  c.alpha_star = null.coverage(c.alpha_start);
  c.alpha_tilde = tables.alpha_tilde(n, alpha);
  if (fixed_point) {
    while (std::fabs(null.coverage(c.alpha_tilde) - alpha) >= 0.005 && c.iterations < 100) {
      c.alpha_tilde = std::clamp(c.alpha_tilde + (alpha - null.coverage(c.alpha_tilde)) / 4.0, alpha,
                                 std::nextafter(1.0, 0.0));
      ++c.iterations;
    }
  }
  c.alpha_effective = tables.coverage_null(n).coverage(c.alpha_tilde);
  return c;
}

Calibration calibrate(std::size_t n, double alpha, const numerics::SimSpec& spec) {
  GaussConfig config;
  config.calibration_replications = spec.replications;
  config.seed = spec.seed;
  return calibrate(n, alpha, NullTables(config));
}

}  // namespace adequate::gauss
