#include "adequate/numerics/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "adequate/errors.hpp"
#include "adequate/numerics/empirical.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/random.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::numerics {

namespace {

double kuiper_normal(std::span<double> y) {
  std::sort(y.begin(), y.end());
  return edf_deviation(y.size(), [&](std::size_t i) { return normal_cdf(y[i]); }).kuiper();
}

double kolmogorov_normal(std::span<double> y) {
  std::sort(y.begin(), y.end());
  return edf_deviation(y.size(), [&](std::size_t i) { return normal_cdf(y[i]); }).kolmogorov();
}

StatisticRegistry make_builtin() {
  StatisticRegistry r;
  r.add("T1", [](std::span<double> y) {
    const double sum = std::accumulate(y.begin(), y.end(), 0.0);
    return std::fabs(sum) / std::sqrt(static_cast<double>(y.size()));
  });
  r.add("T2", [](std::span<double> y) {
    return std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
  });
  r.add("T3", [](std::span<double> y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::fabs(v));
    return m;
  });
  r.add("T4", kuiper_normal);
  r.add("kolmogorov", kolmogorov_normal);
  return r;
}

std::string format_hex(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

}  // namespace

void StatisticRegistry::add(const std::string& id, Statistic statistic) {
  statistics_[id] = std::move(statistic);
}

const Statistic& StatisticRegistry::find(const std::string& id) const {
  const auto it = statistics_.find(id);
  if (it == statistics_.end()) throw ConfigurationError("unregistered statistic '" + id + "'");
  return it->second;
}

bool StatisticRegistry::contains(const std::string& id) const { return statistics_.contains(id); }

const StatisticRegistry& StatisticRegistry::builtin() {
  static const StatisticRegistry registry = make_builtin();
  return registry;
}

QuantileCache::QuantileCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_);
  if (!in) return;
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ConfigurationError("quantile cache " + file_.string() + " has an unknown header");
  }
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string stat, n, reps, seed, prob, value;
    if (!std::getline(fields, stat, ',') || !std::getline(fields, n, ',') ||
        !std::getline(fields, reps, ',') || !std::getline(fields, seed, ',') ||
        !std::getline(fields, prob, ',') || !std::getline(fields, value)) {
      throw ConfigurationError("quantile cache " + file_.string() + ": malformed line " +
                               std::to_string(line_no));
    }
    try {
      entries_[Key{stat, std::stoull(n), std::stoull(reps), std::stoull(seed),
                   std::strtod(prob.c_str(), nullptr)}] = std::strtod(value.c_str(), nullptr);
    } catch (const std::exception&) {
      throw ConfigurationError("quantile cache " + file_.string() + ": malformed line " +
                               std::to_string(line_no));
    }
  }
}

std::optional<double> QuantileCache::lookup(const Key& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void QuantileCache::store(const Key& key, double value) {
  std::lock_guard lock(mutex_);
  entries_[key] = value;
}

std::size_t QuantileCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void QuantileCache::flush() const {
  std::lock_guard lock(mutex_);
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write quantile cache " + file_.string());
  out << kHeader << '\n' << "# statistic,n,replications,seed,probability,value\n";
  for (const auto& [key, value] : entries_) {
    const auto& [stat, n, reps, seed, prob] = key;
    out << stat << ',' << n << ',' << reps << ',' << seed << ',' << format_hex(prob) << ','
        << format_hex(value) << '\n';
  }
}

std::vector<double> simulate_values(const SimSpec& spec, const StatisticRegistry& registry) {
  if (spec.n == 0) throw DomainError("simulation needs a positive sample size");
  if (spec.replications == 0) throw DomainError("simulation needs at least one replication");
  const Statistic& statistic = registry.find(spec.statistic);
  const std::uint64_t stream = stream_id(spec.statistic.c_str());
  std::vector<double> values(spec.replications);
  parallel_for(spec.replications, [&](std::size_t r) {
    CounterRng rng(spec.seed, stream, r);
    std::vector<double> y(spec.n);
    for (double& v : y) v = rng.normal();
    values[r] = statistic(y);
  });
  std::sort(values.begin(), values.end());
  return values;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("empirical quantile requires 0 < p <= 1");
  const double count = static_cast<double>(sorted.size());
  auto index = static_cast<std::size_t>(std::ceil(p * count - 1e-9 * count * p));
  index = std::clamp<std::size_t>(index, 1, sorted.size());
  return sorted[index - 1];
}

std::vector<double> simulate_quantiles(const SimSpec& spec, std::span<const double> probs,
                                       const StatisticRegistry& registry, QuantileCache* cache) {
  if (spec.replications < 1000) throw DomainError("quantile simulation needs at least 1000 replications");
  registry.find(spec.statistic);
  std::vector<double> out(probs.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] < 1.0)) throw DomainError("quantile probabilities must lie in (0, 1)");
    std::optional<double> hit;
    if (cache) hit = cache->lookup({spec.statistic, spec.n, spec.replications, spec.seed, probs[i]});
    if (hit) {
      out[i] = *hit;
    } else {
      missing.push_back(i);
    }
  }
  if (missing.empty()) return out;
  const auto values = simulate_values(spec, registry);
  for (std::size_t i : missing) {
    out[i] = empirical_quantile(values, probs[i]);
    if (cache) cache->store({spec.statistic, spec.n, spec.replications, spec.seed, probs[i]}, out[i]);
  }
  return out;
}

double kolmogorov_quantile(double probability, std::size_t n, std::uint64_t seed,
                           std::size_t replications, QuantileCache* cache) {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw DomainError("kolmogorov quantile requires 0 < probability < 1");
  }
  using MemoKey = std::tuple<double, std::size_t, std::size_t, std::uint64_t>;
  static std::mutex memo_mutex;
  static std::map<MemoKey, double> memo;
  const MemoKey key{probability, n, replications, seed};
  {
    std::lock_guard lock(memo_mutex);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const SimSpec spec{n, replications, seed, "kolmogorov"};
  const double probs[] = {probability};
  const double value = simulate_quantiles(spec, probs, StatisticRegistry::builtin(), cache).front();
  std::lock_guard lock(memo_mutex);
  memo.emplace(key, value);
  return value;
}

double kolmogorov_quantile_asymptotic(double probability, std::size_t n) {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw DomainError("kolmogorov quantile requires 0 < probability < 1");
  }
  if (n == 0) throw DomainError("kolmogorov quantile requires n >= 1");
  // K(x) = 1 - 2 sum_k (-1)^(k-1) exp(-2 k^2 x^2), increasing in x.
  auto K = [](double x) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * x * x);
      s += (k % 2 ? term : -term);
      if (term < 1e-18) break;
    }
    return 1.0 - 2.0 * s;
  };
  double lo = 0.2, hi = 5.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (K(mid) < probability ? lo : hi) = mid;
  }
  const double rn = std::sqrt(static_cast<double>(n));
  return 0.5 * (lo + hi) / (rn + 0.12 + 0.11 / rn);
}

}  // namespace adequate::numerics
