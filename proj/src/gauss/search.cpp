#include "search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <numeric>

#include "adequate/errors.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::gauss::detail {

namespace {

constexpr std::size_t kCoarse = 25;
constexpr std::size_t kStarts = 3;
constexpr double kFinest = 1.0 / 1024.0;

// Pattern search on p_min from `start` with initial steps (h_mu, h_sigma).
PminOptimum climb(const PminKernel& kernel, PminOptimum start, double h_mu, double h_sigma,
                  double stop_at) {
  PminOptimum best = start;
  const double min_mu = h_mu * kFinest;
  int moves = 0;
  while (h_mu > min_mu && moves < 400 && best.p_min < stop_at) {
    PminOptimum next = best;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const double mu = best.theta.mu + di * h_mu;
        const double sigma = best.theta.sigma + dj * h_sigma;
        if (!(sigma > 0.0)) continue;
        const double p = kernel.pmin_above(mu, sigma, next.p_min);
        if (p > next.p_min) next = {p, {mu, sigma}};
      }
    }
    if (next.p_min > best.p_min) {
      best = next;
      ++moves;
    } else {
      h_mu *= 0.5;
      h_sigma *= 0.5;
    }
  }
  return best;
}

}  // namespace

Box default_box(std::span<const double> values, const GridConfig& grid) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const bool needs_sd = !grid.mu_low || !grid.mu_high || !grid.sigma_low || !grid.sigma_high;
  if (needs_sd && !(sd > 0.0)) throw DomainError("default grid needs a sample with positive spread");
  Box box{};
  // mean -+ 6 sd/sqrt(n) split into (points - 7) steps, then three more
  // steps on each side.
  const double half = 6.0 * sd / std::sqrt(n);
  const double intervals = grid.mu_points > 7 ? static_cast<double>(grid.mu_points - 7) : 1.0;
  const double extra = 3.0 * 2.0 * half / intervals;
  box.mu_low = grid.mu_low.value_or(mean - half - extra);
  box.mu_high = grid.mu_high.value_or(mean + half + extra);
  box.sigma_low = grid.sigma_low.value_or(sd / 2.5);
  box.sigma_high = grid.sigma_high.value_or(2.5 * sd);
  if (!(box.sigma_low > 0.0)) throw DomainError("sigma range must be positive");
  return box;
}

PminOptimum maximize(const PminKernel& kernel, const Box& box, double stop_at) {
  const double h_mu = (box.mu_high - box.mu_low) / static_cast<double>(kCoarse - 1);
  const double h_sigma = (box.sigma_high - box.sigma_low) / static_cast<double>(kCoarse - 1);
  // Best kStarts cells, descending; pruning only needs the weakest of them.
  std::array<PminOptimum, kStarts> top;
  top.fill({-1.0, {0.0, 0.0}});
  for (std::size_t i = 0; i < kCoarse; ++i) {
    for (std::size_t j = 0; j < kCoarse; ++j) {
      const LocationScale theta{box.mu_low + static_cast<double>(i) * h_mu,
                                box.sigma_low + static_cast<double>(j) * h_sigma};
      const double p = kernel.pmin_above(theta.mu, theta.sigma, top.back().p_min);
      if (p <= top.back().p_min) continue;
      top.back() = {p, theta};
      std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.p_min > b.p_min; });
      if (p >= stop_at) return top.front();
    }
  }
  PminOptimum best = top.front();
  for (const auto& start : top) {
    if (start.p_min < 0.0) continue;
    const auto local = climb(kernel, start, 0.5 * h_mu, 0.5 * h_sigma, stop_at);
    if (local.p_min > best.p_min) best = local;
    if (best.p_min >= stop_at) break;
  }
  return best;
}

PminOptimum maximize_line(const PminKernel& kernel, double mu, double sigma_low, double sigma_high) {
  constexpr std::size_t kPoints = 401;
  const double ratio = std::log(sigma_high / sigma_low) / static_cast<double>(kPoints - 1);
  PminOptimum best{-1.0, {mu, sigma_low}};
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < kPoints; ++k) {
    const double sigma = sigma_low * std::exp(ratio * static_cast<double>(k));
    const double p = kernel.pmin_above(mu, sigma, best.p_min);
    if (p > best.p_min) {
      best = {p, {mu, sigma}};
      best_k = k;
    }
  }
  // Refine in log sigma around the best grid value.
  double h = ratio * 0.5;
  double log_s = std::log(sigma_low) + ratio * static_cast<double>(best_k);
  while (h > ratio * kFinest) {
    bool moved = false;
    for (double d : {-h, h}) {
      const double sigma = std::exp(log_s + d);
      const double p = kernel.pmin_above(mu, sigma, best.p_min);
      if (p > best.p_min) {
        best = {p, {mu, sigma}};
        log_s += d;
        moved = true;
        break;
      }
    }
    if (!moved) h *= 0.5;
  }
  return best;
}

namespace {

// sigma bounds outside which p1, p2 or p3 falls below `floor`.
class SigmaFilter {
 public:
  SigmaFilter(const PminKernel& kernel) : kernel_(kernel) {}

  void set_floor(double floor) {
    floor_ = std::min(floor, 1.0 - 1e-12);
    if (!(floor_ > 0.0)) return;
    floor = floor_;
    const double n = static_cast<double>(kernel_.n());
    z1_ = numerics::normal_quantile(1.0 - floor / 2.0);
    // p3 >= f  <=>  2 (1 - Phi(t3)) >= 1 - (1 - f)^(1/n)
    const double tail = -std::expm1(std::log1p(-std::min(floor, 1.0 - 1e-16)) / n);
    z3_ = -numerics::normal_quantile(tail / 2.0);
    chi_low_ = numerics::chi_square_quantile(floor / 2.0, n);
    chi_high_ = floor >= 1.0 ? chi_low_ : numerics::chi_square_quantile(1.0 - floor / 2.0, n);
  }

  // [low, high] for this mu; empty when low > high.
  std::pair<double, double> range(double mu) const {
    if (!(floor_ > 0.0)) return {0.0, std::numeric_limits<double>::infinity()};
    const double n = static_cast<double>(kernel_.n());
    const double d = kernel_.mean() - mu;
    const double spread = std::max(kernel_.max() - mu, mu - kernel_.min());
    const double ss = kernel_.centered_ss() + n * d * d;
    double low = std::max(std::sqrt(n) * std::fabs(d) / z1_, spread / z3_);
    low = std::max(low, std::sqrt(ss / chi_high_));
    const double high = std::sqrt(ss / chi_low_);
    constexpr double kSlack = 1e-9;
    return {low * (1.0 - kSlack), high * (1.0 + kSlack)};
  }

 private:
  const PminKernel& kernel_;
  double floor_ = 0.0;
  double z1_ = 0.0;
  double z3_ = 0.0;
  double chi_low_ = 0.0;
  double chi_high_ = 0.0;
};

}  // namespace

PminOptimum grid_maximum(const PminKernel& kernel, const GridAxes& axes, std::optional<LocationScale> hint,
                         double stop_at) {
  const Axis& mu = axes.mu;
  const Axis& sigma = axes.sigma;
  PminOptimum best{-1.0, {mu.at(0), sigma.at(0)}};
  std::size_t best_i = mu.points;
  std::size_t best_j = 0;
  auto consider = [&](std::size_t i, std::size_t j) {
    const double p = kernel.pmin_above(mu.at(i), sigma.at(j), best.p_min);
    // Row-major order breaks ties so the result matches a plain scan.
    if (p > best.p_min || (p == best.p_min && (i < best_i || (i == best_i && j < best_j)))) {
      best = {p, {mu.at(i), sigma.at(j)}};
      best_i = i;
      best_j = j;
      return true;
    }
    return false;
  };
  if (hint) {
    const auto ci = static_cast<long>(std::lround((hint->mu - mu.low) / mu.step));
    const auto cj = static_cast<long>(std::lround((hint->sigma - sigma.low) / sigma.step));
    for (long i = ci - 1; i <= ci + 1; ++i) {
      for (long j = cj - 1; j <= cj + 1; ++j) {
        if (i >= 0 && j >= 0 && i < static_cast<long>(mu.points) && j < static_cast<long>(sigma.points)) {
          consider(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
      }
    }
    if (best.p_min >= stop_at) return best;
  }
  SigmaFilter filter(kernel);
  double filter_floor = std::max(best.p_min, stop_at <= 1.0 ? stop_at : 0.0);
  filter.set_floor(filter_floor);
  for (std::size_t i = 0; i < mu.points; ++i) {
    const auto [low, high] = filter.range(mu.at(i));
    if (low > high || high < sigma.low || low > sigma.high()) continue;
    const double first = std::ceil((low - sigma.low) / sigma.step);
    const double last = std::floor((high - sigma.low) / sigma.step);
    const auto j0 = static_cast<std::size_t>(std::max(0.0, first));
    const auto j1 = static_cast<std::size_t>(std::min(static_cast<double>(sigma.points - 1), last));
    for (std::size_t j = j0; j <= j1; ++j) {
      if (!consider(i, j)) continue;
      if (best.p_min >= stop_at) return best;
      if (best.p_min > filter_floor) {
        filter_floor = best.p_min;
        filter.set_floor(filter_floor);
      }
    }
  }
  return best;
}

}  // namespace adequate::gauss::detail
