#include "adequate/stepwise/stepwise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adequate/errors.hpp"
#include "adequate/numerics/empirical.hpp"
#include "adequate/numerics/parallel.hpp"
#include "adequate/numerics/random.hpp"
#include "adequate/numerics/special.hpp"

namespace adequate::stepwise {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void center(std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

void check_step(double ss0, double ss01, std::size_t n, std::size_t p0, std::size_t p_total) {
  if (!(ss0 > 0.0) || !(ss01 >= 0.0) || ss01 > ss0) throw DomainError("need 0 <= ss01 <= ss0 and ss0 > 0");
  if (p0 + 2 > n) throw DomainError("need p0 <= n - 2");
  if (p_total <= p0) throw DomainError("need p_total > p0");
}

}  // namespace

RegressionData::RegressionData(std::vector<double> response, std::vector<std::vector<double>> columns,
                               std::vector<std::string> labels)
    : response_(std::move(response)), columns_(std::move(columns)), labels_(std::move(labels)) {
  if (response_.size() < 3) throw DomainError("regression needs n >= 3");
  for (double v : response_) {
    if (!std::isfinite(v)) throw DomainError("response has a non-finite value");
  }
  for (const auto& c : columns_) {
    if (c.size() != response_.size()) throw DomainError("covariate length differs from the response");
    for (double v : c) {
      if (!std::isfinite(v)) throw DomainError("covariate has a non-finite value");
    }
  }
  if (labels_.empty()) {
    for (std::size_t j = 0; j < columns_.size(); ++j) labels_.push_back("x" + std::to_string(j + 1));
  }
  if (labels_.size() != columns_.size()) throw DomainError("label count differs from the column count");
}

std::vector<std::size_t> RegressionData::zero_columns(bool centered) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& c = columns_[j];
    const bool zero = centered ? std::all_of(c.begin(), c.end(), [&](double v) { return v == c[0]; })
                               : std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
    if (zero) out.push_back(j);
  }
  return out;
}

double step_pvalue(double ss0, double ss01, std::size_t n, std::size_t p0, std::size_t p_total) {
  check_step(ss0, ss01, n, p0, p_total);
  const double b = (static_cast<double>(n - p0) - 1.0) / 2.0;
  const double x = 1.0 - ss01 / ss0;
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const auto tail = numerics::incomplete_beta(0.5, b, x);
  const double log_f = tail.upper < 0.5 ? std::log1p(-tail.upper) : std::log(tail.lower);
  return std::clamp(-std::expm1(static_cast<double>(p_total - p0) * log_f), 0.0, 1.0);
}

bool should_stop(double ss0, double ss01, std::size_t n, std::size_t p0, std::size_t p_total, double alpha) {
  check_step(ss0, ss01, n, p0, p_total);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  if (alpha >= 1.0) return false;
  if (alpha <= 0.0) return ss01 > 0.0;
  const double b = (static_cast<double>(n - p0) - 1.0) / 2.0;
  // (1 - alpha)^(1/m) as an upper-tail probability, exact for small alpha.
  const double upper = -std::expm1(std::log1p(-alpha) / static_cast<double>(p_total - p0));
  const double q = numerics::beta_quantile_upper(upper, 0.5, b);
  return ss01 > ss0 * (1.0 - q);
}

SelectionState::SelectionState(const RegressionData& data, const StepwiseConfig& cfg)
    : n_(data.n()),
      p_total_(data.p() + (cfg.center ? 1 : 0)),
      centered_(cfg.center),
      tolerance_(cfg.collinear_tolerance),
      residual_(data.response()),
      z_(data.columns()),
      norm0_(data.p()),
      active_(data.p(), 1) {
  if (centered_) {
    center(residual_);
    for (auto& z : z_) center(z);
  }
  ss0_ = dot(residual_, residual_);
  for (std::size_t j = 0; j < z_.size(); ++j) norm0_[j] = dot(z_[j], z_[j]);
}

std::optional<SelectionState::Candidate> SelectionState::best_candidate() {
  std::vector<double> ss(z_.size(), 0.0);
  std::vector<char> collinear(z_.size(), 0);
  numerics::parallel_for(z_.size(), [&](std::size_t j) {
    if (!active_[j]) return;
    const double zz = dot(z_[j], z_[j]);
    if (!(zz > tolerance_ * norm0_[j]) || norm0_[j] == 0.0) {
      collinear[j] = 1;
      return;
    }
    const double rz = dot(residual_, z_[j]);
    ss[j] = std::max(0.0, ss0_ - rz * rz / zz);
  });
  std::optional<Candidate> best;
  const double tie = 1e-12 * ss0_;
  for (std::size_t j = 0; j < z_.size(); ++j) {
    if (!active_[j]) continue;
    if (collinear[j]) {
      active_[j] = 0;
      skipped_.push_back({j, selected_.size()});
      continue;
    }
    if (!best || ss[j] < best->ss01 - tie) best = Candidate{j, ss[j]};
  }
  return best;
}

void SelectionState::include(std::size_t index) {
  if (index >= z_.size() || !active_[index]) throw DomainError("column is not an active candidate");
  std::vector<double> q = z_[index];
  for (const auto& b : basis_) axpy(-dot(b, q), b, q);
  const double norm = std::sqrt(dot(q, q));
  for (double& v : q) v /= norm;
  active_[index] = 0;
  selected_.push_back(index);
  numerics::parallel_for(z_.size(), [&](std::size_t j) {
    if (active_[j]) axpy(-dot(q, z_[j]), q, z_[j]);
  });
  axpy(-dot(q, residual_), q, residual_);
  ss0_ = dot(residual_, residual_);
  basis_.push_back(std::move(q));
}

Selection run_selection(const RegressionData& data, double alpha, const StepwiseConfig& cfg) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  SelectionState state(data, cfg);
  Selection out{{}, {}, {}, alpha, cfg.center, state.ss0()};
  while (state.p0() + 2 <= state.n() && state.ss0() > 0.0) {
    const auto candidate = state.best_candidate();
    if (!candidate) break;
    const double p = step_pvalue(state.ss0(), candidate->ss01, state.n(), state.p0(), state.p_total());
    const bool stop = p > alpha;
    out.steps.push_back({candidate->index, data.labels()[candidate->index], state.ss0(), candidate->ss01, p, stop});
    if (stop) break;
    state.include(candidate->index);
    out.selected.push_back(candidate->index);
  }
  out.skipped = state.skipped();
  return out;
}

BetaLawReport validate_beta_law(std::size_t n, std::size_t p0, const numerics::SimSpec& spec) {
  if (p0 + 2 > n) throw DomainError("need p0 <= n - 2");
  if (spec.replications < 100) throw ConfigurationError("beta-law validation needs >= 100 replications");
  const std::uint64_t stream = numerics::stream_id("stepwise/beta-law") ^ numerics::splitmix64(n * 7919 + p0);
  // Fixed configuration drawn from index 0; candidates from indices 1..R.
  numerics::CounterRng fixed(spec.seed, stream, 0);
  std::vector<double> y(n);
  for (double& v : y) v = fixed.normal();
  std::vector<std::vector<double>> cols(p0, std::vector<double>(n));
  for (auto& c : cols) {
    for (double& v : c) v = fixed.normal();
  }
  std::vector<std::vector<double>> basis;
  for (const auto& c : cols) {
    std::vector<double> q = c;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) axpy(-dot(b, q), b, q);
    }
    const double norm = std::sqrt(dot(q, q));
    for (double& v : q) v /= norm;
    basis.push_back(std::move(q));
  }
  std::vector<double> r = y;
  for (const auto& b : basis) axpy(-dot(b, r), b, r);
  const double ss0 = dot(r, r);
  std::vector<double> u(spec.replications);
  numerics::parallel_for(spec.replications, [&](std::size_t i) {
    numerics::CounterRng rng(spec.seed, stream, i + 1);
    std::vector<double> z(n);
    for (double& v : z) v = rng.normal();
    for (const auto& b : basis) axpy(-dot(b, z), b, z);
    const double rz = dot(r, z);
    u[i] = rz * rz / (dot(z, z) * ss0);  // 1 - SS_j / ss0
  });
  BetaLawReport rep{};
  rep.n = n;
  rep.p0 = p0;
  rep.replications = spec.replications;
  const double R = static_cast<double>(spec.replications);
  rep.mean = std::accumulate(u.begin(), u.end(), 0.0) / R;
  double var = 0.0;
  for (double v : u) var += (v - rep.mean) * (v - rep.mean);
  rep.mean_se = std::sqrt(var / (R - 1.0) / R);
  rep.expected_mean = 1.0 / static_cast<double>(n - p0);
  std::sort(u.begin(), u.end());
  const double b = (static_cast<double>(n - p0) - 1.0) / 2.0;
  rep.ks_distance = numerics::edf_deviation(u.size(), [&](std::size_t i) {
                      return numerics::incomplete_beta(0.5, b, u[i]).lower;
                    }).kolmogorov();
  rep.ks_threshold = spec.replications > 5000
                         ? numerics::kolmogorov_quantile_asymptotic(0.99, spec.replications)
                         : numerics::kolmogorov_quantile(0.99, spec.replications, spec.seed);
  rep.passed = rep.ks_distance < rep.ks_threshold &&
               std::fabs(rep.mean - rep.expected_mean) <= 4.0 * rep.mean_se;
  return rep;
}

std::size_t misclassifications(const RegressionData& data, const std::vector<std::size_t>& selected, bool centered) {
  for (double v : data.response()) {
    if (v != 0.0 && v != 1.0) throw DomainError("classification needs a 0/1 response");
  }
  const std::size_t n = data.n();
  std::vector<std::vector<double>> basis;
  auto add = [&](std::vector<double> q) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) axpy(-dot(b, q), b, q);
    }
    const double norm = std::sqrt(dot(q, q));
    if (norm == 0.0) return;
    for (double& v : q) v /= norm;
    basis.push_back(std::move(q));
  };
  if (centered) add(std::vector<double>(n, 1.0));
  for (std::size_t j : selected) add(data.column(j));
  std::vector<double> fit(n, 0.0);
  for (const auto& b : basis) axpy(dot(b, data.response()), b, fit);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) wrong += (fit[i] > 0.5 ? 1.0 : 0.0) != data.response()[i];
  return wrong;
}

}  // namespace adequate::stepwise
