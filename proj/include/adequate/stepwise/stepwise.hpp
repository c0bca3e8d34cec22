#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adequate/numerics/simulation.hpp"

namespace adequate::stepwise {

// Response and covariates, stored column-wise.
class RegressionData {
 public:
  // Throws DomainError for n < 3, ragged columns or non-finite values. Labels
  // default to x1, x2, ...
  RegressionData(std::vector<double> response, std::vector<std::vector<double>> columns,
                 std::vector<std::string> labels = {});

  std::size_t n() const noexcept { return response_.size(); }
  std::size_t p() const noexcept { return columns_.size(); }
  const std::vector<double>& response() const noexcept { return response_; }
  const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<std::vector<double>>& columns() const noexcept { return columns_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  // Columns that are identically zero after centering (or zero outright).
  std::vector<std::size_t> zero_columns(bool centered) const;

 private:
  std::vector<double> response_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::string> labels_;
};

// 1 - pbeta(1 - ss01/ss0, 1/2, (n - p0 - 1)/2)^(p_total - p0), with the
// power taken in log space. Throws DomainError outside 0 <= ss01 <= ss0,
// p0 <= n - 2, p_total > p0.
double step_pvalue(double ss0, double ss01, std::size_t n, std::size_t p0, std::size_t p_total);

// ss01 > ss0 (1 - qbeta((1 - alpha)^(1/(p_total - p0)), 1/2, (n - p0 - 1)/2)).
// Equivalent to step_pvalue(...) > alpha.
bool should_stop(double ss0, double ss01, std::size_t n, std::size_t p0, std::size_t p_total,
                 double alpha);

struct StepwiseConfig {
  bool center = true;  // centering spends one degree of freedom on the intercept
  double collinear_tolerance = 1e-10;
};

struct StepResult {
  std::size_t index;
  std::string label;
  double ss0;
  double ss01;
  double p_value;
  bool stopped;  // the first step with p_value > alpha; not part of the selection
};

struct SkippedColumn {
  std::size_t index;
  std::size_t step;  // number of columns selected when it became collinear
};

struct Selection {
  std::vector<StepResult> steps;
  std::vector<std::size_t> selected;
  std::vector<SkippedColumn> skipped;
  double alpha;
  bool centered;
  double ss_initial;
};

// Forward selection state: an orthonormal basis of the selected span and the
// candidate columns residualized against it.
class SelectionState {
 public:
  SelectionState(const RegressionData& data, const StepwiseConfig& cfg = {});

  // Count that enters the beta law: selected columns plus the intercept when
  // centered.
  std::size_t p0() const noexcept { return selected_.size() + (centered_ ? 1 : 0); }
  // Candidate count plus p0, i.e. p(n) in the beta law's exponent p(n) - p0.
  std::size_t p_total() const noexcept { return p_total_; }
  std::size_t n() const noexcept { return n_; }
  double ss0() const noexcept { return ss0_; }
  const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  const std::vector<SkippedColumn>& skipped() const noexcept { return skipped_; }

  struct Candidate {
    std::size_t index;
    double ss01;
  };
  // Exact minimizer of the residual sum of squares over unselected columns;
  // the lowest index wins ties (values within 1e-12 ss0 count as tied). Columns collinear with the selected span are
  // dropped (and recorded in skipped()). Empty when no candidate is left.
  std::optional<Candidate> best_candidate();

  // Adds the column (one reorthogonalization pass) and updates residuals.
  void include(std::size_t index);

  const std::vector<double>& residual() const noexcept { return residual_; }

 private:
  std::size_t n_;
  std::size_t p_total_;
  bool centered_;
  double tolerance_;
  std::vector<double> residual_;
  double ss0_;
  std::vector<std::vector<double>> basis_;
  std::vector<std::vector<double>> z_;       // residualized candidates
  std::vector<double> norm0_;                // squared norms before residualizing
  std::vector<char> active_;
  std::vector<std::size_t> selected_;
  std::vector<SkippedColumn> skipped_;
};

// Runs until the first p-value exceeds alpha, no candidate remains, or
// p0 would exceed n - 2.
Selection run_selection(const RegressionData& data, double alpha, const StepwiseConfig& cfg = {});

struct BetaLawReport {
  std::size_t n;
  std::size_t p0;
  std::size_t replications;
  double ks_distance;
  double ks_threshold;  // 0.99 Kolmogorov quantile for R values (asymptotic above 5000)
  double mean;          // mean of 1 - SS_j / ss0
  double expected_mean;  // 1 / (n - p0)
  double mean_se;
  bool passed;           // KS below threshold and mean within 4 se
};

// Fixes a response and p0 Gaussian covariates (no intercept), then draws
// replications Gaussian candidates and compares 1 - SS_j / ss0 with
// Beta(1/2, (n - p0 - 1)/2).
BetaLawReport validate_beta_law(std::size_t n, std::size_t p0, const numerics::SimSpec& spec);

// Least-squares fit on the selected columns (with intercept when centered),
// thresholded at 0.5. Returns the number of disagreements with 0/1 labels;
// throws DomainError if the response is not 0/1.
std::size_t misclassifications(const RegressionData& data, const std::vector<std::size_t>& selected,
                               bool centered = true);

}  // namespace adequate::stepwise
