#pragma once

#include <array>

#include "adequate/gauss/sample.hpp"
#include "adequate/gauss/tables.hpp"

namespace adequate::gauss {

struct MembershipResult {
  double p1;
  double p2;
  double p3;
  double p4;
  double p_min;
  bool member;
};

// p1, p3, p4 are upper tails at the observed feature, p2 = 2 min(F, 1 - F)
// for the chi-square law of T2. T1..T3 use their exact null laws.
std::array<double, 4> feature_pvalues(const GaussFeatures& f, std::size_t n, const T4Table& table);

// member <=> p_i >= 1 - alpha_tilde for every feature. Throws
// ConfigurationError when the table was built for another sample size.
MembershipResult member_pvalues(const Sample& x, LocationScale theta, const T4Table& table,
                                double alpha_tilde);

// Per-feature levels, for giving one feature less weight.
MembershipResult member_pvalues(const Sample& x, LocationScale theta, const T4Table& table,
                                const std::array<double, 4>& alpha_tilde);

}  // namespace adequate::gauss
