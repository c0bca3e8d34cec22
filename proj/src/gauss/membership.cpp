#include "adequate/gauss/membership.hpp"

#include <algorithm>

#include "adequate/errors.hpp"
#include "kernel.hpp"

namespace adequate::gauss {

std::array<double, 4> feature_pvalues(const GaussFeatures& f, std::size_t n, const T4Table& table) {
  if (table.n() != n) throw ConfigurationError("T4 table was built for another sample size");
  return {detail::p_from_t1(f.t1), detail::p_from_t2(f.t2, n), detail::p_from_t3(f.t3, n),
          table.upper_tail(f.t4)};
}

MembershipResult member_pvalues(const Sample& x, LocationScale theta, const T4Table& table,
                                const std::array<double, 4>& alpha_tilde) {
  const auto p = feature_pvalues(gauss_features(x, theta), x.size(), table);
  MembershipResult r{p[0], p[1], p[2], p[3], *std::min_element(p.begin(), p.end()), true};
  for (std::size_t i = 0; i < 4; ++i) r.member = r.member && p[i] >= 1.0 - alpha_tilde[i];
  return r;
}

MembershipResult member_pvalues(const Sample& x, LocationScale theta, const T4Table& table,
                                double alpha_tilde) {
  return member_pvalues(x, theta, table, {alpha_tilde, alpha_tilde, alpha_tilde, alpha_tilde});
}

}  // namespace adequate::gauss
