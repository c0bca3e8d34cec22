#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adequate/gauss/sample.hpp"
#include "adequate/poisson/adequacy.hpp"
#include "adequate/stepwise/stepwise.hpp"

namespace adequate::io {

// Copper content (mg/litre) of 27 water samples, in the printed order and
// with the printed digits.
const std::vector<std::string>& copper_text();
std::vector<double> copper_values();

// FNV-1a (64 bit) of the values joined by ','. Pinned by the tests.
std::uint64_t copper_checksum();
std::uint64_t fnv1a64(std::string_view bytes);

// Dataset names accepted in place of a file path:
//   copper                  the built-in copper data
//   normal:<n>[:<mu>:<sigma>]   i.i.d. normal sample (default N(0, 1))
//   poisson:<n>:<lambda>        i.i.d. Poisson counts
//   planted:<n>:<p>             y = x3 + 0.5 x7 + 0.1 noise over p Gaussian
//                               columns labelled x1..xp
// Synthetic data draw from `seed`.
bool is_dataset_name(std::string_view name);

gauss::Sample named_sample(std::string_view name, std::uint64_t seed);
std::vector<long> named_counts(std::string_view name, std::uint64_t seed);
stepwise::RegressionData named_regression(std::string_view name, std::uint64_t seed);

}  // namespace adequate::io
