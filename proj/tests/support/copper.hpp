#pragma once

#include <vector>

namespace adequate::testing {

// Copper content (mg/litre) of 27 water samples, as printed.
inline const std::vector<double> kCopper = {2.16, 2.21, 2.15, 2.05, 2.06, 2.04, 1.90, 2.03, 2.06,
                                            2.02, 2.06, 1.92, 2.08, 2.05, 1.88, 1.99, 2.01, 1.86,
                                            1.70, 1.88, 1.99, 1.93, 2.20, 2.02, 1.92, 2.13, 2.13};

// Position of the smallest observation, 1.70.
inline constexpr std::size_t kCopperMinIndex = 18;

}  // namespace adequate::testing
