#pragma once

#include <cstdint>
#include <vector>

namespace mm1 {

struct ChiSquareResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Two-sample chi-square homogeneity test on nonnegative integer samples. Adjacent states are
/// pooled until every bin has expected count >= `min_expected` in both samples.
ChiSquareResult chi_square_homogeneity(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b,
                                       double min_expected = 5.0);

}  // namespace mm1
