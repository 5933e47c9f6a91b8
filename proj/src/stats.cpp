#include "mm1/stats.hpp"

#include <algorithm>

#include <boost/math/distributions/chi_squared.hpp>

#include "mm1/errors.hpp"

namespace mm1 {

namespace {

std::vector<double> histogram(const std::vector<std::uint64_t>& sample, std::uint64_t max_state) {
    std::vector<double> counts(max_state + 1, 0.0);
    for (auto x : sample) counts[x] += 1.0;
    return counts;
}

}  // namespace

ChiSquareResult chi_square_homogeneity(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b, double min_expected) {
    if (a.empty() || b.empty()) throw PreconditionError("chi-square test needs two nonempty samples");
    const std::uint64_t max_state =
        std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
    const auto ca = histogram(a, max_state);
    const auto cb = histogram(b, max_state);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double share_a = na / (na + nb);
    const double share_b = nb / (na + nb);

    std::vector<std::pair<double, double>> bins;
    double acc_a = 0.0;
    double acc_b = 0.0;
    for (std::uint64_t x = 0; x <= max_state; ++x) {
        acc_a += ca[x];
        acc_b += cb[x];
        const double pooled = acc_a + acc_b;
        if (pooled * std::min(share_a, share_b) >= min_expected) {
            bins.emplace_back(acc_a, acc_b);
            acc_a = acc_b = 0.0;
        }
    }
    if (acc_a + acc_b > 0.0) {
        if (bins.empty()) {
            bins.emplace_back(acc_a, acc_b);
        } else {
            bins.back().first += acc_a;
            bins.back().second += acc_b;
        }
    }

    ChiSquareResult result;
    result.degrees_of_freedom = static_cast<int>(bins.size()) - 1;
    if (result.degrees_of_freedom < 1) return result;
    for (const auto& [oa, ob] : bins) {
        const double pooled = oa + ob;
        const double ea = pooled * share_a;
        const double eb = pooled * share_b;
        result.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    boost::math::chi_squared dist(result.degrees_of_freedom);
    result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
    return result;
}

}  // namespace mm1
