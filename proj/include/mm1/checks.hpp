#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mm1 {

struct CheckLine {
    std::string check;
    double t = 0.0;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Property suite over `runs` seeded coupled triples on the common-mu problem
/// (lambda0, lambda, mu):
///   dominance          -- number of runs where path_bound falls below another copy
///   zero_hit           -- runs where the copies differ after path_bound first hits 0
///   chi2_lo / chi2_hi  -- p-values of coupled vs independent marginals at each t (level 0.01)
///   markov_tail        -- P(coupling_time > t) against G(lambda_m, lambda, alpha) e^{-alpha t} + 3 sigma
std::vector<CheckLine> run_coupling_checks(double lambda0, double lambda, double mu,
                                           const std::vector<double>& times, std::uint64_t runs,
                                           std::uint64_t master_seed, unsigned workers = 0);

}  // namespace mm1
