#include "mm1/checks.hpp"

#include <algorithm>
#include <cmath>

#include "mm1/bounds.hpp"
#include "mm1/errors.hpp"
#include "mm1/mgf.hpp"
#include "mm1/model.hpp"
#include "mm1/parallel.hpp"
#include "mm1/rng.hpp"
#include "mm1/sim.hpp"
#include "mm1/stats.hpp"

namespace mm1 {

namespace {

constexpr std::uint64_t kCoupleStream = 0x636f75706c652d63ULL;
constexpr double kChiSquareLevel = 0.01;

struct RunSummary {
    bool dominance_ok = true;
    bool zero_hit_ok = true;
    double coupling_time = 0.0;
    std::vector<std::uint64_t> lo_states;
    std::vector<std::uint64_t> hi_states;
};

RunSummary summarize(const CoupledTriple& triple, const std::vector<double>& times) {
    RunSummary s;
    s.coupling_time = triple.coupling_time;
    auto check_at = [&](double t) {
        const auto b = triple.path_bound.state_at(t);
        const auto lo = triple.path_lo.state_at(t);
        const auto hi = triple.path_hi.state_at(t);
        if (b < lo || b < hi) s.dominance_ok = false;
        if (t >= triple.bound_zero_hit && !(lo == hi && hi == b)) s.zero_hit_ok = false;
    };
    check_at(0.0);
    for (const auto* path : {&triple.path_lo, &triple.path_hi}) {
        for (double t : path->event_times) check_at(t);
    }
    if (triple.coupling_time > triple.bound_zero_hit) s.zero_hit_ok = false;
    for (double t : times) {
        s.lo_states.push_back(triple.path_lo.state_at(t));
        s.hi_states.push_back(triple.path_hi.state_at(t));
    }
    return s;
}

}  // namespace

std::vector<CheckLine> run_coupling_checks(double lambda0, double lambda, double mu,
                                           const std::vector<double>& times, std::uint64_t runs,
                                           std::uint64_t master_seed, unsigned workers) {
    validate_spec(lambda0, mu, lambda, mu);
    if (times.empty()) throw PreconditionError("coupling checks need at least one time");
    if (runs < 2) throw PreconditionError("coupling checks need at least two runs");
    const double horizon = *std::max_element(times.begin(), times.end());

    const auto summaries = parallel_map<RunSummary>(runs, workers, [&](std::uint64_t i) {
        return summarize(simulate_coupled(lambda0, lambda, mu, horizon,
                                          derive_seed(master_seed, kCoupleStream, i)),
                         times);
    });

    std::vector<CheckLine> lines;
    const auto dominance_fail = std::count_if(summaries.begin(), summaries.end(),
                                              [](const RunSummary& s) { return !s.dominance_ok; });
    lines.push_back({"dominance", horizon, static_cast<double>(dominance_fail), 0.0, dominance_fail == 0});
    const auto zero_fail = std::count_if(summaries.begin(), summaries.end(),
                                         [](const RunSummary& s) { return !s.zero_hit_ok; });
    lines.push_back({"zero_hit", horizon, static_cast<double>(zero_fail), 0.0, zero_fail == 0});

    const double lambda_lo = std::min(lambda0, lambda);
    const double lambda_hi = std::max(lambda0, lambda);
    const std::uint64_t independent_seed = splitmix64(master_seed ^ kCoupleStream);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        std::vector<std::uint64_t> lo, hi;
        lo.reserve(runs);
        hi.reserve(runs);
        for (const auto& s : summaries) {
            lo.push_back(s.lo_states[k]);
            hi.push_back(s.hi_states[k]);
        }
        const auto ref_lo = sample_states_at(validate_spec(lambda_lo, mu, lambda, mu), t, runs,
                                             independent_seed, workers);
        const auto ref_hi = sample_states_at(validate_spec(lambda_hi, mu, lambda, mu), t, runs,
                                             splitmix64(independent_seed), workers);
        const auto chi_lo = chi_square_homogeneity(lo, ref_lo);
        const auto chi_hi = chi_square_homogeneity(hi, ref_hi);
        lines.push_back({"chi2_lo", t, chi_lo.p_value, kChiSquareLevel, chi_lo.p_value >= kChiSquareLevel});
        lines.push_back({"chi2_hi", t, chi_hi.p_value, kChiSquareLevel, chi_hi.p_value >= kChiSquareLevel});
    }

    // Markov step of the coupling bound: P(T > t) <= G(lambda_m, lambda, alpha) e^{-alpha t}.
    const auto cert = best_rate(lambda0, lambda, mu);
    const double alpha = cert.case_label == CaseLabel::Truncation
                             ? rate_case2(lambda0, lambda, mu).alpha
                             : cert.alpha;
    const double g = mgf_tau0_stationary(lambda_hi, lambda, mu, alpha);
    const double n = static_cast<double>(runs);
    for (double t : times) {
        const auto late = std::count_if(summaries.begin(), summaries.end(),
                                        [t](const RunSummary& s) { return s.coupling_time > t; });
        const double p = static_cast<double>(late) / n;
        const double sigma = std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
        const double bound = g * std::exp(-alpha * t);
        lines.push_back({"markov_tail", t, p, bound + 3.0 * sigma, p <= bound + 3.0 * sigma});
    }
    return lines;
}

}  // namespace mm1
