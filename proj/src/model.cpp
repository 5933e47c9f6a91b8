#include "mm1/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mm1/errors.hpp"

namespace mm1 {

namespace {

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        std::ostringstream os;
        os << "invalid parameter: " << name << " = " << value << " must be a positive finite rate";
        throw InvalidParameter(os.str());
    }
}

}  // namespace

QueueParams validate_params(double lambda, double mu, const char* name_lambda, const char* name_mu) {
    require_positive(lambda, name_lambda);
    require_positive(mu, name_mu);
    if (lambda >= mu) {
        std::ostringstream os;
        os << "instability: " << name_lambda << " (" << lambda << ") >= " << name_mu << " (" << mu
           << ")";
        throw InstabilityError(os.str());
    }
    return QueueParams{lambda, mu};
}

PerturbationSpec validate_spec(double lambda0, double mu0, double lambda, double mu) {
    PerturbationSpec spec;
    spec.initial = validate_params(lambda0, mu0, "lambda0", "mu0");
    spec.operating = validate_params(lambda, mu, "lambda", "mu");
    return spec;
}

double stationary_pmf(const QueueParams& params, std::uint64_t x) {
    const double rho = params.rho();
    return (1.0 - rho) * std::pow(rho, static_cast<double>(x));
}

double stationary_cdf(const QueueParams& params, std::uint64_t x) {
    return 1.0 - std::pow(params.rho(), static_cast<double>(x) + 1.0);
}

double stationary_workload_atom(const QueueParams& params) { return 1.0 - params.rho(); }

std::uint64_t sample_stationary(const QueueParams& params, double u) {
    const double rho = params.rho();
    // Closed-form guess, then repaired against the CDF so the partition of [0,1) is exact.
    const double guess = std::floor(std::log1p(-u) / std::log(rho));
    std::uint64_t x = 0;
    if (guess > 0.0) {
        x = guess > 1e18 ? std::uint64_t{1000000000000000000ULL} : static_cast<std::uint64_t>(guess);
    }
    while (stationary_cdf(params, x) <= u) ++x;
    while (x > 0 && stationary_cdf(params, x - 1) > u) --x;
    return x;
}

std::uint64_t geometric_truncation_point(double rho, double tol) {
    if (rho <= 0.0) return 0;
    const double n = std::ceil(std::log(tol) / std::log(rho));
    std::uint64_t x = n > 1.0 ? static_cast<std::uint64_t>(n) - 1 : 0;
    while (std::pow(rho, static_cast<double>(x) + 1.0) >= tol) ++x;
    return x;
}

double tv_between_stationaries(const QueueParams& p0, const QueueParams& p1) {
    if (p0.rho() == p1.rho()) return 0.0;
    // Beyond N the remaining |p - q| mass is at most rho0^{N+1} + rho1^{N+1}.
    const double tol = 1e-12;
    const std::uint64_t n =
        std::max(geometric_truncation_point(p0.rho(), tol / 2), geometric_truncation_point(p1.rho(), tol / 2));
    double sum = 0.0;
    for (std::uint64_t x = 0; x <= n; ++x) {
        sum += std::abs(stationary_pmf(p0, x) - stationary_pmf(p1, x));
    }
    return 0.5 * sum;
}

}  // namespace mm1
