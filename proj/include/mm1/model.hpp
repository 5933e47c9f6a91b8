#pragma once

#include <cstdint>

namespace mm1 {

/// Arrival and service rates of a stable M/M/1 queue.
struct QueueParams {
    double lambda = 0.0;
    double mu = 0.0;

    double rho() const noexcept { return lambda / mu; }
};

/// Initial-equilibrium parameters (lambda0, mu0) and operating parameters (lambda, mu).
struct PerturbationSpec {
    QueueParams initial;
    QueueParams operating;

    /// Identical parameter settings: the process is always in equilibrium.
    bool unperturbed() const noexcept {
        return initial.lambda == operating.lambda && initial.mu == operating.mu;
    }
    /// Same traffic intensity, so the two stationary laws coincide even if the rates differ.
    bool same_equilibrium() const noexcept {
        return initial.lambda * operating.mu == operating.lambda * initial.mu;
    }
};

/// Throws InvalidParameter / InstabilityError naming `name_lambda` or `name_mu`.
QueueParams validate_params(double lambda, double mu, const char* name_lambda = "lambda",
                            const char* name_mu = "mu");

PerturbationSpec validate_spec(double lambda0, double mu0, double lambda, double mu);

/// (1 - rho) rho^x
double stationary_pmf(const QueueParams& params, std::uint64_t x);

/// P(X <= x) = 1 - rho^{x+1}
double stationary_cdf(const QueueParams& params, std::uint64_t x);

/// Mass of the workload stationary law at 0, which equals P(X = 0).
double stationary_workload_atom(const QueueParams& params);

/// Smallest x with P(X <= x) > u. Nondecreasing in u and in rho for fixed u.
std::uint64_t sample_stationary(const QueueParams& params, double u);

/// Exact total-variation distance between the two geometric stationary laws.
double tv_between_stationaries(const QueueParams& p0, const QueueParams& p1);

/// Smallest N with rho^{N+1} < tol, i.e. the geometric tail beyond N falls below tol.
std::uint64_t geometric_truncation_point(double rho, double tol);

}  // namespace mm1
