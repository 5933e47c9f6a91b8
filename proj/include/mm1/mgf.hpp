#pragma once

#include <cstdint>

namespace mm1 {

/// Admissible alpha for hitting-time MGFs of the M/M/1 queue length.
struct MgfDomain {
    /// (sqrt(mu) - sqrt(lambda))^2, inclusive right endpoint for G(1, lambda, alpha).
    double alpha_max = 0.0;
    /// Supremum of alpha with (lambda_m / mu) G(1, lambda, alpha) < 1. +inf when the
    /// condition holds on the whole [0, alpha_max] (lambda_m < sqrt(lambda mu)).
    double stationary_alpha_sup = 0.0;
};

/// Domain for the operating queue (lambda, mu); `lambda_m` defaults to lambda.
MgfDomain mgf_domain(double lambda, double mu, double lambda_m = 0.0);

/// E[exp(alpha tau_0)] started from one customer.
///
/// Closed form (1/2lambda)(lambda + mu - alpha - sqrt((lambda + mu - alpha)^2 - 4 lambda mu))
/// evaluated in the rationalized form 2mu / (s + sqrt(D)) with
/// D = (alpha_max - alpha)((sqrt(mu) + sqrt(lambda))^2 - alpha). Negative alpha is allowed
/// (Laplace transform side); alpha = 0 returns exactly 1.
double mgf_tau0_from_1(double lambda, double mu, double alpha);

/// G(1, lambda, alpha)^x: incremental hitting times are i.i.d.
double mgf_tau0_from_x(double lambda, double mu, double alpha, std::uint64_t x);

/// MGF of tau_0 with X_0 ~ geometric(lambda_m / mu):
/// (1 - lambda_m/mu) / (1 - (lambda_m/mu) G(1, lambda, alpha)).
/// Throws DivergenceError (carrying the product) when the geometric series diverges.
double mgf_tau0_stationary(double lambda_m, double lambda, double mu, double alpha);

/// 1 / (mu - lambda)
double mean_tau0_from_1(double lambda, double mu);

}  // namespace mm1
