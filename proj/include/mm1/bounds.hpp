#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mm1/model.hpp"

namespace mm1 {

enum class CaseLabel {
    Case1,
    Case2BelowThreshold,
    Case2AboveThreshold,
    Truncation,
    Drift,
    Unperturbed,
};

std::string_view to_string(CaseLabel label);

/// Fractional epsilon margin applied when no explicit margin is supplied.
inline constexpr double kDefaultMarginFraction = 0.01;

/// Rate problem with a common service rate: initial arrival rate lambda0, operating (lambda, mu).
struct RateProblem {
    double lambda0 = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
};

/// A certified bound ||L(X_t) - pi||_TV <= C exp(-alpha b t).
///
/// For Truncation certificates `prefactor` is empty; evaluate through truncation_bound_at
/// (evaluate_bound does the routing).
struct BoundCertificate {
    double alpha = 0.0;
    std::optional<double> prefactor;
    double time_scale_b = 1.0;
    CaseLabel case_label = CaseLabel::Case1;
    double epsilon_margin = 0.0;
    PerturbationSpec spec;  ///< original parameters
    RateProblem normalized;  ///< the common-mu problem the rate formulas were applied to
};

/// (sqrt(mu) - sqrt(lambda))^2
double alpha_star(double lambda, double mu);

/// Piecewise Case 2 supremum rate f(lambda0): alpha* below sqrt(lambda mu),
/// lambda + mu - lambda0 - lambda mu / lambda0 above.
double case2_boundary_rate(double lambda0, double lambda, double mu);

/// Piecewise truncation rate g(lambda0): alpha* below sqrt(lambda mu), the log-ratio rate above.
double truncation_rate(double lambda0, double lambda, double mu);

/// Optimal truncation exponent c = log(mu/lambda0) / log sqrt(mu/lambda).
double truncation_optimal_c(double lambda0, double lambda, double mu);
/// Admissibility limit log(mu/lambda0) / log(lambda0 / sqrt(lambda mu)) that c must stay below.
double truncation_c_limit(double lambda0, double lambda, double mu);

BoundCertificate rate_case1(double lambda0, double lambda, double mu);

/// Case 2 certificate. `epsilon_margin` defaults to kDefaultMarginFraction of the boundary rate and
/// is only consumed when the boundary is binding.
BoundCertificate rate_case2(double lambda0, double lambda, double mu,
                            std::optional<double> epsilon_margin = std::nullopt);

BoundCertificate rate_truncation(double lambda0, double lambda, double mu);

/// Best known certificate: Case 1 for lambda0 <= lambda, Case 2 below the threshold, and the
/// larger of the backed-off Case 2 rate and truncation above it.
BoundCertificate best_rate(double lambda0, double lambda, double mu,
                           std::optional<double> epsilon_margin = std::nullopt);

/// Three-term truncation bound with epsilon = exp(-alpha_bar t) and real-valued N.
double truncation_bound_at(double lambda0, double lambda, double mu, double t);

struct RescaledProblem {
    double b = 1.0;
    double a = 1.0;
    PerturbationSpec normalized;  ///< initial (lambda0, mu0), operating (a lambda0, mu0)
    BoundCertificate certificate;
};

/// Maps a general (lambda0, mu0) -> (lambda, mu) perturbation to a common-mu problem in time
/// rescaled by b = mu / mu0.
RescaledProblem rescale_general(const PerturbationSpec& spec,
                                std::optional<double> epsilon_margin = std::nullopt);

/// Certificate for an arbitrary spec; Unperturbed (C = 0) when the equilibria coincide.
BoundCertificate certify(const PerturbationSpec& spec,
                         std::optional<double> epsilon_margin = std::nullopt);

/// Bound value at time t (original time units).
double evaluate_bound(const BoundCertificate& cert, double t);

struct BoundCurve {
    std::vector<double> times;
    std::vector<double> values;
    std::string_view source;
};

/// Evaluates `cert` on a strictly increasing grid. Values are a running minimum, which remains
/// a valid bound because the TV distance to equilibrium is nonincreasing in t.
BoundCurve bound_curve(const BoundCertificate& cert, const std::vector<double>& times);

/// Truncation bound on a grid (running minimum), in original time for a rescaled problem.
BoundCurve truncation_curve(const RateProblem& problem, double time_scale_b,
                            const std::vector<double>& times);

/// Exponential Lyapunov function V(x) = z^x on the birth-death generator.
struct DriftSolution {
    double z_star = 0.0;
    double c_star = 0.0;
    double b_star = 0.0;
};

/// Drift rate c(z) = lambda + mu - lambda z - mu / z for V(x) = z^x, x >= 1.
double drift_rate(double lambda, double mu, double z);

DriftSolution drift_optimal_exponential(double lambda, double mu);

/// Certificate from the drift condition: rate c*, prefactor G(lambda, lambda, c*).
/// Requires lambda0 <= lambda.
BoundCertificate rate_drift(double lambda0, double lambda, double mu);

}  // namespace mm1
