#include "mm1/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mm1/errors.hpp"
#include "mm1/mgf.hpp"

namespace mm1 {

namespace {

PerturbationSpec common_mu_spec(double lambda0, double lambda, double mu) {
    return validate_spec(lambda0, mu, lambda, mu);
}

BoundCertificate make_certificate(double lambda0, double lambda, double mu, CaseLabel label) {
    BoundCertificate cert;
    cert.case_label = label;
    cert.spec = common_mu_spec(lambda0, lambda, mu);
    cert.normalized = RateProblem{lambda0, lambda, mu};
    return cert;
}

void require_above_threshold(double lambda0, double lambda, double mu, const char* who) {
    if (!(lambda0 > std::sqrt(lambda * mu))) {
        std::ostringstream os;
        os << who << " requires lambda0 > sqrt(lambda mu); got lambda0 = " << lambda0
           << ", sqrt(lambda mu) = " << std::sqrt(lambda * mu);
        throw PreconditionError(os.str());
    }
}

double resolve_margin(std::optional<double> margin, double boundary) {
    const double eps = margin.value_or(kDefaultMarginFraction * boundary);
    if (!(eps > 0.0) || !(eps < boundary)) {
        std::ostringstream os;
        os << "epsilon_margin = " << eps << " must lie in (0, " << boundary
           << ") so that the backed-off rate stays positive";
        throw PreconditionError(os.str());
    }
    return eps;
}

}  // namespace

std::string_view to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::Case1: return "CASE1";
        case CaseLabel::Case2BelowThreshold: return "CASE2_BELOW_THRESHOLD";
        case CaseLabel::Case2AboveThreshold: return "CASE2_ABOVE_THRESHOLD";
        case CaseLabel::Truncation: return "TRUNCATION";
        case CaseLabel::Drift: return "DRIFT";
        case CaseLabel::Unperturbed: return "UNPERTURBED";
    }
    return "UNKNOWN";
}

double alpha_star(double lambda, double mu) {
    const double d = std::sqrt(mu) - std::sqrt(lambda);
    return d * d;
}

double case2_boundary_rate(double lambda0, double lambda, double mu) {
    if (lambda0 <= std::sqrt(lambda * mu)) return alpha_star(lambda, mu);
    return lambda + mu - lambda0 - lambda * mu / lambda0;
}

double truncation_rate(double lambda0, double lambda, double mu) {
    if (lambda0 <= std::sqrt(lambda * mu)) return alpha_star(lambda, mu);
    return truncation_optimal_c(lambda0, lambda, mu) * alpha_star(lambda, mu);
}

double truncation_optimal_c(double lambda0, double lambda, double mu) {
    return std::log(mu / lambda0) / std::log(std::sqrt(mu / lambda));
}

double truncation_c_limit(double lambda0, double lambda, double mu) {
    return std::log(mu / lambda0) / std::log(lambda0 / std::sqrt(lambda * mu));
}

BoundCertificate rate_case1(double lambda0, double lambda, double mu) {
    auto cert = make_certificate(lambda0, lambda, mu, CaseLabel::Case1);
    if (lambda0 > lambda) {
        throw PreconditionError("Case 1 requires lambda0 <= lambda; use the Case 2 route");
    }
    cert.alpha = alpha_star(lambda, mu);
    cert.prefactor = 1.0 + std::sqrt(lambda / mu);
    return cert;
}

BoundCertificate rate_case2(double lambda0, double lambda, double mu,
                            std::optional<double> epsilon_margin) {
    auto cert = make_certificate(lambda0, lambda, mu, CaseLabel::Case2BelowThreshold);
    if (!(lambda0 > lambda)) {
        throw PreconditionError("Case 2 requires lambda0 > lambda; use the Case 1 route");
    }
    const double threshold = std::sqrt(lambda * mu);
    const double astar = alpha_star(lambda, mu);

    if (lambda0 <= threshold) {
        cert.alpha = astar;
        // At lambda0 == sqrt(lambda mu) the series ratio at alpha* is exactly 1; back off.
        if (!(lambda0 / mu * mgf_tau0_from_1(lambda, mu, astar) < 1.0)) {
            cert.epsilon_margin = resolve_margin(epsilon_margin, astar);
            cert.alpha = astar - cert.epsilon_margin;
        }
    } else {
        cert.case_label = CaseLabel::Case2AboveThreshold;
        const double boundary = case2_boundary_rate(lambda0, lambda, mu);
        cert.epsilon_margin = resolve_margin(epsilon_margin, boundary);
        cert.alpha = boundary - cert.epsilon_margin;
    }
    cert.prefactor = mgf_tau0_stationary(lambda0, lambda, mu, cert.alpha);
    return cert;
}

BoundCertificate rate_truncation(double lambda0, double lambda, double mu) {
    auto cert = make_certificate(lambda0, lambda, mu, CaseLabel::Truncation);
    require_above_threshold(lambda0, lambda, mu, "truncation bound");
    cert.alpha = truncation_rate(lambda0, lambda, mu);
    return cert;
}

BoundCertificate best_rate(double lambda0, double lambda, double mu,
                           std::optional<double> epsilon_margin) {
    common_mu_spec(lambda0, lambda, mu);
    if (lambda0 <= lambda) return rate_case1(lambda0, lambda, mu);
    if (lambda0 <= std::sqrt(lambda * mu)) return rate_case2(lambda0, lambda, mu, epsilon_margin);

    auto case2 = rate_case2(lambda0, lambda, mu, epsilon_margin);
    auto trunc = rate_truncation(lambda0, lambda, mu);
    return case2.alpha >= trunc.alpha ? case2 : trunc;
}

double truncation_bound_at(double lambda0, double lambda, double mu, double t) {
    common_mu_spec(lambda0, lambda, mu);
    require_above_threshold(lambda0, lambda, mu, "truncation bound");
    if (!(t >= 0.0)) throw PreconditionError("truncation bound requires t >= 0");

    const double astar = alpha_star(lambda, mu);
    const double abar = truncation_rate(lambda0, lambda, mu);
    const double eps = std::exp(-abar * t);
    const double n = abar * t / std::log(mu / lambda0);
    const double ratio = lambda0 / std::sqrt(lambda * mu);
    const double decay = std::exp(-astar * t);

    const double term1 = (1.0 - eps) * (1.0 + std::sqrt(lambda / mu)) * decay;
    const double term2 = eps;
    // ratio^{n+1} e^{-alpha* t} folded into one exponential to stay finite for large t.
    const double grown = std::exp((n + 1.0) * std::log(ratio) - astar * t);
    const double term3 = (1.0 - lambda0 / mu) * (grown - decay) / (ratio - 1.0);
    return term1 + term2 + term3;
}

RescaledProblem rescale_general(const PerturbationSpec& spec, std::optional<double> epsilon_margin) {
    validate_spec(spec.initial.lambda, spec.initial.mu, spec.operating.lambda, spec.operating.mu);
    RescaledProblem out;
    out.b = spec.operating.mu / spec.initial.mu;
    const double lambda_norm = spec.operating.lambda / out.b;
    out.a = lambda_norm / spec.initial.lambda;
    out.normalized.initial = spec.initial;
    out.normalized.operating = QueueParams{lambda_norm, spec.initial.mu};

    out.certificate = best_rate(spec.initial.lambda, lambda_norm, spec.initial.mu, epsilon_margin);
    out.certificate.time_scale_b = out.b;
    out.certificate.spec = spec;
    return out;
}

BoundCertificate certify(const PerturbationSpec& spec, std::optional<double> epsilon_margin) {
    if (spec.same_equilibrium()) {
        validate_spec(spec.initial.lambda, spec.initial.mu, spec.operating.lambda, spec.operating.mu);
        BoundCertificate cert;
        cert.case_label = CaseLabel::Unperturbed;
        cert.time_scale_b = spec.operating.mu / spec.initial.mu;
        const double lambda_norm = spec.operating.lambda / cert.time_scale_b;
        cert.normalized = RateProblem{spec.initial.lambda, lambda_norm, spec.initial.mu};
        cert.alpha = alpha_star(lambda_norm, spec.initial.mu);
        cert.prefactor = 0.0;
        cert.spec = spec;
        return cert;
    }
    return rescale_general(spec, epsilon_margin).certificate;
}

double evaluate_bound(const BoundCertificate& cert, double t) {
    const double scaled = cert.time_scale_b * t;
    if (cert.case_label == CaseLabel::Truncation) {
        const auto& n = cert.normalized;
        return truncation_bound_at(n.lambda0, n.lambda, n.mu, scaled);
    }
    return cert.prefactor.value() * std::exp(-cert.alpha * scaled);
}

namespace {

void running_min(std::vector<double>& values) {
    for (std::size_t i = 1; i < values.size(); ++i) values[i] = std::min(values[i], values[i - 1]);
}

void require_increasing(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
            throw PreconditionError("time grid must be nonnegative and strictly increasing");
        }
    }
}

}  // namespace

BoundCurve bound_curve(const BoundCertificate& cert, const std::vector<double>& times) {
    require_increasing(times);
    BoundCurve curve{times, {}, to_string(cert.case_label)};
    curve.values.reserve(times.size());
    for (double t : times) curve.values.push_back(evaluate_bound(cert, t));
    running_min(curve.values);
    return curve;
}

BoundCurve truncation_curve(const RateProblem& problem, double time_scale_b,
                            const std::vector<double>& times) {
    require_increasing(times);
    BoundCurve curve{times, {}, "TRUNCATION"};
    curve.values.reserve(times.size());
    for (double t : times) {
        curve.values.push_back(
            truncation_bound_at(problem.lambda0, problem.lambda, problem.mu, time_scale_b * t));
    }
    running_min(curve.values);
    return curve;
}

double drift_rate(double lambda, double mu, double z) { return lambda + mu - lambda * z - mu / z; }

DriftSolution drift_optimal_exponential(double lambda, double mu) {
    validate_params(lambda, mu);
    DriftSolution sol;
    sol.z_star = std::sqrt(mu / lambda);
    sol.c_star = alpha_star(lambda, mu);
    // Smallest b with lambda (z - 1) <= -c + b at x = 0.
    sol.b_star = lambda * (sol.z_star - 1.0) + sol.c_star;
    return sol;
}

BoundCertificate rate_drift(double lambda0, double lambda, double mu) {
    auto cert = make_certificate(lambda0, lambda, mu, CaseLabel::Drift);
    if (lambda0 > lambda) {
        throw PreconditionError("the drift route needs lambda_m = lambda, i.e. lambda0 <= lambda");
    }
    const auto drift = drift_optimal_exponential(lambda, mu);
    cert.alpha = drift.c_star;
    cert.prefactor = mgf_tau0_stationary(lambda, lambda, mu, drift.c_star);
    return cert;
}

}  // namespace mm1
