#include "mm1/mgf.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mm1/errors.hpp"
#include "mm1/model.hpp"

namespace mm1 {

namespace {

double alpha_star(double lambda, double mu) {
    const double d = std::sqrt(mu) - std::sqrt(lambda);
    return d * d;
}

void require_alpha_in_domain(double lambda, double mu, double alpha) {
    if (!std::isfinite(alpha) || alpha > alpha_star(lambda, mu)) {
        std::ostringstream os;
        os << "alpha = " << alpha << " outside the MGF domain (alpha_max = " << alpha_star(lambda, mu)
           << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

MgfDomain mgf_domain(double lambda, double mu, double lambda_m) {
    validate_params(lambda, mu);
    if (lambda_m == 0.0) lambda_m = lambda;
    validate_params(lambda_m, mu, "lambda_m", "mu");

    MgfDomain domain;
    domain.alpha_max = alpha_star(lambda, mu);
    if (lambda_m <= std::sqrt(lambda * mu)) {
        domain.stationary_alpha_sup = std::numeric_limits<double>::infinity();
    } else {
        domain.stationary_alpha_sup = lambda + mu - lambda_m - lambda * mu / lambda_m;
    }
    return domain;
}

double mgf_tau0_from_1(double lambda, double mu, double alpha) {
    validate_params(lambda, mu);
    require_alpha_in_domain(lambda, mu, alpha);
    if (alpha == 0.0) return 1.0;

    const double amax = alpha_star(lambda, mu);
    const double sum_sq = std::sqrt(mu) + std::sqrt(lambda);
    double disc = (amax - alpha) * (sum_sq * sum_sq - alpha);
    if (disc < 0.0 && disc > -1e-12) disc = 0.0;
    const double s = lambda + mu - alpha;
    return 2.0 * mu / (s + std::sqrt(disc));
}

double mgf_tau0_from_x(double lambda, double mu, double alpha, std::uint64_t x) {
    const double g = mgf_tau0_from_1(lambda, mu, alpha);
    if (x == 0) return 1.0;
    return std::pow(g, static_cast<double>(x));
}

double mgf_tau0_stationary(double lambda_m, double lambda, double mu, double alpha) {
    validate_params(lambda_m, mu, "lambda_m", "mu");
    const double g = mgf_tau0_from_1(lambda, mu, alpha);
    const double ratio = lambda_m / mu;
    const double product = ratio * g;
    if (!(product < 1.0)) {
        std::ostringstream os;
        os << "stationary MGF diverges: (lambda_m/mu) G(1, lambda, alpha) = " << product
           << " >= 1 at alpha = " << alpha;
        throw DivergenceError(os.str(), product);
    }
    if (alpha == 0.0) return 1.0;
    return (1.0 - ratio) / (1.0 - product);
}

double mean_tau0_from_1(double lambda, double mu) {
    validate_params(lambda, mu);
    return 1.0 / (mu - lambda);
}

}  // namespace mm1
