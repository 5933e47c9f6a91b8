#pragma once

#include <stdexcept>
#include <string>

namespace mm1 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate is nonpositive or non-finite.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// lambda >= mu for either the initial or the operating queue.
class InstabilityError : public Error {
public:
    using Error::Error;
};

/// alpha lies outside the closed MGF domain [.., (sqrt(mu) - sqrt(lambda))^2].
class DomainError : public Error {
public:
    using Error::Error;
};

/// The stationary mixture sum over initial states diverges: (lambda_m / mu) G >= 1.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double product) : Error(what), product_(product) {}
    double product() const noexcept { return product_; }

private:
    double product_;
};

/// A function was called outside the regime it addresses (e.g. Case 1 with lambda0 > lambda).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace mm1
