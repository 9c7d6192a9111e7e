#pragma once

#include <stdexcept>
#include <string>

namespace frbs {

/// Linear system could not be solved to the required accuracy (lambda = 0
/// with a rank-deficient Gram matrix). Carries a condition estimate.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition(condition_estimate) {}
    double condition;
};

/// Not enough data left to run an estimator (e.g. no surviving LRV blocks).
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every (lambda, tau) configuration failed during cross-validation.
class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace frbs
