// errors.hpp
#pragma once
#include <stdexcept>
#include <string>

namespace cbl {

// Caller supplied something outside an operation's preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested configuration is well formed but not supported (e.g. a
// noiseless likelihood for the conjugate update).
class Unsupported : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Observed data has zero probability under the model.
class ImpossibleObservation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Factorization or quadrature failed to deliver the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A property that holds by construction was found broken. Always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace cbl
