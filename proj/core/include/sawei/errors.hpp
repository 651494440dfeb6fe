#pragma once

#include <stdexcept>
#include <string>

namespace sawei {

// Cholesky failed even at the largest jitter while fitting a surrogate.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A kernel matrix was not positive definite for the requested hyperparameters.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. log of < 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnknownFunction : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyTable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Curves that should share a step grid have different lengths.
class GridMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingManifest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sawei
