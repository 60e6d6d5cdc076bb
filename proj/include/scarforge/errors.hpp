#pragma once

#include <stdexcept>
#include <string>

namespace scarforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class UnsupportedOrder : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class ValidityError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Propagated state reached the top quarter of the Fock basis.
class EhrenfestOverflow : public Error {
public:
    EhrenfestOverflow(const std::string& what, double max_admissible_t)
        : Error(what), max_admissible_t_(max_admissible_t) {}
    double max_admissible_t() const { return max_admissible_t_; }

private:
    double max_admissible_t_;
};

class ResolutionError : public Error {
public:
    ResolutionError(const std::string& what, long required_size)
        : Error(what), required_size_(required_size) {}
    long required_size() const { return required_size_; }

private:
    long required_size_;
};

}  // namespace scarforge
