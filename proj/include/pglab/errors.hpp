#pragma once

#include <stdexcept>
#include <string>

namespace pglab {

// Caller broke a documented precondition (length mismatch, bad index, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Projection reference (or gain denominator) has a norm below the floor.
class DegenerateReferenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DivisionByZeroError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnsupportedKindError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// KDE asked to pick a bandwidth for data with zero spread.
class DegenerateBandwidthError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Configuration value out of range; key() names the offending field.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace pglab

namespace pglab {

// A sampling trajectory produced a non-finite state.
class SamplingError : public std::runtime_error {
public:
    SamplingError(int step, double sigma, const std::string& what)
        : std::runtime_error(what), step_(step), sigma_(sigma) {}
    int step() const noexcept { return step_; }
    double sigma() const noexcept { return sigma_; }

private:
    int step_;
    double sigma_;
};

}  // namespace pglab
