#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace edcast {

/// Base of every error the library throws. `kind()` is a stable tag used in
/// structured error reports emitted by the CLI.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// A caller broke a documented precondition (bad lengths, bad schema, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "contract_violation"; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse_error"; }

private:
    std::size_t line_;
};

class DataQualityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data_quality"; }
};

class InsufficientData : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "insufficient_data"; }
};

class CoverageError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "coverage"; }
};

class ZeroDenominator : public Error {
public:
    explicit ZeroDenominator(std::size_t index)
        : Error("actual value is zero at index " + std::to_string(index)), index_(index) {}
    std::size_t index() const noexcept { return index_; }
    const char* kind() const noexcept override { return "zero_denominator"; }

private:
    std::size_t index_;
};

/// Model fitting failed. Optimizer-driven fits attach the best parameters seen.
class FitFailure : public Error {
public:
    explicit FitFailure(const std::string& what, std::vector<double> best_so_far = {})
        : Error(what), best_so_far_(std::move(best_so_far)) {}
    const std::vector<double>& best_so_far() const noexcept { return best_so_far_; }
    const char* kind() const noexcept override { return "fit_failure"; }

private:
    std::vector<double> best_so_far_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double gap) : Error(what), gap_(gap) {}
    double gap() const noexcept { return gap_; }
    const char* kind() const noexcept override { return "convergence"; }

private:
    double gap_;
};

class SpecRejected : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "spec_rejected"; }
};

/// An experiment configuration or command line is invalid.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

} // namespace edcast
