#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace faa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed an invalid parameter (k out of range, shape mismatch, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input data is unusable (non-finite values, too few points, misaligned ids).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a valid result.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IterationLimitError : public NumericalError {
public:
    IterationLimitError(const std::string& what, Eigen::VectorXd best)
        : NumericalError(what), best_(std::move(best)) {}

    /// Last feasible iterate reached before the limit.
    const Eigen::VectorXd& best() const { return best_; }

private:
    Eigen::VectorXd best_;
};

class NotPositiveDefiniteError : public NumericalError {
public:
    NotPositiveDefiniteError(const std::string& what, Eigen::Index index)
        : NumericalError(what), index_(index) {}

    Eigen::Index index() const { return index_; }

private:
    Eigen::Index index_;
};

/// Evaluation point outside the basis domain.
class DomainError : public DataError {
public:
    using DataError::DataError;
};

class UnderdeterminedFitError : public DataError {
public:
    using DataError::DataError;
};

class DegenerateVarianceError : public DataError {
public:
    DegenerateVarianceError(const std::string& what, double t) : DataError(what), t_(t) {}
    double where() const { return t_; }

private:
    double t_;
};

class AlignmentError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace faa
