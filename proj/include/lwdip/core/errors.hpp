#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lwdip {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation too close to a point source or a coincident pair of points.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to converge; carries the last residual.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Quadrature or eigen-solver failure; carries the achieved tolerance when known.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double achieved = 0.0) : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// A trajectory was queried outside its retained (or already computed) time range.
class HistoryError : public Error {
public:
    using Error::Error;
};

/// A charge exceeded the configured speed limit.
class VelocityLimitError : public Error {
public:
    VelocityLimitError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Any other failure raised while advancing a simulation, tagged with the step.
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Evaluation on (or numerically at) a resonance pole.
class PoleError : public Error {
public:
    PoleError(const std::string& what, double denominator) : Error(what), denominator_(denominator) {}
    double denominator() const noexcept { return denominator_; }

private:
    double denominator_;
};

/// Input that makes a derived quantity undefined (e.g. normalising an all-zero series).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

} // namespace lwdip
