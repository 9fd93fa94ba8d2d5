#pragma once

#include <stdexcept>
#include <string>

namespace tps {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Gram matrix of a generator set is numerically singular.
class SingularGramError : public Error {
public:
    explicit SingularGramError(const std::string& what) : Error(what) {}
};

/// A test function is not smooth enough for the requested adjoint operator.
class InsufficientSmoothnessError : public Error {
public:
    explicit InsufficientSmoothnessError(const std::string& what) : Error(what) {}
};

/// Requested derivative order would hit the Dirac part of a spline.
class OrderTooHighError : public Error {
public:
    explicit OrderTooHighError(const std::string& what) : Error(what) {}
};

/// A measurement setup violates one of the well-posedness assumptions.
class AssumptionError : public Error {
public:
    explicit AssumptionError(const std::string& what) : Error(what) {}
};

/// Null-space block of the dictionary lost rank.
class RankDeficientNullBlockError : public AssumptionError {
public:
    explicit RankDeficientNullBlockError(const std::string& what) : AssumptionError(what) {}
};

/// Iterative solver hit its iteration cap before reaching the gap tolerance.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(long iterations, double gap)
        : Error("solver did not converge after " + std::to_string(iterations) +
                " iterations (duality gap " + std::to_string(gap) + ")"),
          iterations(iterations),
          gap(gap) {}
    long iterations;
    double gap;
};

/// Support reduction could not find a null direction where one must exist.
class NumericalStallError : public Error {
public:
    explicit NumericalStallError(const std::string& what) : Error(what) {}
};

/// Problem size exceeds the limits of an exhaustive routine.
class TooLargeError : public Error {
public:
    explicit TooLargeError(const std::string& what) : Error(what) {}
};

/// Malformed problem/result document.
class DocumentError : public Error {
public:
    explicit DocumentError(const std::string& what) : Error(what) {}
};

}  // namespace tps
