#pragma once

#include <stdexcept>
#include <string>

namespace dasg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid kernel, grid or bound parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Dimension or tensor-shape mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (e.g. a multi-index not in W).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Special-function evaluation overflowed or failed to converge.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Problem too large for a size-capped routine.
class SizeGuard : public Error {
public:
    using Error::Error;
};

/// A Gram matrix lost positive definiteness in double precision.
///
/// `dim` and `level` identify the offending 1D factor; both are -1 when the
/// failure came from a dense d-dimensional Gram matrix.
class PDFailure : public Error {
public:
    PDFailure(int dim, int level, const std::string& what)
        : Error(what), dim_(dim), level_(level) {}

    int dim() const noexcept { return dim_; }
    int level() const noexcept { return level_; }

private:
    int dim_;
    int level_;
};

}  // namespace dasg
