#pragma once

#include <stdexcept>
#include <string>

namespace bmx {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix inversion requested for a matrix whose determinant is below the
/// scale-aware singularity threshold.
class SingularMatrix : public Error {
public:
  explicit SingularMatrix(const std::string& what) : Error(what) {}
};

class IndexOutOfRange : public Error {
public:
  explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

/// Frame determinant vanished (or overflowed) at the requested point.
class DegenerateFrame : public Error {
public:
  explicit DegenerateFrame(const std::string& what) : Error(what) {}
};

/// Spatial metric eta_ab lost positivity (det <= 0) at the sampled time.
class NonRiemannianEta : public Error {
public:
  explicit NonRiemannianEta(const std::string& what) : Error(what) {}
};

/// Adaptive step control drove the step size below the hard floor.
class StepUnderflow : public Error {
public:
  explicit StepUnderflow(const std::string& what) : Error(what) {}
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureFailure : public Error {
public:
  explicit QuadratureFailure(const std::string& what) : Error(what) {}
};

/// Catalog formula left its validity region: negative radicand or a
/// denominator within the near-zero guard band.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// Malformed or semantically invalid configuration.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Initial data violates the constraint equations of the active group.
class ConstraintViolation : public Error {
public:
  explicit ConstraintViolation(const std::string& what) : Error(what) {}
};

}  // namespace bmx
