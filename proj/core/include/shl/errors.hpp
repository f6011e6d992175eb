#pragma once

#include <stdexcept>
#include <string>

namespace shl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SHL_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

/// Parameters outside the domain where the requested quantity exists.
SHL_DEFINE_ERROR(DomainError);
/// Hardy coefficient above (n-2)^2/4; the weight exponent is complex.
SHL_DEFINE_ERROR(AdmissibilityError);
/// Degenerate input to a fit or optimization (too few samples, nonpositive data).
SHL_DEFINE_ERROR(DegenerateError);
/// A steady-state profile crossed zero during integration.
SHL_DEFINE_ERROR(BlowdownError);
/// Evaluation point outside a tabulated range.
SHL_DEFINE_ERROR(RangeError);
/// Singular or non-finite linear system.
SHL_DEFINE_ERROR(SolveError);
/// A field or integrand became non-finite (or non-integrable on the grid).
SHL_DEFINE_ERROR(NonFiniteError);
/// Angular quadrature failed its node-doubling self-consistency check.
SHL_DEFINE_ERROR(QuadratureError);
/// Dense oracle could not be symmetrized / diagonalized.
SHL_DEFINE_ERROR(EigenError);
/// The nonlinear flow left the order interval [0, v_inf].
SHL_DEFINE_ERROR(ComparisonViolation);
/// A parabolic-ball split fell outside the computational grid.
SHL_DEFINE_ERROR(EmptyRegionError);
/// Quotient with a zero denominator and a nonzero numerator.
SHL_DEFINE_ERROR(DivisionError);
/// Invalid configuration file or command-line input.
SHL_DEFINE_ERROR(ConfigError);

#undef SHL_DEFINE_ERROR

}  // namespace shl
