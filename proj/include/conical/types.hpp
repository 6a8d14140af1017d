#pragma once
// Shared value types and the error taxonomy used across the library.

#include <complex>
#include <stdexcept>
#include <string>

namespace conical {

using ComplexValue = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Error taxonomy.  Every failure a public operation can signal is a named
// exception type; the CLI serializes the name on the error stream.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define CONICAL_DEFINE_ERROR(NAME)                                 \
  class NAME : public Error {                                      \
   public:                                                         \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

CONICAL_DEFINE_ERROR(PoleOfGamma);
CONICAL_DEFINE_ERROR(OutsideConvergenceDisk);
CONICAL_DEFINE_ERROR(NonConvergence);
CONICAL_DEFINE_ERROR(SingularityTooStrong);
CONICAL_DEFINE_ERROR(NonDecayingIntegrand);
CONICAL_DEFINE_ERROR(RegionViolation);
CONICAL_DEFINE_ERROR(PoleHit);
CONICAL_DEFINE_ERROR(RecurrencePole);
CONICAL_DEFINE_ERROR(UnsupportedOrder);
CONICAL_DEFINE_ERROR(HalfIntegerOrder);
CONICAL_DEFINE_ERROR(TruncationWarning);
CONICAL_DEFINE_ERROR(BandViolation);
CONICAL_DEFINE_ERROR(TailTooLarge);
CONICAL_DEFINE_ERROR(NotDominant);
CONICAL_DEFINE_ERROR(ZeroFrequency);
CONICAL_DEFINE_ERROR(NonConvergentWeighted);
CONICAL_DEFINE_ERROR(UnsupportedWeight);
CONICAL_DEFINE_ERROR(UsageError);

#undef CONICAL_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Quadrature plumbing.
// ---------------------------------------------------------------------------

struct QuadSettings {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;
  int periodic_points = 32;   // starting node count for periodic rule
  double epsilon_shift = 0.0; // the small regulator used by Q-side integrals

  void validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0))
      throw UsageError("QuadSettings: tolerances must be positive");
    if (periodic_points < 16 || periodic_points % 2 != 0)
      throw UsageError("QuadSettings: periodic_points must be even and >= 16");
    if (epsilon_shift < 0)
      throw UsageError("QuadSettings: epsilon_shift must be >= 0");
  }
};

struct QuadResult {
  ComplexValue value{0.0, 0.0};
  double err_estimate = 0.0;
  bool converged = false;
};

// ---------------------------------------------------------------------------
// Parameter triple for one conical-function evaluation.
// Order mu = -1/2 - K, degree nu = -1/2 + i*tau.
// ---------------------------------------------------------------------------

struct ConicalPoint {
  double K = 0.0;
  ComplexValue tau{0.0, 0.0};
  double chi = 1.0;

  double mu() const noexcept { return -0.5 - K; }
  ComplexValue nu() const noexcept {
    return ComplexValue(-0.5 - tau.imag(), tau.real());
  }
  void validate() const {
    if (!(chi > 0)) throw UsageError("ConicalPoint: chi must be > 0");
  }
};

}  // namespace conical
