#pragma once

namespace igpr {

/// Numeric tolerances shared by the solvers, the attribution code and the CLI.
struct Tolerances {
  /// Relative jitter (times mean diagonal) used for the first Cholesky retry.
  double solver_jitter = 1e-10;
  /// Below this value of the path quadratic form the closed forms are 0/0.
  double singular_threshold = 1e-12;
  /// Step for finite-difference checks.
  double fd_step = 1e-5;

  /// Throws DomainError unless every field is strictly positive and finite.
  void validate() const;
};

// Error function family, evaluated with W. J. Cody's rational Chebyshev
// approximations. All three throw DomainError on non-finite input.
double erf(double z);
double erfc(double z);
/// Scaled complementary error function exp(z^2) * erfc(z).
double erfcx(double z);

}  // namespace igpr
