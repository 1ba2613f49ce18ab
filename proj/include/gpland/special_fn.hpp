#pragma once

namespace gpland::special {

// ln Gamma(z) for z > 0. Throws DomainError otherwise.
double gamma_ln(double z);

// Modified Bessel function of the second kind K_nu(x) for arbitrary real
// order. K is even in nu, so the order is normalized to |nu|. Throws
// DomainError for x <= 0 or non-finite arguments, and NumericalError when
// the value exceeds double range (tiny x with large nu); callers that live
// in that regime should use bessel_k_ln instead. Extreme large-x arguments
// may underflow to zero; again, the log form is the safe path.
double bessel_k(double nu, double x);

// ln K_nu(x). This is the form the Matern kernel consumes, so magnitudes
// far outside double range never materialize.
double bessel_k_ln(double nu, double x);

// Central finite-difference estimate of d/dnu K_nu(x):
// (K_{nu+h} - K_{nu-h}) / 2h. h <= 0 selects the default step. Evenness in
// nu covers nu - h < 0, which also makes the estimate vanish exactly at
// nu = 0.
double bessel_k_dnu(double nu, double x, double h = 0.0);

// Default step: max(1e-6, 1e-8 * nu), balancing truncation against
// roundoff at double precision.
double bessel_k_dnu_default_step(double nu);

}  // namespace gpland::special
