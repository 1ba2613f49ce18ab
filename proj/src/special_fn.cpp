#include "gpland/special_fn.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <limits>
#include <string>

#include "gpland/errors.hpp"

namespace gpland::special {
namespace {

// GSL would abort the process by default; errors are handled through the
// status codes of the _e variants instead.
const int kHandlerOff = [] {
  gsl_set_error_handler_off();
  return 0;
}();

constexpr double kLnDblMax = 709.782712893384;  // ln(DBL_MAX)

double ln_knu_checked(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x)) {
    throw DomainError("bessel_k: non-finite argument");
  }
  if (x <= 0.0) {
    throw DomainError("bessel_k: requires x > 0, got x=" + std::to_string(x));
  }
  nu = std::fabs(nu);
  gsl_sf_result r;
  const int status = gsl_sf_bessel_lnKnu_e(nu, x, &r);
  if (status == GSL_EDOM) {
    throw DomainError("bessel_k: domain error at nu=" + std::to_string(nu) +
                      ", x=" + std::to_string(x));
  }
  if (status != GSL_SUCCESS) {
    throw NumericalError("bessel_k: evaluation failed (gsl status " +
                         std::to_string(status) + ") at nu=" +
                         std::to_string(nu) + ", x=" + std::to_string(x));
  }
  return r.val;
}

}  // namespace

double gamma_ln(double z) {
  if (!std::isfinite(z) || z <= 0.0) {
    throw DomainError("gamma_ln: requires finite z > 0");
  }
  return std::lgamma(z);
}

double bessel_k_ln(double nu, double x) { return ln_knu_checked(nu, x); }

double bessel_k(double nu, double x) {
  const double ln_val = ln_knu_checked(nu, x);
  if (ln_val > kLnDblMax) {
    throw NumericalError("bessel_k: K_nu(x) overflows double at nu=" +
                         std::to_string(nu) + ", x=" + std::to_string(x) +
                         "; use bessel_k_ln");
  }
  return std::exp(ln_val);
}

double bessel_k_dnu_default_step(double nu) {
  return std::max(1e-6, 1e-8 * std::fabs(nu));
}

double bessel_k_dnu(double nu, double x, double h) {
  nu = std::fabs(nu);
  if (h <= 0.0) h = bessel_k_dnu_default_step(nu);
  const double hi = bessel_k(nu + h, x);
  const double lo = bessel_k(std::fabs(nu - h), x);
  return (hi - lo) / (2.0 * h);
}

}  // namespace gpland::special
