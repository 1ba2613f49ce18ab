#include "gpland/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpland/errors.hpp"
#include "gpland/special_fn.hpp"

namespace gpland {
namespace {

constexpr double kHalfIntegerTol = 1e-12;

bool near_half_integer(double nu, double* p) {
  for (double cand : {0.5, 1.5, 2.5}) {
    if (std::fabs(nu - cand) < kHalfIntegerTol) {
      *p = cand;
      return true;
    }
  }
  return false;
}

double zero_dist_threshold(double amplitude_sq) {
  return 1e-10 * (1.0 + std::sqrt(amplitude_sq));
}

// ln of the order-dependent prefactor 2^(1-nu) / Gamma(nu).
double ln_prefactor(double nu) {
  return (1.0 - nu) * std::numbers::ln2 - special::gamma_ln(nu);
}

double matern_general_checked(double nu, double r, double amplitude_sq) {
  const double z = std::sqrt(2.0 * nu) * r;
  const double ln_k = std::log(amplitude_sq) + ln_prefactor(nu) +
                      nu * std::log(z) + special::bessel_k_ln(nu, z);
  return std::exp(ln_k);
}

// (dk/dr) / r for the noise-free general Matern. Finite for r > 0; the
// lengthscale gradient entries it feeds vanish as r -> 0 because they carry
// an extra factor bounded by r^2.
double radial_derivative_over_r(double nu, double r, double amplitude_sq) {
  const double a = std::sqrt(2.0 * nu);
  const double z = a * r;
  const double ln_mag = std::log(amplitude_sq) + ln_prefactor(nu) +
                        2.0 * std::log(a) + (nu - 1.0) * std::log(z) +
                        special::bessel_k_ln(std::fabs(nu - 1.0), z);
  return -std::exp(ln_mag);
}

void check_finite(const Eigen::MatrixXd& values, const char* what) {
  for (int j = 0; j < values.cols(); ++j) {
    for (int i = 0; i < values.rows(); ++i) {
      if (!std::isfinite(values(i, j))) {
        throw NumericalError(std::string(what) + ": non-finite entry at (" +
                             std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

void Hyperparameters::validate(int expected_dim) const {
  if (!std::isfinite(amplitude_sq) || amplitude_sq <= 0.0) {
    throw DomainError("Hyperparameters: amplitude_sq must be positive");
  }
  if (!std::isfinite(noise_var) || noise_var < 0.0) {
    throw DomainError("Hyperparameters: noise_var must be >= 0");
  }
  if (lengthscales.size() < 1) {
    throw DimensionError("Hyperparameters: empty lengthscale vector");
  }
  for (int i = 0; i < lengthscales.size(); ++i) {
    if (!std::isfinite(lengthscales[i]) || lengthscales[i] <= 0.0) {
      throw DomainError("Hyperparameters: lengthscale " + std::to_string(i) +
                        " must be positive");
    }
  }
  if (!std::isfinite(nu) || nu < 0.5) {
    throw DomainError("Hyperparameters: nu must be >= 0.5");
  }
  if (expected_dim >= 0 && lengthscales.size() != expected_dim) {
    throw DimensionError("Hyperparameters: lengthscale count " +
                         std::to_string(lengthscales.size()) +
                         " does not match data dimension " +
                         std::to_string(expected_dim));
  }
}

double scaled_distance(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                       const Eigen::VectorXd& lengthscales) {
  if (x1.size() != x2.size() || x1.size() != lengthscales.size()) {
    throw DimensionError("scaled_distance: dimension mismatch");
  }
  return ((x1 - x2).array() / lengthscales.array()).matrix().norm();
}

double matern_half_integer(double p, double r, double amplitude_sq) {
  if (r < 0.0 || !std::isfinite(r)) {
    throw DomainError("matern_half_integer: r must be finite and >= 0");
  }
  if (std::fabs(p - 0.5) < kHalfIntegerTol) {
    return amplitude_sq * std::exp(-r);
  }
  if (std::fabs(p - 1.5) < kHalfIntegerTol) {
    const double s = std::numbers::sqrt3 * r;
    return amplitude_sq * (1.0 + s) * std::exp(-s);
  }
  if (std::fabs(p - 2.5) < kHalfIntegerTol) {
    const double s = std::sqrt(5.0) * r;
    return amplitude_sq * (1.0 + s + s * s / 3.0) * std::exp(-s);
  }
  throw DomainError("matern_half_integer: unsupported order " +
                    std::to_string(p));
}

double matern_general(double nu, double r, double amplitude_sq) {
  if (!std::isfinite(nu) || nu < 0.5) {
    throw DomainError("matern_general: nu must be >= 0.5");
  }
  if (!std::isfinite(amplitude_sq) || amplitude_sq <= 0.0) {
    throw DomainError("matern_general: amplitude_sq must be positive");
  }
  if (r < 0.0 || !std::isfinite(r)) {
    throw DomainError("matern_general: r must be finite and >= 0");
  }
  if (r < zero_dist_threshold(amplitude_sq)) {
    return amplitude_sq;
  }
  double p;
  if (near_half_integer(nu, &p)) {
    return matern_half_integer(p, r, amplitude_sq);
  }
  return matern_general_checked(nu, r, amplitude_sq);
}

KernelEvaluator::KernelEvaluator(Eigen::MatrixXd X) : X_(std::move(X)) {
  if (X_.rows() < 1 || X_.cols() < 1) {
    throw DimensionError("KernelEvaluator: X must be non-empty");
  }
  const int n = static_cast<int>(X_.rows());
  const int d = static_cast<int>(X_.cols());
  sqdiff_.reserve(d);
  for (int j = 0; j < d; ++j) {
    Eigen::MatrixXd m(n, n);
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        const double diff = X_(a, j) - X_(b, j);
        m(a, b) = diff * diff;
      }
    }
    sqdiff_.push_back(std::move(m));
  }
}

Eigen::MatrixXd KernelEvaluator::scaled_r(
    const Eigen::VectorXd& lengthscales) const {
  const int n = this->n();
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < dim(); ++j) {
    r2.array() += sqdiff_[j].array() / (lengthscales[j] * lengthscales[j]);
  }
  return r2.array().max(0.0).sqrt();
}

Eigen::MatrixXd KernelEvaluator::noise_free_matrix(const Hyperparameters& hp,
                                                   double nu) const {
  const int n = this->n();
  const Eigen::MatrixXd R = scaled_r(hp.lengthscales);
  Eigen::MatrixXd K(n, n);
  double p;
  const bool half = near_half_integer(nu, &p);
  const double thresh = zero_dist_threshold(hp.amplitude_sq);
  const double ln_amp = std::log(hp.amplitude_sq);
  const double ln_pre = half ? 0.0 : ln_prefactor(nu);
  const double a = std::sqrt(2.0 * nu);
  for (int b = 0; b < n; ++b) {
    K(b, b) = hp.amplitude_sq;
    for (int aRow = b + 1; aRow < n; ++aRow) {
      const double r = R(aRow, b);
      double v;
      if (r < thresh) {
        v = hp.amplitude_sq;
      } else if (half) {
        v = matern_half_integer(p, r, hp.amplitude_sq);
      } else {
        const double z = a * r;
        v = std::exp(ln_amp + ln_pre + nu * std::log(z) +
                     special::bessel_k_ln(nu, z));
      }
      K(aRow, b) = v;
      K(b, aRow) = v;
    }
  }
  return K;
}

KernelMatrix KernelEvaluator::matrix(const Hyperparameters& hp) const {
  hp.validate(dim());
  KernelMatrix out;
  out.values = noise_free_matrix(hp, hp.nu);
  out.values.diagonal().array() += hp.noise_var;
  check_finite(out.values, "kernel_matrix");
  return out;
}

KernelGradients KernelEvaluator::gradients(const Hyperparameters& hp) const {
  hp.validate(dim());
  const int n = this->n();
  const int d = dim();
  KernelGradients out;

  const Eigen::MatrixXd K_nf = noise_free_matrix(hp, hp.nu);
  out.matrices.push_back(K_nf);  // k is linear in sigma^2
  out.names.push_back("log_amplitude_sq");

  // Lengthscale gradients share one radial factor per pair.
  const Eigen::MatrixXd R = scaled_r(hp.lengthscales);
  const double thresh = zero_dist_threshold(hp.amplitude_sq);
  std::vector<Eigen::MatrixXd> ls_grads(
      d, Eigen::MatrixXd::Zero(n, n));
  for (int b = 0; b < n; ++b) {
    for (int aRow = b + 1; aRow < n; ++aRow) {
      const double r = R(aRow, b);
      if (r < thresh) continue;  // gradient vanishes at zero distance
      const double g_over_r =
          radial_derivative_over_r(hp.nu, r, hp.amplitude_sq);
      for (int j = 0; j < d; ++j) {
        const double lsq = hp.lengthscales[j] * hp.lengthscales[j];
        const double entry = -g_over_r * sqdiff_[j](aRow, b) / lsq;
        ls_grads[j](aRow, b) = entry;
        ls_grads[j](b, aRow) = entry;
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    out.matrices.push_back(std::move(ls_grads[j]));
    out.names.push_back("log_lengthscale_" + std::to_string(j));
  }

  Eigen::MatrixXd noise_grad = Eigen::MatrixXd::Zero(n, n);
  noise_grad.diagonal().setConstant(hp.noise_var);
  out.matrices.push_back(std::move(noise_grad));
  out.names.push_back("log_noise_var");

  if (hp.nu_free) {
    // Central finite difference in nu; the paper's practice for Bessel
    // order derivatives.
    const double h = kNuFdStep;
    const Eigen::MatrixXd hi = noise_free_matrix(hp, hp.nu + h);
    const Eigen::MatrixXd lo = noise_free_matrix(hp, std::max(hp.nu - h, 0.5));
    const double denom = hp.nu + h - std::max(hp.nu - h, 0.5);
    out.matrices.push_back((hi - lo) / denom);
    out.names.push_back("nu");
  }

  for (const auto& m : out.matrices) check_finite(m, "kernel_matrix_grad");
  return out;
}

KernelMatrix kernel_matrix(const Eigen::MatrixXd& X,
                           const Hyperparameters& hp) {
  return KernelEvaluator(X).matrix(hp);
}

KernelGradients kernel_matrix_grad(const Eigen::MatrixXd& X,
                                   const Hyperparameters& hp) {
  return KernelEvaluator(X).gradients(hp);
}

Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& X1,
                             const Eigen::MatrixXd& X2,
                             const Hyperparameters& hp) {
  if (X1.cols() != X2.cols()) {
    throw DimensionError("kernel_cross: column counts differ");
  }
  hp.validate(static_cast<int>(X1.cols()));
  Eigen::MatrixXd K(X1.rows(), X2.rows());
  for (int b = 0; b < X2.rows(); ++b) {
    for (int a = 0; a < X1.rows(); ++a) {
      const double r =
          scaled_distance(X1.row(a), X2.row(b), hp.lengthscales);
      K(a, b) = matern_general(hp.nu, r, hp.amplitude_sq);
    }
  }
  check_finite(K, "kernel_cross");
  return K;
}

}  // namespace gpland
