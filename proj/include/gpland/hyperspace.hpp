#pragma once

#include <Eigen/Dense>

#include "gpland/kernel.hpp"
#include "gpland/rng.hpp"

namespace gpland {

// Log-bounds used only for initialization sampling; the optimization itself
// is unconstrained.
struct SamplingBounds {
  double log_amp_lo = -4.0, log_amp_hi = 4.0;
  double log_len_lo = -3.0, log_len_hi = 5.0;
  double log_noise_lo = -12.0, log_noise_hi = 0.0;
};

// Describes the unconstrained optimization vector:
//   [ln sigma^2, ln l_1 .. ln l_k, ln noise_var, u_nu (if nu_free)]
// where k = 1 in isotropic mode, else the data dimension, and
//   nu = 0.5 + (nu_max - 0.5) * sigmoid(u_nu).
struct SearchSpace {
  int data_dim = 1;
  bool nu_free = false;
  double nu_max = 10.0;
  double fixed_nu = 2.5;  // used when nu is not free
  bool isotropic = false;
  SamplingBounds bounds;

  int lengthscale_count() const { return isotropic ? 1 : data_dim; }
  int vector_size() const {
    return 2 + lengthscale_count() + (nu_free ? 1 : 0);
  }
  void validate() const;
};

Eigen::VectorXd to_vector(const Hyperparameters& hp, const SearchSpace& space);
Hyperparameters from_vector(const Eigen::VectorXd& v, const SearchSpace& space);

// d(nu)/d(u_nu) at the given unconstrained coordinate; the chain-rule factor
// for the nu component of objective gradients.
double nu_transform_derivative(double u, const SearchSpace& space);

// Uniform draw inside the sampling bounds (nu uniform in (0.5, nu_max], then
// mapped to u). Returns an unconstrained vector.
Eigen::VectorXd sample_start(const SearchSpace& space, Rng& rng);

}  // namespace gpland
