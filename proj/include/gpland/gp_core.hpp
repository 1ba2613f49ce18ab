#pragma once

#include <Eigen/Dense>

#include <memory>
#include <utility>

#include "gpland/data_io.hpp"
#include "gpland/hyperspace.hpp"
#include "gpland/kernel.hpp"

namespace gpland {

// The objective decomposes into the pieces that counterbalance each other;
// exposing them separately keeps that structure inspectable.
struct NlmlParts {
  double data_fit = 0.0;    // 0.5 * y^T K^-1 y
  double complexity = 0.0;  // 0.5 * ln|K|
  double constant = 0.0;    // (n/2) ln 2pi
  double total() const { return data_fit + complexity + constant; }
};

// Lower Cholesky factor of K, adding diagonal jitter only on failure.
// Jitter escalates geometrically from 1e-10 * mean(diag) by factor 10 for at
// most 6 attempts; throws DecompositionError (with the final jitter) after
// that.
std::pair<Eigen::MatrixXd, double> cholesky_with_jitter(
    const Eigen::MatrixXd& K);

struct PosteriorPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // latent-function variance unless noise added
  int negative_variance_clamps = 0;
};

// Immutable fitted model: one Cholesky, reused by every prediction.
class FittedGP {
 public:
  FittedGP(std::shared_ptr<const Dataset> data, Hyperparameters hp);
  static FittedGP fit(const Dataset& data, const Hyperparameters& hp);

  const Hyperparameters& hyperparameters() const { return hp_; }
  const Dataset& data() const { return *data_; }
  double jitter() const { return jitter_; }
  double nlml() const { return parts_.total(); }
  const NlmlParts& nlml_parts() const { return parts_; }
  const Eigen::MatrixXd& cholesky_factor() const { return L_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

  // Eq-1 posterior in model (standardized) space. include_noise adds the
  // observation noise variance to each predictive variance.
  PosteriorPrediction predict(const Eigen::MatrixXd& X_star,
                              bool include_noise = false) const;

 private:
  std::shared_ptr<const Dataset> data_;
  Hyperparameters hp_;
  Eigen::MatrixXd L_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  NlmlParts parts_;
};

double neg_log_marginal_likelihood(const Dataset& data,
                                   const Hyperparameters& hp);
NlmlParts nlml_parts(const Dataset& data, const Hyperparameters& hp);

// Gradient in the unconstrained vector space defined by `space` (log
// coordinates, sigmoid-bounded nu).
Eigen::VectorXd nlml_gradient(const Dataset& data, const Hyperparameters& hp,
                              const SearchSpace& space);

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

// Train/test MSE in raw target units (predictions de-standardized through
// the training metadata).
double train_mse_raw(const FittedGP& model);
double test_mse_raw(const FittedGP& model, const Dataset& test);

// -lml as a function of the unconstrained vector. Infeasible points
// (decomposition failure, overflowing transforms) evaluate to +infinity so
// optimizers back away instead of crashing.
class NlmlObjective {
 public:
  NlmlObjective(std::shared_ptr<const Dataset> data, SearchSpace space);

  double operator()(const Eigen::VectorXd& u, Eigen::VectorXd* grad) const;

  const SearchSpace& space() const { return space_; }
  const Dataset& data() const { return *data_; }
  std::shared_ptr<const Dataset> data_ptr() const { return data_; }

 private:
  std::shared_ptr<const Dataset> data_;
  SearchSpace space_;
  std::shared_ptr<const KernelEvaluator> kernel_;
};

}  // namespace gpland
