#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gpland {

// Kernel hyperparameters in natural (constrained) space.
struct Hyperparameters {
  double amplitude_sq = 1.0;     // signal variance sigma^2
  Eigen::VectorXd lengthscales;  // one per input dimension
  double noise_var = 1e-6;       // observation noise variance
  double nu = 2.5;               // Matern smoothness
  bool nu_free = false;          // whether nu participates in optimization

  void validate(int expected_dim = -1) const;
};

struct KernelMatrix {
  Eigen::MatrixXd values;
  double jitter_used = 0.0;  // 0 at construction; the Cholesky path fills it
};

struct KernelGradients {
  // Order matches the unconstrained optimization vector: d/dln(sigma^2),
  // d/dln(l_1)..d/dln(l_d), d/dln(noise_var), then d/dnu when nu is free.
  std::vector<Eigen::MatrixXd> matrices;
  std::vector<std::string> names;
};

// Euclidean norm of the per-dimension lengthscale-scaled difference.
double scaled_distance(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                       const Eigen::VectorXd& lengthscales);

// Closed-form Matern at p in {1/2, 3/2, 5/2}. r is the already-scaled
// distance (lengthscale applied).
double matern_half_integer(double p, double r, double amplitude_sq);

// General Matern for nu >= 0.5. Dispatches to the closed forms within 1e-12
// of a supported half-integer and returns amplitude_sq below the
// zero-distance threshold (removable singularity of the Bessel form).
double matern_general(double nu, double r, double amplitude_sq);

// Step used for the central finite-difference d/dnu kernel matrix.
inline constexpr double kNuFdStep = 1e-5;

// Caches pairwise per-dimension squared differences for a fixed point set so
// repeated hyperparameter evaluations only pay for the kernel itself.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(Eigen::MatrixXd X);

  int n() const { return static_cast<int>(X_.rows()); }
  int dim() const { return static_cast<int>(X_.cols()); }
  const Eigen::MatrixXd& points() const { return X_; }

  KernelMatrix matrix(const Hyperparameters& hp) const;
  KernelGradients gradients(const Hyperparameters& hp) const;

 private:
  Eigen::MatrixXd scaled_r(const Eigen::VectorXd& lengthscales) const;
  Eigen::MatrixXd noise_free_matrix(const Hyperparameters& hp, double nu) const;

  Eigen::MatrixXd X_;
  std::vector<Eigen::MatrixXd> sqdiff_;  // per dimension, n x n
};

// One-shot conveniences over KernelEvaluator.
KernelMatrix kernel_matrix(const Eigen::MatrixXd& X, const Hyperparameters& hp);
KernelGradients kernel_matrix_grad(const Eigen::MatrixXd& X,
                                   const Hyperparameters& hp);

// Cross-covariance between two point sets; never carries a noise term.
Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& X1,
                             const Eigen::MatrixXd& X2,
                             const Hyperparameters& hp);

}  // namespace gpland
