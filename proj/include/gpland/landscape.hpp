#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gpland/data_io.hpp"
#include "gpland/gp_core.hpp"
#include "gpland/hyperspace.hpp"
#include "gpland/rng.hpp"

namespace gpland {

// Objective seam: value, plus gradient when the pointer is non-null.
// Non-finite values mark infeasible regions.
using Objective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct LocalMinimizeOptions {
  double grad_tol = 1e-5;
  int max_iterations = 200;
  int history = 8;  // L-BFGS memory
};

struct LocalResult {
  Eigen::VectorXd theta;
  double loss = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

// L-BFGS with a strong-Wolfe line search.
LocalResult local_minimize(const Objective& objective,
                           const Eigen::VectorXd& start,
                           const LocalMinimizeOptions& options = {});

// Accept with probability min(1, exp(-delta_loss / c)).
bool metropolis_accept(double delta_loss, double c, Rng& rng);

struct BasinHoppingConfig {
  double metropolis_c = 0.0;  // <= 0: adaptive, 0.5 * IQR of early losses
  double step_scale = 1.0;    // perturbation scale in unconstrained space
  int stall_n = 10;           // stop after this many steps without a new minimum
  int max_steps = 100;
  double local_tol = 1e-5;
  int local_max_iter = 200;
  double dedup_loss_tol = 1e-6;
  double dedup_theta_tol = 1e-3;
  std::uint64_t seed = 0;
  int n_chains = 1;  // independent chains, merged then deduplicated

  void validate() const;
};

struct MinimumRecord {
  int id = -1;
  Eigen::VectorXd theta;  // unconstrained coordinates
  Hyperparameters hyperparameters;
  double loss = 0.0;
  double grad_norm = 0.0;
  Eigen::VectorXd hessian_eigenvalues;  // ascending
  double spectral_norm = 0.0;
  std::optional<double> log_occupation;
  double train_mse = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> test_mse;
};

// Merge near-identical minima: |dloss| < loss_tol AND |dtheta| < theta_tol.
// Keeps the lower-loss representative; output stays sorted by loss.
std::vector<MinimumRecord> dedup_minima(std::vector<MinimumRecord> records,
                                        double loss_tol, double theta_tol);

// Central-difference Hessian of the objective (via its gradient),
// symmetrized as (H + H^T)/2.
Eigen::MatrixXd hessian_fd(const Objective& objective,
                           const Eigen::VectorXd& theta,
                           double step_scale = 1e-4);

// Fills eigenvalues, spectral norm and the occupation score:
//   log_occupation = -loss - 0.5 * sum ln(lambda_j)
// over eigenvalues above 1e-8 * spectral_norm (harmonic superposition with
// unit temperature). No retained eigenvalue -> occupation left undefined.
void analyze_minimum(MinimumRecord& record, const Eigen::MatrixXd& hessian);

// Basin-hopping over an arbitrary objective. Used directly by tests on
// surrogate surfaces; the GP entry point below layers dataset bookkeeping on
// top. warm_starts are minimized before random exploration begins.
std::vector<MinimumRecord> basin_hop_objective(
    const Objective& objective, int dim,
    const std::function<Eigen::VectorXd(Rng&)>& sampler,
    const BasinHoppingConfig& config,
    const std::vector<Eigen::VectorXd>& warm_starts = {});

// Landscape exploration of the GP -lml surface. Each converged minimum is
// refitted to attach train (and optionally test) MSE in raw target units.
std::vector<MinimumRecord> basin_hop(
    const Dataset& data, const SearchSpace& space,
    const BasinHoppingConfig& config, const Dataset* test = nullptr,
    const std::vector<Eigen::VectorXd>& warm_starts = {});

}  // namespace gpland
