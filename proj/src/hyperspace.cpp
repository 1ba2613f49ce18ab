#include "gpland/hyperspace.hpp"

#include <cmath>

#include "gpland/errors.hpp"

namespace gpland {
namespace {

// Saturation bound for the logit: sigmoid(36.8) is 1 within double
// precision, so clamping keeps round-trips exact for interior points while
// never producing infinities at the nu bounds.
constexpr double kLogitClamp = 36.8;

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(double t) {
  if (t <= 0.0) return -kLogitClamp;
  if (t >= 1.0) return kLogitClamp;
  const double u = std::log(t / (1.0 - t));
  return std::clamp(u, -kLogitClamp, kLogitClamp);
}

}  // namespace

void SearchSpace::validate() const {
  if (data_dim < 1) throw ConfigError("SearchSpace: data_dim must be >= 1");
  if (!(nu_max > 0.5)) throw ConfigError("SearchSpace: nu_max must exceed 0.5");
  if (!nu_free && !(fixed_nu >= 0.5 && fixed_nu <= nu_max)) {
    throw ConfigError("SearchSpace: fixed_nu outside [0.5, nu_max]");
  }
  if (!(bounds.log_amp_lo < bounds.log_amp_hi) ||
      !(bounds.log_len_lo < bounds.log_len_hi) ||
      !(bounds.log_noise_lo < bounds.log_noise_hi)) {
    throw ConfigError("SearchSpace: sampling bounds must be ordered");
  }
}

Eigen::VectorXd to_vector(const Hyperparameters& hp, const SearchSpace& space) {
  space.validate();
  hp.validate(space.isotropic ? -1 : space.data_dim);
  Eigen::VectorXd v(space.vector_size());
  v[0] = std::log(hp.amplitude_sq);
  const int k = space.lengthscale_count();
  for (int i = 0; i < k; ++i) v[1 + i] = std::log(hp.lengthscales[i]);
  v[1 + k] = std::log(hp.noise_var);
  if (space.nu_free) {
    v[2 + k] = logit((hp.nu - 0.5) / (space.nu_max - 0.5));
  }
  return v;
}

Hyperparameters from_vector(const Eigen::VectorXd& v, const SearchSpace& space) {
  space.validate();
  if (v.size() != space.vector_size()) {
    throw DimensionError("from_vector: expected length " +
                         std::to_string(space.vector_size()) + ", got " +
                         std::to_string(v.size()));
  }
  if (!v.allFinite()) throw NumericalError("from_vector: non-finite entries");

  Hyperparameters hp;
  hp.amplitude_sq = std::exp(v[0]);
  const int k = space.lengthscale_count();
  hp.lengthscales.resize(space.data_dim);
  for (int j = 0; j < space.data_dim; ++j) {
    hp.lengthscales[j] = std::exp(v[1 + (space.isotropic ? 0 : j)]);
  }
  hp.noise_var = std::exp(v[1 + k]);
  hp.nu_free = space.nu_free;
  if (space.nu_free) {
    hp.nu = 0.5 + (space.nu_max - 0.5) * sigmoid(v[2 + k]);
  } else {
    hp.nu = space.fixed_nu;
  }
  return hp;
}

double nu_transform_derivative(double u, const SearchSpace& space) {
  const double s = sigmoid(u);
  return (space.nu_max - 0.5) * s * (1.0 - s);
}

Eigen::VectorXd sample_start(const SearchSpace& space, Rng& rng) {
  space.validate();
  Eigen::VectorXd v(space.vector_size());
  v[0] = rng.uniform(space.bounds.log_amp_lo, space.bounds.log_amp_hi);
  const int k = space.lengthscale_count();
  for (int i = 0; i < k; ++i) {
    v[1 + i] = rng.uniform(space.bounds.log_len_lo, space.bounds.log_len_hi);
  }
  v[1 + k] = rng.uniform(space.bounds.log_noise_lo, space.bounds.log_noise_hi);
  if (space.nu_free) {
    // uniform in nu, then mapped; (0.5, nu_max] via the half-open draw
    const double nu = space.nu_max - (space.nu_max - 0.5) * rng.uniform();
    v[2 + k] = logit((nu - 0.5) / (space.nu_max - 0.5));
  }
  return v;
}

}  // namespace gpland
