#include "gpland/gp_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gpland/errors.hpp"

namespace gpland {
namespace {

constexpr double kLn2Pi = 1.8378770664093454836;

struct Factorization {
  Eigen::MatrixXd L;
  Eigen::VectorXd alpha;
  double jitter;
  NlmlParts parts;
};

Factorization factorize(const Dataset& data, const Hyperparameters& hp,
                        const KernelEvaluator& kernel) {
  KernelMatrix km = kernel.matrix(hp);
  auto [L, jitter] = cholesky_with_jitter(km.values);
  Factorization f;
  f.L = std::move(L);
  f.jitter = jitter;
  f.alpha = f.L.triangularView<Eigen::Lower>().solve(data.y);
  f.L.transpose().triangularView<Eigen::Upper>().solveInPlace(f.alpha);
  f.parts.data_fit = 0.5 * data.y.dot(f.alpha);
  f.parts.complexity = f.L.diagonal().array().log().sum();
  f.parts.constant = 0.5 * data.n() * kLn2Pi;
  return f;
}

}  // namespace

std::pair<Eigen::MatrixXd, double> cholesky_with_jitter(
    const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols()) {
    throw DimensionError("cholesky_with_jitter: matrix not square");
  }
  const double base = 1e-10 * K.diagonal().mean();
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    Eigen::MatrixXd work = K;
    if (jitter > 0.0) work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
    jitter = (attempt == 0) ? base : jitter * 10.0;
  }
  throw DecompositionError(
      "cholesky_with_jitter: matrix stayed indefinite at jitter " +
          std::to_string(jitter / 10.0),
      jitter / 10.0);
}

FittedGP::FittedGP(std::shared_ptr<const Dataset> data, Hyperparameters hp)
    : data_(std::move(data)), hp_(std::move(hp)) {
  data_->validate();
  hp_.validate(data_->dim());
  KernelEvaluator kernel(data_->X);
  auto f = factorize(*data_, hp_, kernel);
  L_ = std::move(f.L);
  alpha_ = std::move(f.alpha);
  jitter_ = f.jitter;
  parts_ = f.parts;
}

FittedGP FittedGP::fit(const Dataset& data, const Hyperparameters& hp) {
  return FittedGP(std::make_shared<Dataset>(data), hp);
}

PosteriorPrediction FittedGP::predict(const Eigen::MatrixXd& X_star,
                                      bool include_noise) const {
  if (X_star.cols() != data_->X.cols()) {
    throw DimensionError("predict: feature dimension mismatch");
  }
  const Eigen::MatrixXd K_star = kernel_cross(X_star, data_->X, hp_);
  PosteriorPrediction out;
  out.mean = K_star * alpha_;

  // v = L^-1 k_*; predictive variance = k(x*,x*) - |v|^2
  Eigen::MatrixXd V = K_star.transpose();
  L_.triangularView<Eigen::Lower>().solveInPlace(V);
  out.variance.resize(X_star.rows());
  const double prior = hp_.amplitude_sq + (include_noise ? hp_.noise_var : 0.0);
  for (int i = 0; i < X_star.rows(); ++i) {
    double v = prior - V.col(i).squaredNorm();
    if (v < 0.0) {
      ++out.negative_variance_clamps;
      v = 0.0;
    }
    out.variance[i] = v;
  }
  return out;
}

double neg_log_marginal_likelihood(const Dataset& data,
                                   const Hyperparameters& hp) {
  return nlml_parts(data, hp).total();
}

NlmlParts nlml_parts(const Dataset& data, const Hyperparameters& hp) {
  data.validate();
  hp.validate(data.dim());
  KernelEvaluator kernel(data.X);
  return factorize(data, hp, kernel).parts;
}

Eigen::VectorXd nlml_gradient(const Dataset& data, const Hyperparameters& hp,
                              const SearchSpace& space) {
  NlmlObjective obj(std::make_shared<Dataset>(data), space);
  Eigen::VectorXd grad;
  const double value = obj(to_vector(hp, space), &grad);
  if (!std::isfinite(value)) {
    throw NumericalError("nlml_gradient: objective not finite at hp");
  }
  return grad;
}

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
  if (predictions.size() == 0) throw DomainError("mse: empty input");
  if (predictions.size() != targets.size()) {
    throw DimensionError("mse: length mismatch");
  }
  return (predictions - targets).squaredNorm() / predictions.size();
}

double train_mse_raw(const FittedGP& model) {
  const auto& data = model.data();
  const auto pred = model.predict(data.X);
  return mse(data.destandardize_targets(pred.mean),
             data.destandardize_targets(data.y));
}

double test_mse_raw(const FittedGP& model, const Dataset& test) {
  const auto pred = model.predict(test.X);
  return mse(test.destandardize_targets(pred.mean),
             test.destandardize_targets(test.y));
}

NlmlObjective::NlmlObjective(std::shared_ptr<const Dataset> data,
                             SearchSpace space)
    : data_(std::move(data)), space_(std::move(space)) {
  data_->validate();
  space_.validate();
  if (space_.data_dim != data_->dim()) {
    throw DimensionError("NlmlObjective: space/data dimension mismatch");
  }
  kernel_ = std::make_shared<KernelEvaluator>(data_->X);
}

double NlmlObjective::operator()(const Eigen::VectorXd& u,
                                 Eigen::VectorXd* grad) const {
  if (grad) *grad = Eigen::VectorXd::Zero(space_.vector_size());
  if (!u.allFinite()) return std::numeric_limits<double>::infinity();
  try {
    const Hyperparameters hp = from_vector(u, space_);
    const auto f = factorize(*data_, hp, *kernel_);
    if (grad) {
      const int n = data_->n();
      Eigen::MatrixXd Kinv = Eigen::MatrixXd::Identity(n, n);
      f.L.triangularView<Eigen::Lower>().solveInPlace(Kinv);
      f.L.transpose().triangularView<Eigen::Upper>().solveInPlace(Kinv);

      const KernelGradients kg = kernel_->gradients(hp);
      // d(-lml)/dtheta = 0.5 tr(K^-1 dK) - 0.5 alpha^T dK alpha
      auto contract = [&](const Eigen::MatrixXd& G) {
        return 0.5 * ((Kinv.array() * G.array()).sum() -
                      f.alpha.dot(G * f.alpha));
      };
      const int d = data_->dim();
      int out_idx = 0;
      (*grad)[out_idx++] = contract(kg.matrices[0]);  // log amplitude
      if (space_.isotropic) {
        double sum = 0.0;
        for (int j = 0; j < d; ++j) sum += contract(kg.matrices[1 + j]);
        (*grad)[out_idx++] = sum;
      } else {
        for (int j = 0; j < d; ++j) {
          (*grad)[out_idx++] = contract(kg.matrices[1 + j]);
        }
      }
      (*grad)[out_idx++] = contract(kg.matrices[1 + d]);  // log noise
      if (space_.nu_free) {
        const double dnu_du =
            nu_transform_derivative(u[space_.vector_size() - 1], space_);
        (*grad)[out_idx++] = contract(kg.matrices[2 + d]) * dnu_du;
      }
    }
    return f.parts.total();
  } catch (const NumericalError&) {
    if (grad) grad->setZero();
    return std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    if (grad) grad->setZero();
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace gpland
