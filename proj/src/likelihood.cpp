#include "colorhr/likelihood.hpp"

#include "colorhr/error.hpp"

#include <cmath>

namespace colorhr {

double inner(const Matrix& gamma, const Matrix& q) {
  double s = 0.0;
  for (Index j = 1; j < gamma.cols(); ++j)
    for (Index i = 0; i < j; ++i) s += gamma(i, j) * q(i, j);
  return s;
}

double log_partition(const PrecisionModel& model) {
  const Index k = model.dim() - 1;
  const auto logdet = log_cofactor_det(model.theta(), k);
  if (!logdet) {
    throw Error(ErrorCode::OutsideNaturalSpace,
                "cofactor block of the signed Laplacian is not positive definite");
  }
#ifndef NDEBUG
  if (model.dim() > 2) {
    const auto other = log_cofactor_det(model.theta(), 0);
    if (!other || std::abs(*other - *logdet) > 1e-6 * (1.0 + std::abs(*logdet))) {
      throw Error(ErrorCode::OutsideNaturalSpace, "cofactor determinant depends on deleted index");
    }
  }
#endif
  return -0.5 * *logdet;
}

double loglik(const PrecisionModel& model, const Matrix& sample_variogram) {
  return -log_partition(model) - 0.5 * inner(sample_variogram, model.adjacency());
}

Matrix loglik_gradient(const PrecisionModel& model, const Matrix& sample_variogram) {
  const Variogram fitted = theta_to_gamma(model);
  Matrix g = 0.5 * (fitted.matrix() - sample_variogram);
  g.diagonal().setZero();
  return g;
}

double log_det_cayley_menger(const Variogram& gamma) {
  const AnchoredCovariance cov = farris(gamma, gamma.dim() - 1);
  Eigen::LLT<Matrix> llt(cov.sigma);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidParameter,
                "Cayley-Menger determinant is not positive: variogram outside the parameter set");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double fenchel_dual(const Variogram& gamma) {
  const double d = static_cast<double>(gamma.dim());
  return -0.5 * (d - 1.0) - 0.5 * log_det_cayley_menger(gamma);
}

double kl(const Variogram& gamma1, const PrecisionModel& model2) {
  return 0.5 * inner(gamma1.matrix(), model2.adjacency()) + fenchel_dual(gamma1) +
         log_partition(model2);
}

double dual_loglik(const Variogram& gamma, const Matrix& sample_adjacency) {
  return 0.5 * log_det_cayley_menger(gamma) - 0.5 * inner(gamma.matrix(), sample_adjacency);
}

Matrix dual_loglik_gradient(const Variogram& gamma, const Matrix& sample_adjacency) {
  const PrecisionModel model = gamma_to_theta(gamma);
  Matrix g = 0.5 * (model.adjacency() - sample_adjacency);
  g.diagonal().setZero();
  return g;
}

}  // namespace colorhr
