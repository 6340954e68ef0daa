#include "colorhr/matrix_core.hpp"

#include "colorhr/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace colorhr {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::RankDeficiency: return "rank-deficiency";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::OutsideNaturalSpace: return "outside-natural-space";
    case ErrorCode::Structure: return "structure";
    case ErrorCode::SizeGuard: return "size-guard";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::DegenerateMargin: return "degenerate-margin";
    case ErrorCode::EstimatorUndefined: return "estimator-undefined";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_dim(Index d) {
  if (d < 2) {
    std::ostringstream os;
    os << "dimension must be at least 2, got " << d;
    throw Error(ErrorCode::InvalidDimension, os.str());
  }
}

}  // namespace

Variogram::Variogram(Matrix gamma) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols()) {
    throw Error(ErrorCode::InvalidDimension, "variogram matrix must be square");
  }
  require_dim(gamma_.rows());
  const double scale = std::max(1.0, max_abs(gamma_));
  if (!gamma_.allFinite()) {
    throw Error(ErrorCode::InvalidParameter, "variogram matrix has non-finite entries");
  }
  if (max_abs(gamma_ - gamma_.transpose()) > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidParameter, "variogram matrix is not symmetric");
  }
  if (gamma_.diagonal().cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidParameter, "variogram matrix has a nonzero diagonal");
  }
  gamma_ = symmetrize_zero_diag(gamma_);
}

PrecisionModel PrecisionModel::from_adjacency(Matrix q) {
  if (q.rows() != q.cols()) {
    throw Error(ErrorCode::InvalidDimension, "adjacency matrix must be square");
  }
  require_dim(q.rows());
  const double scale = std::max(1.0, max_abs(q));
  if (max_abs(q - q.transpose()) > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidParameter, "adjacency matrix is not symmetric");
  }
  PrecisionModel out;
  out.q_ = symmetrize_zero_diag(q);
  out.theta_ = -out.q_;
  out.theta_.diagonal() = out.q_.rowwise().sum();
  return out;
}

PrecisionModel PrecisionModel::from_laplacian(Matrix theta) {
  if (theta.rows() != theta.cols()) {
    throw Error(ErrorCode::InvalidDimension, "laplacian matrix must be square");
  }
  require_dim(theta.rows());
  const double scale = std::max(1.0, max_abs(theta));
  if (max_abs(theta - theta.transpose()) > 1e-8 * scale) {
    throw Error(ErrorCode::InvalidParameter, "laplacian matrix is not symmetric");
  }
  if (theta.rowwise().sum().cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(ErrorCode::InvalidParameter, "laplacian rows do not sum to zero");
  }
  return from_adjacency(-symmetrize_zero_diag(theta));
}

Matrix CayleyMengerBlocks::assemble() const {
  const Index d = theta.rows();
  Matrix out(d + 1, d + 1);
  out.topLeftCorner(d, d) = theta;
  out.topRightCorner(d, 1) = -r;
  out.bottomLeftCorner(1, d) = r.transpose();
  out(d, d) = -r_squared;
  return out;
}

Matrix symmetrize_zero_diag(const Matrix& m) {
  Matrix out = 0.5 * (m + m.transpose());
  out.diagonal().setZero();
  return out;
}

Matrix permute_symmetric(const Matrix& m, const std::vector<Index>& perm) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out(perm[i], perm[j]) = m(i, j);
    }
  }
  return out;
}

Matrix delete_index(const Matrix& m, Index k) {
  const Index d = m.rows();
  Matrix out(d - 1, d - 1);
  for (Index i = 0, a = 0; i < d; ++i) {
    if (i == k) continue;
    for (Index j = 0, b = 0; j < d; ++j) {
      if (j == k) continue;
      out(a, b++) = m(i, j);
    }
    ++a;
  }
  return out;
}

Matrix projection_matrix(Index d) {
  require_dim(d);
  return Matrix::Identity(d, d) - Matrix::Constant(d, d, 1.0 / static_cast<double>(d));
}

Covariance gamma_to_sigma(const Variogram& gamma) {
  const Index d = gamma.dim();
  const Matrix p = projection_matrix(d);
  Matrix sigma = p * (-0.5 * gamma.matrix()) * p;
  sigma = 0.5 * (sigma + sigma.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  const Vector& ev = eig.eigenvalues();  // ascending
  const double lmax = ev(d - 1);
  const double tau = kPseudoInverseCutoff * std::max(lmax, 0.0);
  if (lmax <= 0.0 || ev(0) < -tau || ev(1) <= tau) {
    std::ostringstream os;
    os << "variogram is not conditionally negative definite: eigenvalue "
       << (ev(0) < -tau ? ev(0) : ev(1)) << " of P(-Gamma/2)P (largest " << lmax << ")";
    throw Error(ErrorCode::InvalidParameter, os.str());
  }
  return Covariance{sigma};
}

Matrix rank_deficient_pinv(const Matrix& sym) {
  const Index d = sym.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sym + sym.transpose()));
  const Vector& ev = eig.eigenvalues();
  const double lmax = ev(d - 1);
  const double tau = kPseudoInverseCutoff * std::max(lmax, 0.0);
  if (lmax < 0.0 || ev(0) < -tau) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite: eigenvalue " << ev(0);
    throw Error(ErrorCode::InvalidParameter, os.str());
  }
  const auto small = std::count_if(ev.data(), ev.data() + d, [&](double l) { return l < tau || l <= 0.0; });
  if (small != 1) {
    std::ostringstream os;
    os << "expected rank " << d - 1 << ", found " << d - small << " eigenvalues above cutoff";
    throw Error(ErrorCode::RankDeficiency, os.str());
  }
  const Matrix& v = eig.eigenvectors();
  const Vector null_dir = v.col(0);
  const double ones_alignment = std::abs(null_dir.sum()) / std::sqrt(static_cast<double>(d));
  Matrix out;
  if (ones_alignment > 1.0 - 1e-6) {
    // Null direction is the ones vector, as for every Sigma and Theta here:
    // invert the full-rank shift A + J/d by Cholesky, which avoids the
    // eigenvector error that the spectral formula picks up on ill-conditioned input.
    const Matrix j = Matrix::Constant(d, d, 1.0 / static_cast<double>(d));
    Eigen::LLT<Matrix> llt(0.5 * (sym + sym.transpose()) + j);
    if (llt.info() == Eigen::Success) out = llt.solve(Matrix::Identity(d, d)) - j;
  }
  if (out.size() == 0) {
    Vector inv = Vector::Zero(d);
    for (Index i = 1; i < d; ++i) inv(i) = 1.0 / ev(i);
    out = v * inv.asDiagonal() * v.transpose();
  }
  return 0.5 * (out + out.transpose());
}

PrecisionModel sigma_to_theta(const Covariance& cov) {
  if (cov.sigma.rows() != cov.sigma.cols()) {
    throw Error(ErrorCode::InvalidDimension, "covariance must be square");
  }
  require_dim(cov.sigma.rows());
  Matrix theta = rank_deficient_pinv(cov.sigma);
  return PrecisionModel::from_adjacency(-symmetrize_zero_diag(theta));
}

Variogram theta_to_gamma(const PrecisionModel& model) {
  const Matrix sigma = rank_deficient_pinv(model.theta());
  const Vector xi = sigma.diagonal();
  const Index d = sigma.rows();
  Matrix gamma = xi * Vector::Ones(d).transpose() + Vector::Ones(d) * xi.transpose() - 2.0 * sigma;
  return Variogram(symmetrize_zero_diag(gamma));
}

PrecisionModel gamma_to_theta(const Variogram& gamma) {
  return sigma_to_theta(gamma_to_sigma(gamma));
}

AnchoredCovariance farris(const Variogram& gamma, Index k) {
  const Index d = gamma.dim();
  if (k < 0 || k >= d) {
    throw Error(ErrorCode::InvalidArgument, "anchor index out of range");
  }
  const Matrix& g = gamma.matrix();
  AnchoredCovariance out{Matrix(d - 1, d - 1), k};
  for (Index i = 0, a = 0; i < d; ++i) {
    if (i == k) continue;
    for (Index j = 0, b = 0; j < d; ++j) {
      if (j == k) continue;
      out.sigma(a, b++) = 0.5 * (g(i, k) + g(j, k) - g(i, j));
    }
    ++a;
  }
  return out;
}

Variogram farris_inverse(const AnchoredCovariance& cov) {
  const Index m = cov.sigma.rows();
  const Index d = m + 1;
  const Index k = cov.anchor;
  if (k < 0 || k >= d) {
    throw Error(ErrorCode::InvalidArgument, "anchor index out of range");
  }
  auto full = [k](Index a) { return a < k ? a : a + 1; };
  Matrix g = Matrix::Zero(d, d);
  for (Index a = 0; a < m; ++a) {
    g(full(a), k) = g(k, full(a)) = cov.sigma(a, a);
    for (Index b = 0; b < m; ++b) {
      if (a == b) continue;
      g(full(a), full(b)) = cov.sigma(a, a) + cov.sigma(b, b) - 2.0 * cov.sigma(a, b);
    }
  }
  return Variogram(symmetrize_zero_diag(g));
}

Matrix cayley_menger(const Variogram& gamma) {
  const Index d = gamma.dim();
  Matrix cm = Matrix::Zero(d + 1, d + 1);
  cm.topLeftCorner(d, d) = -0.5 * gamma.matrix();
  cm.topRightCorner(d, 1).setOnes();
  cm.bottomLeftCorner(1, d).setConstant(-1.0);
  return cm;
}

CayleyMengerBlocks cm_inverse_blocks(const Variogram& gamma) {
  const Index d = gamma.dim();
  const Covariance cov = gamma_to_sigma(gamma);
  CayleyMengerBlocks out;
  out.theta = rank_deficient_pinv(cov.sigma);
  const Vector xi = cov.sigma.diagonal();
  const Vector ones_d = Vector::Constant(d, 1.0 / static_cast<double>(d));
  out.r = 0.5 * out.theta * xi + ones_d;
  out.r_squared = 0.5 * xi.dot(out.r + ones_d);
#ifndef NDEBUG
  const Matrix direct = cayley_menger(gamma).inverse();
  assert((direct - out.assemble()).cwiseAbs().maxCoeff() <
         1e-6 * std::max(1.0, direct.cwiseAbs().maxCoeff()));
#endif
  return out;
}

Matrix hyperplane_basis(Index d) {
  require_dim(d);
  Matrix h = Matrix::Zero(d, d - 1);
  for (Index k = 1; k < d; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    h.col(k - 1).head(k).setConstant(1.0 / norm);
    h(k, k - 1) = -static_cast<double>(k) / norm;
  }
  return h;
}

Variogram project_variogram(const Matrix& gamma, double clip) {
  const Index d = gamma.rows();
  if (gamma.cols() != d) throw Error(ErrorCode::InvalidDimension, "variogram must be square");
  const Matrix sym = symmetrize_zero_diag(gamma);
  const Matrix p = projection_matrix(d);
  const Matrix h = hyperplane_basis(d);
  const Matrix sigma = p * (-0.5 * sym) * p;
  const Matrix reduced = h.transpose() * sigma * h;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (reduced + reduced.transpose()));
  const Vector& ev = eig.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0)) {
    throw Error(ErrorCode::Infeasible, "variogram projection failed: no positive eigenvalue");
  }
  if (ev(0) >= clip * lmax) return Variogram(sym);
  const Vector clipped = ev.cwiseMax(clip * lmax);
  const Matrix& v = eig.eigenvectors();
  const Matrix projected = h * (v * clipped.asDiagonal() * v.transpose()) * h.transpose();
  const Vector xi = projected.diagonal();
  Matrix out = xi * Vector::Ones(d).transpose() + Vector::Ones(d) * xi.transpose() - 2.0 * projected;
  return Variogram(symmetrize_zero_diag(out));
}

bool is_valid_variogram(const Variogram& gamma, double tol) {
  const Index d = gamma.dim();
  const Matrix p = projection_matrix(d);
  const Matrix sigma = p * (-0.5 * gamma.matrix()) * p;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma + sigma.transpose()));
  const Vector& ev = eig.eigenvalues();
  const double lmax = ev(d - 1);
  if (lmax <= 0.0) return false;
  return ev(0) >= -tol * lmax && ev(1) > tol * lmax;
}

bool in_natural_space(const PrecisionModel& model, double tol) {
  const Matrix& theta = model.theta();
  const Index d = theta.rows();
  const Matrix block = delete_index(theta, d - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  return lmax > 0.0 && ev(0) > tol * lmax;
}

std::optional<double> log_cofactor_det(const Matrix& theta, Index k) {
  const Matrix block = delete_index(theta, k);
  Eigen::LLT<Matrix> llt(block);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vector diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) return std::nullopt;
  return 2.0 * diag.array().log().sum();
}

}  // namespace colorhr
