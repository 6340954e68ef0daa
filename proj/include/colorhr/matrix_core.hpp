#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace colorhr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultValidityTol = 1e-8;
// Relative eigenvalue cutoff separating the structural null direction of a
// rank d-1 matrix from the rest of the spectrum.
inline constexpr double kPseudoInverseCutoff = 1e-9;

/// Symmetric zero-diagonal matrix of squared extremal increments.
///
/// Construction only checks the shape (square, symmetric, zero diagonal).
/// Conditional negative definiteness is probed with is_valid_variogram(),
/// since empirical variograms and fitting iterates may violate it.
class Variogram {
 public:
  Variogram() = default;
  explicit Variogram(Matrix gamma);

  const Matrix& matrix() const noexcept { return gamma_; }
  Index dim() const noexcept { return gamma_.rows(); }
  double operator()(Index i, Index j) const { return gamma_(i, j); }

 private:
  Matrix gamma_;
};

/// Signed Laplacian Theta = D - Q together with its weighted adjacency Q.
class PrecisionModel {
 public:
  PrecisionModel() = default;

  /// From a symmetric zero-diagonal weighted adjacency matrix.
  static PrecisionModel from_adjacency(Matrix q);
  /// From a symmetric matrix with vanishing row sums.
  static PrecisionModel from_laplacian(Matrix theta);

  const Matrix& theta() const noexcept { return theta_; }
  const Matrix& adjacency() const noexcept { return q_; }
  Index dim() const noexcept { return q_.rows(); }

 private:
  Matrix q_;
  Matrix theta_;
};

/// Rank d-1 covariance of the spectral vector W (rows sum to zero).
struct Covariance {
  Matrix sigma;
};

/// Covariance of the k-th extremal function, indexed by [d] \ {k}.
struct AnchoredCovariance {
  Matrix sigma;  // (d-1) x (d-1)
  Index anchor = 0;
};

/// Blocks of the inverse Cayley-Menger matrix [[Theta, -r], [r^T, -R^2]].
struct CayleyMengerBlocks {
  Matrix theta;
  Vector r;
  double r_squared = 0.0;

  Matrix assemble() const;
};

Matrix projection_matrix(Index d);

/// Sigma = P(-Gamma/2)P. Throws InvalidParameter when Gamma is not
/// conditionally negative definite.
Covariance gamma_to_sigma(const Variogram& gamma);
PrecisionModel sigma_to_theta(const Covariance& sigma);
Variogram theta_to_gamma(const PrecisionModel& model);
PrecisionModel gamma_to_theta(const Variogram& gamma);

/// Farris transform anchored at k (0-based).
AnchoredCovariance farris(const Variogram& gamma, Index k);
/// Inverse Farris transform.
Variogram farris_inverse(const AnchoredCovariance& cov);

Matrix cayley_menger(const Variogram& gamma);
CayleyMengerBlocks cm_inverse_blocks(const Variogram& gamma);

/// Moore-Penrose inverse of a symmetric PSD matrix of rank exactly d-1.
Matrix rank_deficient_pinv(const Matrix& sym);

bool is_valid_variogram(const Variogram& gamma, double tol = kDefaultValidityTol);
/// Cofactor block positive definite, with the smallest eigenvalue above tol
/// times the largest; by default the pseudo-inverse cutoff, so that models on
/// the boundary of a projected variogram still count as members.
bool in_natural_space(const PrecisionModel& model, double tol = kPseudoInverseCutoff);

/// log det of the cofactor block Theta_{/k,/k}; nullopt when that block is
/// not positive definite.
std::optional<double> log_cofactor_det(const Matrix& theta, Index k);

/// Matrix with row and column k removed.
Matrix delete_index(const Matrix& m, Index k);

/// Nearest valid variogram obtained by raising the eigenvalues of
/// P(-Gamma/2)P on the hyperplane to at least clip * (largest eigenvalue).
/// Throws Infeasible when no eigenvalue is positive.
Variogram project_variogram(const Matrix& gamma, double clip = kDefaultValidityTol);

/// Orthonormal basis (d x (d-1)) of the hyperplane orthogonal to the ones vector.
Matrix hyperplane_basis(Index d);

/// Symmetric part with an exactly zero diagonal.
Matrix symmetrize_zero_diag(const Matrix& m);

/// Apply the same relabelling to rows and columns: out(p[i], p[j]) = m(i, j).
Matrix permute_symmetric(const Matrix& m, const std::vector<Index>& perm);

}  // namespace colorhr
