#include "colorhr/error.hpp"
#include "colorhr/matrix_core.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace colorhr;
using namespace testsupport;

namespace {
Matrix path3() {
  Matrix g(3, 3);
  g << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  return g;
}
Matrix single(double gamma) {
  Matrix g(2, 2);
  g << 0, gamma, gamma, 0;
  return g;
}
}  // namespace

TEST_CASE("projection matrix") {
  Matrix p2 = projection_matrix(2);
  CHECK(p2(0, 0) == doctest::Approx(0.5));
  CHECK(p2(0, 1) == doctest::Approx(-0.5));
  for (int d = 2; d <= 9; ++d) {
    const Matrix p = projection_matrix(d);
    CHECK(max_abs(p * Vector::Ones(d)) < 1e-14);
    CHECK(max_abs(p * p - p) < 1e-12);
  }
  CHECK_THROWS_AS(projection_matrix(1), Error);
}

TEST_CASE("variogram shape validation") {
  Matrix bad = path3();
  bad(0, 1) = 5;
  CHECK_THROWS_AS(Variogram{bad}, Error);
  Matrix diag = path3();
  diag(1, 1) = 0.3;
  CHECK_THROWS_AS(Variogram{diag}, Error);
  CHECK_THROWS_AS(Variogram{Matrix::Zero(2, 3)}, Error);
  CHECK_NOTHROW(Variogram{path3()});
}

TEST_CASE("gamma to sigma closed forms") {
  const Covariance s = gamma_to_sigma(Variogram(single(2.0)));
  CHECK(s.sigma(0, 0) == doctest::Approx(0.5));
  CHECK(s.sigma(0, 1) == doctest::Approx(-0.5));

  const Covariance sp = gamma_to_sigma(Variogram(path3()));
  CHECK(max_abs(sp.sigma * Vector::Ones(3)) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sp.sigma);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
  CHECK(es.eigenvalues()(1) > 1e-6);

  Matrix notcnd = single(2.0);
  notcnd *= -1;
  CHECK_THROWS_AS(gamma_to_sigma(Variogram(notcnd)), Error);
  try {
    gamma_to_sigma(Variogram(notcnd));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameter);
    CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
  }
}

TEST_CASE("sigma to theta and back for d = 2") {
  const PrecisionModel m = sigma_to_theta(gamma_to_sigma(Variogram(single(2.0))));
  CHECK(m.theta()(0, 0) == doctest::Approx(0.5));
  CHECK(m.adjacency()(0, 1) == doctest::Approx(0.5));
  Matrix q = Matrix::Zero(2, 2);
  q(0, 1) = q(1, 0) = 0.5;
  CHECK(theta_to_gamma(PrecisionModel::from_adjacency(q))(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("rank deficiency is reported") {
  Matrix s = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(sigma_to_theta(Covariance{s}), Error);
  try {
    sigma_to_theta(Covariance{s});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficiency);
  }
}

TEST_CASE("conversions agree with independent oracles") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 60; ++rep) {
    const int d = 2 + rep % 9;
    const Matrix g = random_variogram(d, rng);
    const PrecisionModel m = gamma_to_theta(Variogram(g));
    CHECK(rel_err(m.theta(), oracle_theta_from_gamma(g)) < 1e-8);
    CHECK(rel_err(theta_to_gamma(m).matrix(), g) < 1e-10);
    const Covariance s = gamma_to_sigma(Variogram(g));
    CHECK(max_abs(m.theta() * s.sigma - projection_matrix(d)) < 1e-9);
    CHECK(max_abs(s.sigma * Vector::Ones(d)) < 1e-12);
  }
}

TEST_CASE("tree variogram has reciprocal edge weights") {
  Matrix g(4, 4);
  // claw centred at vertex 4 with edge values 1, 2, 1
  g << 0, 3, 2, 1, 3, 0, 3, 2, 2, 3, 0, 1, 1, 2, 1, 0;
  const PrecisionModel m = gamma_to_theta(Variogram(g));
  CHECK(m.adjacency()(0, 3) == doctest::Approx(1.0));
  CHECK(m.adjacency()(1, 3) == doctest::Approx(0.5));
  CHECK(m.adjacency()(2, 3) == doctest::Approx(1.0));
  CHECK(std::abs(m.adjacency()(0, 1)) < 1e-10);
}

TEST_CASE("triangle with unit weights") {
  Matrix q = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  const Variogram g = theta_to_gamma(PrecisionModel::from_adjacency(q));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(g(i, j) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("farris transform") {
  const AnchoredCovariance a = farris(Variogram(single(1.7)), 0);
  CHECK(a.sigma.rows() == 1);
  CHECK(a.sigma(0, 0) == doctest::Approx(1.7));
  const AnchoredCovariance p = farris(Variogram(path3()), 0);
  Matrix expected(2, 2);
  expected << 1, 1, 1, 2;
  CHECK(max_abs(p.sigma - expected) < 1e-14);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 2 + rep % 7;
    const Matrix g = random_variogram(d, rng);
    for (int k = 0; k < d; ++k) {
      const AnchoredCovariance c = farris(Variogram(g), k);
      CHECK(c.sigma.llt().info() == Eigen::Success);
      CHECK(rel_err(farris_inverse(c).matrix(), g) < 1e-12);
    }
  }
  CHECK_THROWS_AS(farris(Variogram(path3()), 3), Error);
}

TEST_CASE("cayley menger assembly and determinant") {
  const Matrix cm = cayley_menger(Variogram(single(2.5)));
  CHECK(cm.determinant() == doctest::Approx(2.5));
  CHECK(max_abs(cm - oracle_cm(single(2.5))) == 0.0);
  const Matrix diff = cayley_menger(Variogram(2.0 * path3())) - cayley_menger(Variogram(path3()));
  CHECK(max_abs(diff.topLeftCorner(3, 3) + 0.5 * path3()) < 1e-15);
  CHECK(max_abs(diff.col(3)) == 0.0);

  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 2 + rep % 7;
    const Matrix g = random_variogram(d, rng);
    const double det = cayley_menger(Variogram(g)).determinant();
    for (int k = 0; k < d; ++k) {
      CHECK(rel_err(det, farris(Variogram(g), k).sigma.determinant()) < 1e-9 * std::max(1.0, std::abs(det)));
    }
  }
}

TEST_CASE("inverse cayley menger blocks") {
  const CayleyMengerBlocks b = cm_inverse_blocks(Variogram(single(2.0)));
  CHECK(b.theta(0, 0) == doctest::Approx(0.5));
  CHECK(b.theta(0, 1) == doctest::Approx(-0.5));
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    const int d = 2 + rep % 9;
    const Matrix g = random_variogram(d, rng);
    const CayleyMengerBlocks c = cm_inverse_blocks(Variogram(g));
    CHECK(max_abs(c.assemble() * oracle_cm(g) - Matrix::Identity(d + 1, d + 1)) < 1e-10);
    CHECK(std::abs(c.r.sum() - 1.0) < 1e-10);
    CHECK(rel_err(c.theta, gamma_to_theta(Variogram(g)).theta()) < 1e-12);
  }
}

TEST_CASE("validity predicates") {
  CHECK(is_valid_variogram(Variogram(path3())));
  Matrix bad(3, 3);
  bad << 0, 1, 5, 1, 0, 1, 5, 1, 0;  // violates the triangle-type condition
  CHECK_FALSE(is_valid_variogram(Variogram(bad)));
  Matrix q = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  CHECK(in_natural_space(PrecisionModel::from_adjacency(q)));
  q(0, 1) = q(1, 0) = -2.0;
  CHECK_FALSE(in_natural_space(PrecisionModel::from_adjacency(q)));
  CHECK_FALSE(log_cofactor_det(laplacian(q), 2).has_value());
}

TEST_CASE("projection onto valid variograms") {
  Matrix bad(3, 3);
  bad << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  const Variogram p = project_variogram(bad);
  CHECK(is_valid_variogram(p));
  CHECK(in_natural_space(gamma_to_theta(p)));
  const Variogram again = project_variogram(p.matrix());
  CHECK(max_abs(again.matrix() - p.matrix()) < 1e-12);
  CHECK(max_abs(project_variogram(path3()).matrix() - path3()) == 0.0);
}

TEST_CASE("label permutation equivariance") {
  std::mt19937_64 rng(17);
  const Matrix g = random_variogram(6, rng);
  std::vector<Index> perm{3, 0, 5, 1, 4, 2};
  const Matrix gp = permute_symmetric(g, perm);
  CHECK(max_abs(permute_symmetric(gamma_to_sigma(Variogram(g)).sigma, perm) -
                gamma_to_sigma(Variogram(gp)).sigma) < 1e-12);
  CHECK(rel_err(permute_symmetric(gamma_to_theta(Variogram(g)).theta(), perm),
                gamma_to_theta(Variogram(gp)).theta()) < 1e-10);
}
