#include "colorhr/error.hpp"
#include "colorhr/extremal_ci.hpp"
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

// Partial covariance of Sigma^(k) for the pair (i, j) given C \ {k}.
double partial_covariance(const Matrix& gamma, int i, int j, const std::vector<int>& cond, int k) {
  const Index d = gamma.rows();
  auto s = [&](int a, int b) { return 0.5 * (gamma(a, k) + gamma(b, k) - gamma(a, b)); };
  std::vector<int> rest;
  for (int c : cond)
    if (c != k) rest.push_back(c);
  const Index m = static_cast<Index>(rest.size());
  double value = s(i, j);
  if (m > 0) {
    Matrix scc(m, m);
    Vector sic(m), sjc(m);
    for (Index a = 0; a < m; ++a) {
      sic(a) = s(i, rest[a]);
      sjc(a) = s(j, rest[a]);
      for (Index b = 0; b < m; ++b) scc(a, b) = s(rest[a], rest[b]);
    }
    value -= sic.dot(scc.ldlt().solve(sjc));
  }
  (void)d;
  return value / std::sqrt(std::max(s(i, i), 1e-300) * std::max(s(j, j), 1e-300));
}

}  // namespace

TEST_CASE("path tree minor vanishes") {
  const Variogram g(path3());
  const std::vector<int> c{1};
  CHECK(std::abs(ci_minor(g, 0, 2, c)) < 1e-10);
  CHECK(ci_test(g, 0, 2, c));
}

TEST_CASE("complete graph minor does not vanish") {
  Matrix q = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  const Variogram g = theta_to_gamma(PrecisionModel::from_adjacency(q));
  const std::vector<int> c{1};
  CHECK(std::abs(ci_minor(g, 0, 2, c)) > 1e-3);
  CHECK_FALSE(ci_test(g, 0, 2, c));
  CHECK(std::abs(partial_covariance(g.matrix(), 0, 2, c, 1)) > 1e-3);
}

TEST_CASE("full conditioning matches the precision entry") {
  std::mt19937_64 rng(2);
  const Graph cycle(4, {Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(0, 3)});
  for (int rep = 0; rep < 10; ++rep) {
    Matrix q = random_adjacency(Graph::complete(4), rng, -0.3, 1.5);
    if (rep % 2 == 0) q(0, 2) = q(2, 0) = 0.0;
    const PrecisionModel m = PrecisionModel::from_adjacency(q);
    if (!in_natural_space(m)) continue;
    const Variogram g = theta_to_gamma(m);
    const std::vector<int> c{1, 3};
    CHECK(ci_test(g, 0, 2, c) == (rep % 2 == 0));
  }
  const Matrix qc = random_adjacency(cycle, rng);
  const Variogram gc = theta_to_gamma(PrecisionModel::from_adjacency(qc));
  const std::vector<int> c23{1, 2};
  CHECK(ci_test(gc, 0, 3, c23) == false);
  const std::vector<int> c13{0, 2};
  CHECK(ci_test(gc, 1, 3, c13));
}

TEST_CASE("scale invariance of the statistic") {
  std::mt19937_64 rng(6);
  const Matrix g = random_variogram(5, rng);
  const std::vector<int> c{1, 3};
  const double s1 = ci_statistic(Variogram(g), 0, 2, c);
  const double s2 = ci_statistic(Variogram(7.5 * g), 0, 2, c);
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-10));
}

TEST_CASE("argument validation") {
  const Variogram g(path3());
  const std::vector<int> empty{};
  CHECK_THROWS_AS(ci_minor(g, 0, 2, empty), Error);
  const std::vector<int> overlap{0};
  CHECK_THROWS_AS(ci_minor(g, 0, 2, overlap), Error);
  const std::vector<int> c{1};
  CHECK_THROWS_AS(ci_test(g, 0, 0, c), Error);
  CHECK_THROWS_AS(ci_test(g, 0, 5, c), Error);
}

TEST_CASE("verdict agrees with gaussian partial covariance for every anchor in C") {
  std::mt19937_64 rng(31);
  int agree = 0, total = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 4 + rep % 3;
    const Graph g = random_connected_graph(d, 0.3, rng);
    const Matrix gamma = theta_to_gamma(PrecisionModel::from_adjacency(random_adjacency(g, rng))).matrix();
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        std::vector<int> cond;
        for (int v = 0; v < d; ++v)
          if (v != i && v != j && (v + rep) % 2 == 0) cond.push_back(v);
        if (cond.empty()) continue;
        const bool verdict = ci_test(Variogram(gamma), i, j, cond);
        for (int k : cond) {
          ++total;
          agree += verdict == (std::abs(partial_covariance(gamma, i, j, cond, k)) < 1e-8);
        }
      }
  }
  CHECK(agree == total);
}

TEST_CASE("forest formula for gamma") {
  Matrix q = Matrix::Zero(2, 2);
  q(0, 1) = q(1, 0) = 0.8;
  CHECK(gamma_from_q_forests(PrecisionModel::from_adjacency(q))(0, 1) == doctest::Approx(1.25));
  Matrix tri = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  CHECK(gamma_from_q_forests(PrecisionModel::from_adjacency(tri))(0, 2) == doctest::Approx(2.0 / 3.0));
  std::mt19937_64 rng(12);
  const Graph cycle(4, {Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(0, 3)});
  for (int rep = 0; rep < 5; ++rep) {
    const PrecisionModel m = PrecisionModel::from_adjacency(random_adjacency(cycle, rng));
    CHECK(rel_err(gamma_from_q_forests(m).matrix(), oracle_gamma_from_theta(m.theta())) < 1e-9);
  }
}
