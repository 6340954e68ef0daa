#include "colorhr/error.hpp"
#include "colorhr/likelihood.hpp"
#include "colorhr/rcon.hpp"
#include "colorhr/rvar.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace colorhr;
using namespace testsupport;

namespace {
Matrix edge_q(double q) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = q;
  return m;
}
const Graph kEdge(2, {Edge(0, 1)});

// Dual log-likelihood with the off-edge entries of Gamma frozen at `base`.
double frozen_dual(const Vector& nu, const Matrix& base, const Matrix& q_hat, const ColoredGraph& cg) {
  Matrix g = base;
  const auto& edges = cg.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) g(edges[e].u, edges[e].v) = g(edges[e].v, edges[e].u) = nu(cg.colors()[e]);
  return dual_loglik(Variogram(g), q_hat);
}
}  // namespace

TEST_CASE("single edge dual score and information") {
  const ColoredGraph cg = ColoredGraph::trivial(kEdge);
  Vector nu(1);
  nu << 2.0;
  CHECK(std::abs(dual_score(nu, edge_q(0.5), cg)(0)) < 1e-12);
  nu << 1.0;
  CHECK(dual_score(nu, edge_q(0.5), cg)(0) == doctest::Approx(0.25));
  for (double v : {0.4, 1.0, 3.0}) {
    nu << v;
    CHECK(dual_information(nu, cg)(0, 0) == doctest::Approx(1.0 / (2.0 * v * v)));
  }
}

TEST_CASE("completion on a tree is the tree metric") {
  std::mt19937_64 rng(61);
  const Graph t = random_tree(6, rng);
  std::vector<double> vals{0.5, 1.0, 2.0, 0.7, 1.3};
  const auto c = complete_variogram(t, vals);
  REQUIRE(c);
  CHECK(rel_err(c->gamma.matrix(), tree_metric_complete(t, vals).matrix()) < 1e-9);
  for (std::size_t e = 0; e < t.num_edges(); ++e)
    CHECK(c->model.adjacency()(t.edges()[e].u, t.edges()[e].v) == doctest::Approx(1.0 / vals[e]));
}

TEST_CASE("completion on the decomposable five node graph") {
  const Graph g = five_node_colored().graph();
  // Clique {1,2,3} and clique {3,4,5} share vertex 3.
  const std::vector<double> vals{1.0, 1.5, 2.0, 0.8, 1.2, 1.1};
  const auto c = complete_variogram(g, vals);
  REQUIRE(c);
  const Matrix& gm = c->gamma.matrix();
  for (int a : {0, 1})
    for (int b : {3, 4}) CHECK(gm(a, b) == doctest::Approx(gm(a, 2) + gm(2, b)).epsilon(1e-9));
  for (std::size_t e = 0; e < g.num_edges(); ++e) CHECK(gm(g.edges()[e].u, g.edges()[e].v) == doctest::Approx(vals[e]));
}

TEST_CASE("infeasible completion") {
  const Graph tri = Graph::complete(3);
  const std::vector<double> vals{1.0, 1.0, 5.0};
  CHECK_FALSE(complete_variogram(tri, vals).has_value());
  Matrix bad(3, 3);
  bad << 0, 1, 1, 1, 0, 5, 1, 5, 0;
  CHECK_THROWS_AS(fit_graphical_mle(bad, tri), Error);
}

TEST_CASE("graphical mle") {
  std::mt19937_64 rng(62);
  const Matrix data = random_variogram(5, rng);
  const GraphicalFit full = fit_graphical_mle(data, Graph::complete(5));
  CHECK(rel_err(full.gamma.matrix(), data) < 1e-8);
  CHECK(rel_err(full.model.theta(), gamma_to_theta(Variogram(data)).theta()) < 1e-6);
  const Graph t = random_tree(5, rng);
  const GraphicalFit tree = fit_graphical_mle(data, t);
  for (const auto& e : t.edges()) {
    CHECK(tree.gamma(e.u, e.v) == doctest::Approx(data(e.u, e.v)).epsilon(1e-8));
    CHECK(tree.model.adjacency()(e.u, e.v) == doctest::Approx(1.0 / data(e.u, e.v)).epsilon(1e-8));
  }
}

TEST_CASE("dual score and information against finite differences") {
  std::mt19937_64 rng(63);
  for (int rep = 0; rep < 8; ++rep) {
    const int d = 4 + rep % 3;
    const Graph g = random_connected_graph(d, 0.4, rng);
    const ColoredGraph cg(g, random_coloring(g.num_edges(), 3, rng));
    const Matrix data = random_variogram(d, rng);
    const Matrix q_hat = fit_graphical_mle(data, g).model.adjacency();
    const Vector nu = default_rvar_start(data, cg);
    const auto comp = complete_rvar(nu, cg);
    if (!comp) continue;
    const Matrix base = comp->gamma.matrix();
    auto recompleted = [&](const Vector& x) { return rvar_dual_loglik(x, q_hat, cg); };
    auto frozen = [&](const Vector& x) { return frozen_dual(x, base, q_hat, cg); };
    const Vector score = dual_score(nu, q_hat, cg);
    CHECK(rel_err(fd_gradient(recompleted, nu, 1e-5), score) < 1e-4);
    CHECK(rel_err(fd_gradient(frozen, nu, 1e-5), score) < 1e-5);
    const Matrix info = dual_information(nu, cg);
    CHECK(rel_err(-fd_hessian(frozen, nu, 1e-4), info) < 1e-4);
    Eigen::SelfAdjointEigenSolver<Matrix> es(info);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("trivial coloring returns the edge data") {
  std::mt19937_64 rng(64);
  const Graph g = random_connected_graph(5, 0.4, rng);
  const Matrix data = random_variogram(5, rng);
  const RvarFit fit = fit_rvar(data, ColoredGraph::trivial(g));
  CHECK(fit.report.converged);
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    CHECK(fit.report.estimate(e) == doctest::Approx(data(g.edges()[e].u, g.edges()[e].v)).epsilon(1e-6));
}

TEST_CASE("exchangeable triangle") {
  Matrix g = 1.7 * (Matrix::Ones(3, 3) - Matrix::Identity(3, 3));
  const RvarFit fit = fit_rvar(g, ColoredGraph::monochromatic(Graph::complete(3)));
  CHECK(fit.report.converged);
  CHECK(fit.report.estimate(0) == doctest::Approx(1.7));
}

TEST_CASE("population fixed point and dual moment matching") {
  const ColoredGraph cg = five_node_colored();
  Vector nu(3);
  nu << 1.2, 0.9, 0.6;
  const auto comp = complete_rvar(nu, cg);
  REQUIRE(comp);
  const RvarFit fit = fit_rvar(comp->gamma.matrix(), cg);
  CHECK(fit.report.converged);
  CHECK(max_abs(fit.report.estimate - nu) < 1e-8);

  std::mt19937_64 rng(65);
  const Matrix data = random_variogram(5, rng);
  const RvarFit f2 = fit_rvar(data, cg);
  REQUIRE(f2.report.converged);
  const Matrix& qh = f2.step1.model.adjacency();
  const Matrix& qv = f2.model.adjacency();
  for (int c = 0; c < cg.num_colors(); ++c) {
    double lhs = 0.0, rhs = 0.0;
    for (int e : cg.color_class(c)) {
      lhs += qv(cg.graph().edges()[e].u, cg.graph().edges()[e].v);
      rhs += qh(cg.graph().edges()[e].u, cg.graph().edges()[e].v);
    }
    CHECK(std::abs(lhs - rhs) < 1e-5);
  }
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b)
      if (!cg.graph().has_edge(a, b)) CHECK(std::abs(qv(a, b)) < 1e-8);
  for (std::size_t i = 1; i < f2.report.objective_trace.size(); ++i)
    CHECK(f2.report.objective_trace[i] >= f2.report.objective_trace[i - 1] - 1e-10);
}

TEST_CASE("trees: both estimators are reciprocal class means of the edge data") {
  // On a tree omega_i = 1 / (arithmetic mean) and nu_i = harmonic mean of the
  // class's edge values, so nu_i * omega_i = HM / AM.
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 3 + rep % 6;
    const Graph t = random_tree(d, rng);
    const ColoredGraph cg(t, random_coloring(t.num_edges(), 3, rng));
    std::vector<double> vals(t.num_edges());
    for (double& v : vals) v = u(rng);
    const Matrix data = tree_metric_complete(t, vals).matrix();
    FitOptions tight;
    tight.score_tol = 1e-9;
    const RconFit rc = fit_rcon(data, cg, tight);
    const RvarFit rv = fit_rvar(data, cg, tight);
    REQUIRE(rc.report.converged);
    REQUIRE(rv.report.converged);
    for (int c = 0; c < cg.num_colors(); ++c) {
      double am = 0.0, inv = 0.0;
      for (int e : cg.color_class(c)) {
        am += vals[e];
        inv += 1.0 / vals[e];
      }
      const double n = static_cast<double>(cg.color_class(c).size());
      CHECK(rc.report.estimate(c) == doctest::Approx(n / am).epsilon(1e-7));
      CHECK(rv.report.estimate(c) == doctest::Approx(n / inv).epsilon(1e-7));
    }
    // Data constant within classes: the estimators coincide.
    std::vector<double> cls(cg.num_colors());
    for (double& v : cls) v = u(rng);
    std::vector<double> flat(t.num_edges());
    for (std::size_t e = 0; e < flat.size(); ++e) flat[e] = cls[cg.colors()[e]];
    const Matrix flat_data = tree_metric_complete(t, flat).matrix();
    const RconFit rc2 = fit_rcon(flat_data, cg);
    const RvarFit rv2 = fit_rvar(flat_data, cg);
    for (int c = 0; c < cg.num_colors(); ++c)
      CHECK(rc2.report.estimate(c) * rv2.report.estimate(c) == doctest::Approx(1.0).epsilon(1e-7));
  }
}
