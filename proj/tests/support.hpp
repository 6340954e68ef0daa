#pragma once

// Independent reference computations and fixtures shared by the test binaries.

#include "colorhr/graph.hpp"
#include "colorhr/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace testsupport {

using colorhr::Edge;
using colorhr::Graph;
using colorhr::Index;
using colorhr::Matrix;
using colorhr::Vector;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Squared distances of d generic points in R^d: a strictly valid variogram.
inline Matrix random_variogram(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n01;
  Matrix x(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = n01(rng);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = scale * (x.row(i) - x.row(j)).squaredNorm();
  return g;
}

/// Random spanning tree on d vertices (random Pruefer-free attachment).
inline std::vector<Edge> random_tree_edges(int d, std::mt19937_64& rng) {
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> edges;
  for (int i = 1; i < d; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back(perm[i], perm[pick(rng)]);
  }
  return edges;
}

inline Graph random_tree(int d, std::mt19937_64& rng) { return Graph(d, random_tree_edges(d, rng)); }

inline Graph random_connected_graph(int d, double extra, std::mt19937_64& rng) {
  auto edges = random_tree_edges(d, rng);
  std::bernoulli_distribution coin(extra);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      if (std::find(edges.begin(), edges.end(), Edge(a, b)) == edges.end() && coin(rng)) edges.emplace_back(a, b);
  return Graph(d, edges);
}

/// Positive weights on the edges of g.
inline Matrix random_adjacency(const Graph& g, std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> w(lo, hi);
  Matrix q = Matrix::Zero(g.dim(), g.dim());
  for (const auto& e : g.edges()) q(e.u, e.v) = q(e.v, e.u) = w(rng);
  return q;
}

inline Matrix laplacian(const Matrix& q) {
  Matrix t = -q;
  for (Index i = 0; i < q.rows(); ++i) t(i, i) = q.row(i).sum();
  return t;
}

/// Gamma from Theta through the full-rank shift (Theta + J/d)^{-1} - J/d.
inline Matrix oracle_gamma_from_theta(const Matrix& theta) {
  const Index d = theta.rows();
  const Matrix j = Matrix::Constant(d, d, 1.0 / static_cast<double>(d));
  const Matrix sigma = (theta + j).inverse() - j;
  Matrix g(d, d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) g(a, b) = sigma(a, a) + sigma(b, b) - 2.0 * sigma(a, b);
  return g;
}

/// Theta from Gamma via the anchored covariance inverse, no pseudo-inverse.
inline Matrix oracle_theta_from_gamma(const Matrix& gamma) {
  const Index d = gamma.rows();
  const Index k = d - 1;
  Matrix s(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) s(a, b) = 0.5 * (gamma(a, k) + gamma(b, k) - gamma(a, b));
  const Matrix inv = s.inverse();
  Matrix theta = Matrix::Zero(d, d);
  theta.topLeftCorner(k, k) = inv;
  for (Index a = 0; a < k; ++a) {
    theta(a, k) = theta(k, a) = -inv.row(a).sum();
  }
  theta(k, k) = inv.sum();
  return theta;
}

inline Matrix oracle_cm(const Matrix& gamma) {
  const Index d = gamma.rows();
  Matrix cm = Matrix::Zero(d + 1, d + 1);
  cm.topLeftCorner(d, d) = -0.5 * gamma;
  cm.col(d).head(d).setOnes();
  cm.row(d).head(d).setConstant(-1.0);
  return cm;
}

/// All graphs on d vertices by edge bitmask.
inline std::vector<Graph> all_graphs(int d) {
  std::vector<Edge> pairs;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
  std::vector<Graph> out;
  const unsigned long total = 1UL << pairs.size();
  for (unsigned long mask = 0; mask < total; ++mask) {
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask & (1UL << e)) edges.push_back(pairs[e]);
    out.emplace_back(d, edges);
  }
  return out;
}

/// All labelled trees on d >= 2 vertices via Pruefer sequences.
inline std::vector<Graph> all_trees(int d) {
  std::vector<Graph> out;
  if (d == 2) {
    out.emplace_back(2, std::vector<Edge>{Edge(0, 1)});
    return out;
  }
  const int len = d - 2;
  std::vector<int> seq(len, 0);
  for (;;) {
    std::vector<int> degree(d, 1);
    for (int s : seq) ++degree[s];
    std::vector<Edge> edges;
    for (int s : seq) {
      for (int leaf = 0; leaf < d; ++leaf) {
        if (degree[leaf] == 1) {
          edges.emplace_back(leaf, s);
          --degree[leaf];
          --degree[s];
          break;
        }
      }
    }
    int a = -1, b = -1;
    for (int v = 0; v < d; ++v) {
      if (degree[v] == 1) (a < 0 ? a : b) = v;
    }
    edges.emplace_back(a, b);
    out.emplace_back(d, edges);
    int pos = 0;
    while (pos < len && ++seq[pos] == d) seq[pos++] = 0;
    if (pos == len) break;
  }
  return out;
}

/// Central finite-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Central finite-difference Hessian.
inline Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  const Index n = x.size();
  Matrix hs(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      auto eval = [&](double si, double sj) {
        Vector y = x;
        y(i) += si * h;
        y(j) += sj * h;
        return f(y);
      };
      hs(i, j) = hs(j, i) = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h * h);
    }
  }
  return hs;
}

/// Colored graph of five vertices: {12, 45} class 0, {13, 23} class 1, {34, 35} class 2.
inline colorhr::ColoredGraph five_node_colored() {
  Graph g(5, {Edge(0, 1), Edge(0, 2), Edge(1, 2), Edge(2, 3), Edge(2, 4), Edge(3, 4)});
  return colorhr::ColoredGraph(g, {0, 1, 1, 2, 2, 0});
}

/// Random surjective coloring with at most rmax classes.
inline std::vector<int> random_coloring(std::size_t m, int rmax, std::mt19937_64& rng) {
  const int r = std::min<int>(rmax, static_cast<int>(m));
  std::uniform_int_distribution<int> pick(1, r);
  const int used = pick(rng);
  std::vector<int> colors(m);
  for (std::size_t e = 0; e < m; ++e) colors[e] = e < static_cast<std::size_t>(used) ? static_cast<int>(e) : std::uniform_int_distribution<int>(0, used - 1)(rng);
  std::shuffle(colors.begin(), colors.end(), rng);
  return colors;
}

}  // namespace testsupport
