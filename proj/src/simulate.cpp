#include "colorhr/simulate.hpp"

#include "colorhr/error.hpp"
#include "colorhr/random.hpp"

#include <cmath>
#include <sstream>

namespace colorhr {

Matrix symmetric_sqrt(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

void check_valid(const Variogram& gamma) {
  if (!is_valid_variogram(gamma)) {
    throw Error(ErrorCode::InvalidParameter, "variogram is not conditionally negative definite");
  }
}

void check_count(Index n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "sample size must be nonnegative");
}

// Rows of mean + L z with z standard normal.
Matrix gaussian_rows(const Vector& mean, const Matrix& factor, Index n, CounterRng& rng) {
  const Index p = mean.size();
  Matrix z(p, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < p; ++c) z(c, r) = rng.normal();
  }
  Matrix out = (factor * z).transpose();
  out.rowwise() += mean.transpose();
  return out;
}

double draw_increment(const IncrementDistribution& dist, CounterRng& rng) {
  switch (dist.kind) {
    case IncrementKind::Gaussian:
      return -0.5 * dist.variance + std::sqrt(dist.variance) * rng.normal();
    case IncrementKind::Laplace: {
      const double b = std::sqrt(0.5 * dist.variance);
      const double u = rng.uniform() - 0.5;
      const double sample = -b * std::copysign(1.0, u) * std::log(1.0 - 2.0 * std::abs(u));
      return std::log(1.0 - b * b) + sample;
    }
    case IncrementKind::Constant:
      return dist.value;
  }
  return 0.0;
}

void check_spec(const IncrementSpec& spec, int num_colors) {
  if (static_cast<int>(spec.classes.size()) < num_colors) {
    std::ostringstream os;
    os << "increment spec covers " << spec.classes.size() << " classes but the coloring has "
       << num_colors;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& dist = spec.classes[c];
    if (dist.kind == IncrementKind::Constant) continue;
    if (!(dist.variance > 0.0) || !std::isfinite(dist.variance)) {
      throw Error(ErrorCode::InvalidParameter,
                  "increment variance of class " + std::to_string(c + 1) + " must be positive");
    }
    if (dist.kind == IncrementKind::Laplace && dist.variance >= 2.0) {
      throw Error(ErrorCode::InvalidParameter,
                  "laplace increments need variance < 2 for a finite exponential moment");
    }
  }
}

}  // namespace

Matrix sample_extremal_function(const Variogram& gamma, Index k, Index n, std::uint64_t seed) {
  const Index d = gamma.dim();
  if (k < 0 || k >= d) throw Error(ErrorCode::InvalidArgument, "anchor index out of range");
  check_count(n);
  check_valid(gamma);
  const AnchoredCovariance cov = farris(gamma, k);
  const Matrix factor = symmetric_sqrt(cov.sigma);
  const Vector mean = -0.5 * cov.sigma.diagonal();

  CounterRng rng(seed);
  const Matrix w = gaussian_rows(mean, factor, n, rng);
  Matrix y(n, d);
  for (Index r = 0; r < n; ++r) {
    const double e = rng.exponential();
    Index c = 0;
    for (Index i = 0; i < d; ++i) {
      y(r, i) = (i == k) ? e : e + w(r, c++);
    }
  }
  return y;
}

Matrix sample_spectral(const Variogram& gamma, Index n, std::uint64_t seed) {
  check_count(n);
  check_valid(gamma);
  const Index d = gamma.dim();
  const Matrix p = projection_matrix(d);
  const Matrix half = -0.5 * gamma.matrix();
  const Matrix sigma = p * half * p;
  const Vector mean = p * half * Vector::Ones(d);
  CounterRng rng(seed);
  Matrix w = gaussian_rows(mean, symmetric_sqrt(sigma), n, rng);
  // Remove rounding drift off the hyperplane.
  w.colwise() -= w.rowwise().mean();
  return w;
}

Matrix sample_colored_tree(const RootedTree& tree, const ColoredGraph& coloring,
                           const IncrementSpec& spec, Index n, std::uint64_t seed) {
  check_count(n);
  if (coloring.graph().edges() != tree.tree.edges() || coloring.dim() != tree.tree.dim()) {
    throw Error(ErrorCode::Structure, "coloring is not defined on the sampled tree");
  }
  check_spec(spec, coloring.num_colors());
  const int d = tree.tree.dim();
  CounterRng rng(seed);
  Matrix w = Matrix::Zero(n, d);
  for (Index r = 0; r < n; ++r) {
    for (std::size_t a = 0; a < tree.directed.size(); ++a) {
      const auto [from, to] = tree.directed[a];
      const int cls = coloring.colors()[tree.directed_edge_index[a]];
      // BFS order guarantees the parent is already filled in.
      w(r, to) = w(r, from) + draw_increment(spec.classes[cls], rng);
    }
  }
  return w;
}

Variogram colored_tree_variogram(const ColoredGraph& coloring, const IncrementSpec& spec) {
  check_spec(spec, coloring.num_colors());
  std::vector<double> values(coloring.graph().num_edges());
  for (std::size_t e = 0; e < values.size(); ++e) {
    const auto& dist = spec.classes[coloring.colors()[e]];
    values[e] = dist.kind == IncrementKind::Constant ? 0.0 : dist.variance;
  }
  return tree_metric_complete(coloring.graph(), values);
}

Matrix sample_domain_of_attraction(const Variogram& gamma, Index n, std::uint64_t seed) {
  Matrix x = sample_spectral(gamma, n, seed);
  CounterRng rng = CounterRng(seed).substream(1);
  for (Index r = 0; r < n; ++r) x.row(r).array() += rng.exponential();
  return x;
}

}  // namespace colorhr
