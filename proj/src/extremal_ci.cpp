#include "colorhr/extremal_ci.hpp"

#include "colorhr/error.hpp"
#include "colorhr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace colorhr {

namespace {

void validate_indices(Index d, int i, int j, std::span<const int> cond) {
  auto in_range = [d](int v) { return v >= 0 && v < d; };
  if (!in_range(i) || !in_range(j)) throw Error(ErrorCode::InvalidArgument, "vertex out of range");
  if (i == j) throw Error(ErrorCode::InvalidArgument, "i and j must differ");
  if (cond.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "empty conditioning set: the Cayley-Menger criterion needs C nonempty");
  }
  std::vector<int> sorted(cond.begin(), cond.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, "conditioning set has repeated vertices");
  }
  for (int c : sorted) {
    if (!in_range(c)) throw Error(ErrorCode::InvalidArgument, "conditioning vertex out of range");
    if (c == i || c == j) {
      std::ostringstream os;
      os << "conditioning set overlaps {i, j} at vertex " << c + 1;
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
}

std::vector<Index> augmented(Index d, int head, std::span<const int> cond) {
  std::vector<Index> idx(cond.begin(), cond.end());
  idx.push_back(head);
  std::sort(idx.begin(), idx.end());
  idx.push_back(d);
  return idx;
}

double minor_det(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix sub(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) sub(a, b) = m(rows[a], cols[b]);
  return sub.partialPivLu().determinant();
}

}  // namespace

double ci_minor(const Variogram& gamma, int i, int j, std::span<const int> cond) {
  const Index d = gamma.dim();
  validate_indices(d, i, j, cond);
  const Matrix cm = cayley_menger(gamma);
  return minor_det(cm, augmented(d, i, cond), augmented(d, j, cond));
}

double ci_statistic(const Variogram& gamma, int i, int j, std::span<const int> cond) {
  const Index d = gamma.dim();
  validate_indices(d, i, j, cond);
  const Matrix cm = cayley_menger(gamma);
  const auto rows = augmented(d, i, cond);
  const auto cols = augmented(d, j, cond);
  const double num = minor_det(cm, rows, cols);
  const double pi = minor_det(cm, rows, rows);
  const double pj = minor_det(cm, cols, cols);
  if (!(pi > 0.0) || !(pj > 0.0)) {
    throw Error(ErrorCode::InvalidParameter,
                "principal Cayley-Menger minors must be positive for a valid variogram");
  }
  return num / std::sqrt(pi * pj);
}

bool ci_test(const Variogram& gamma, int i, int j, std::span<const int> cond, double tol) {
  return std::abs(ci_statistic(gamma, i, j, cond)) < tol;
}

Variogram gamma_from_q_forests(const PrecisionModel& model) {
  const Matrix& q = model.adjacency();
  const int d = static_cast<int>(q.rows());
  std::vector<Edge> edges;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      if (q(a, b) != 0.0) edges.emplace_back(a, b);
  const Graph g(d, edges);
  if (!g.is_connected()) {
    throw Error(ErrorCode::Structure, "support graph of Q is disconnected");
  }
  auto weight = [&](const EdgeSubset& subset) {
    double p = 1.0;
    for (int e : subset) p *= q(g.edges()[e].u, g.edges()[e].v);
    return p;
  };
  double tree_sum = 0.0;
  for (const auto& t : spanning_trees(g)) tree_sum += weight(t);
  Matrix out = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      double forest_sum = 0.0;
      for (const auto& f : separating_forests(g, a, b)) forest_sum += weight(f);
      out(a, b) = out(b, a) = forest_sum / tree_sum;
    }
  }
  return Variogram(out);
}

}  // namespace colorhr
