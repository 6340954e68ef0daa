#pragma once

#include "colorhr/graph.hpp"
#include "colorhr/matrix_core.hpp"

#include <cstdint>
#include <vector>

namespace colorhr {

enum class IncrementKind {
  Gaussian,  // N(-variance/2, variance)
  Laplace,   // Laplace(log(1 - b^2), b) with b^2 = variance/2, requires variance < 2
  Constant,  // point mass at `value`; variance zero
};

struct IncrementDistribution {
  IncrementKind kind = IncrementKind::Gaussian;
  double variance = 1.0;
  double value = 0.0;  // Constant only
};

/// One distribution per color class, indexed by class.
struct IncrementSpec {
  std::vector<IncrementDistribution> classes;
};

/// n draws of Y^k = E 1 + W^k (k 0-based). Column k holds E exactly.
Matrix sample_extremal_function(const Variogram& gamma, Index k, Index n, std::uint64_t seed);

/// n draws of the spectral vector W ~ N(P(-Gamma/2)1, P(-Gamma/2)P); rows sum to zero.
Matrix sample_spectral(const Variogram& gamma, Index n, std::uint64_t seed);

/// n draws of W^k on a colored tree rooted at k: W_i = sum of the increments on
/// the path from the root to i, with increments i.i.d. within a color class.
/// `coloring` must be colored on the same tree.
Matrix sample_colored_tree(const RootedTree& tree, const ColoredGraph& coloring,
                           const IncrementSpec& spec, Index n, std::uint64_t seed);

/// Extremal variogram of sample_colored_tree: the tree metric of the class variances.
Variogram colored_tree_variogram(const ColoredGraph& coloring, const IncrementSpec& spec);

/// n raw observations X = E 1 + W with W a spectral draw. Their threshold
/// exceedances approach the Pareto model of Gamma as the threshold grows.
Matrix sample_domain_of_attraction(const Variogram& gamma, Index n, std::uint64_t seed);

/// Symmetric square root of a symmetric PSD matrix (negative eigenvalues clipped to 0).
Matrix symmetric_sqrt(const Matrix& sym);

}  // namespace colorhr
