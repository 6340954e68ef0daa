#pragma once

#include "colorhr/matrix_core.hpp"

#include <span>

namespace colorhr {

inline constexpr double kDefaultCiTol = 1e-8;

/// Minor of CM(Gamma) with rows {i} u C u {d+1} and columns {j} u C u {d+1},
/// each taken in ascending order with the augmented index last.
/// Vertices are 0-based; C must be nonempty and disjoint from {i, j}.
double ci_minor(const Variogram& gamma, int i, int j, std::span<const int> cond);

/// ci_minor divided by sqrt of the two matching principal minors. Invariant
/// under Gamma -> c * Gamma.
double ci_statistic(const Variogram& gamma, int i, int j, std::span<const int> cond);

/// Extremal conditional independence of Y_i and Y_j given Y_C.
bool ci_test(const Variogram& gamma, int i, int j, std::span<const int> cond,
             double tol = kDefaultCiTol);

/// Gamma from spanning-forest sums of Q over its support graph (d <= 12).
Variogram gamma_from_q_forests(const PrecisionModel& model);

}  // namespace colorhr
