#pragma once

#include "colorhr/matrix_core.hpp"

namespace colorhr {

// Objectives keep the proportional normalization: additive constants that do
// not depend on the parameter are dropped, except in kl(), which keeps all
// terms so that it is exactly nonnegative.

/// <Gamma, Q> summed over the upper triangle i < j.
double inner(const Matrix& gamma, const Matrix& q);

/// A(Q) = -(1/2) log det Theta_{/d,/d}. Throws OutsideNaturalSpace.
double log_partition(const PrecisionModel& model);

/// l(Q; Gamma~) = (1/2) log det Theta_{/d,/d} - (1/2) <Gamma~, Q>.
double loglik(const PrecisionModel& model, const Matrix& sample_variogram);

/// dl/dQ_uv = (1/2)(Gamma_uv(Q) - Gamma~_uv) for u != v (symmetric, zero diagonal).
Matrix loglik_gradient(const PrecisionModel& model, const Matrix& sample_variogram);

/// log det CM(Gamma), computed as log det of the Farris covariance at k = d.
double log_det_cayley_menger(const Variogram& gamma);

/// A*(Gamma) = -(d-1)/2 - (1/2) log det CM(Gamma).
double fenchel_dual(const Variogram& gamma);

/// KL(Gamma1, Q2) = (1/2)<Gamma1, Q2> + A*(Gamma1) + A(Q2).
double kl(const Variogram& gamma1, const PrecisionModel& model2);

/// Dual log-likelihood (1/2) log det CM(Gamma) - (1/2) <Gamma, Q~>.
double dual_loglik(const Variogram& gamma, const Matrix& sample_adjacency);

/// d dual / dGamma_uv = (1/2)(Q_uv(Gamma) - Q~_uv).
Matrix dual_loglik_gradient(const Variogram& gamma, const Matrix& sample_adjacency);

}  // namespace colorhr
