#pragma once

#include "colorhr/graph.hpp"
#include "colorhr/matrix_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace colorhr {

struct FitOptions {
  std::optional<Vector> start;
  double score_tol = 1e-6;  // l1 norm of the scores
  int max_iter = 200;
  int max_halvings = 30;
};

enum class FitStatus { Converged, MaxIterations, Diverged };

const char* to_string(FitStatus status);

struct FitReport {
  Vector estimate;
  int iterations = 0;
  double final_score_norm = 0.0;
  double loglik = 0.0;  // surrogate log-likelihood at the estimate
  bool converged = false;
  FitStatus status = FitStatus::MaxIterations;
  std::string message;
  // Objective after each accepted iterate, starting with the start value.
  // For RCON the surrogate log-likelihood, for RVAR the dual log-likelihood.
  std::vector<double> objective_trace;
  std::optional<double> dual_loglik;
};

struct RconFit {
  FitReport report;
  PrecisionModel model;
  Variogram gamma;
};

/// Q(omega): omega_{lambda(uv)} on edges, zero elsewhere.
PrecisionModel expand_coloring(const Vector& omega, const ColoredGraph& coloring);

/// t_i = -(1/2) sum over class i of Gamma~_uv.
Vector sufficient_stat(const Matrix& sample_variogram, const ColoredGraph& coloring);

/// S_i = (1/2) sum over class i of (Gamma_uv(omega) - Gamma~_uv).
Vector rcon_score(const Vector& omega, const Matrix& sample_variogram, const ColoredGraph& coloring);

/// Information matrix I(omega); depends on omega only.
Matrix rcon_information(const Vector& omega, const ColoredGraph& coloring);

/// Same quantities from an already computed Gamma(omega).
Vector rcon_score_at(const Matrix& fitted_gamma, const Matrix& sample_variogram,
                     const ColoredGraph& coloring);
Matrix rcon_information_at(const Matrix& fitted_gamma, const ColoredGraph& coloring);

/// l(omega; t(Gamma~)).
double rcon_loglik(const Vector& omega, const Matrix& sample_variogram, const ColoredGraph& coloring);

/// Per-class average of the empirical precision on the edges; falls back to
/// per-class averages of 1/Gamma_uv when the projection or the resulting
/// Q(omega) is infeasible.
Vector default_rcon_start(const Matrix& empirical_variogram, const ColoredGraph& coloring);

/// Stabilized scoring iteration omega <- omega + (I + S S^T)^{-1} S with
/// step-halving on infeasibility or likelihood decrease.
RconFit fit_rcon(const Matrix& empirical_variogram, const ColoredGraph& coloring,
                 const FitOptions& options = {});

}  // namespace colorhr
