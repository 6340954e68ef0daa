#pragma once

#include "colorhr/graph.hpp"
#include "colorhr/rcon.hpp"

#include <optional>
#include <span>

namespace colorhr {

/// Graphical completion: Gamma agrees with the prescribed values on the edges
/// and Q vanishes off the edges.
struct Completion {
  PrecisionModel model;
  Variogram gamma;
  Vector edge_weights;  // Q on the edges, aligned with graph.edges()
  int iterations = 0;
};

inline constexpr double kCompletionTol = 1e-10;
inline constexpr int kCompletionMaxIter = 200;

/// Solve the completion for edge values aligned with g.edges(). Returns
/// nullopt when no completion exists or the solver fails to reach it.
std::optional<Completion> complete_variogram(const Graph& g, std::span<const double> edge_values,
                                             const Vector* warm_weights = nullptr);

struct GraphicalFit {
  PrecisionModel model;
  Variogram gamma;
  FitReport report;
};

/// Step one of the mixed dual estimator: the graphical surrogate MLE, i.e. the
/// RCON fit with every edge in its own class. Throws Infeasible when the edge
/// data admit no completion.
GraphicalFit fit_graphical_mle(const Matrix& empirical_variogram, const Graph& g);

/// Edge values for the RVAR parameter nu (Gamma_uv = nu_{lambda(uv)}).
std::vector<double> rvar_edge_values(const Vector& nu, const ColoredGraph& coloring);

/// Q(nu) via completion; nullopt when nu is infeasible.
std::optional<Completion> complete_rvar(const Vector& nu, const ColoredGraph& coloring,
                                        const Vector* warm_weights = nullptr);

/// S_i = (1/2) sum over class i of (Q_uv(nu) - Q~_uv).
Vector dual_score(const Vector& nu, const Matrix& step1_adjacency, const ColoredGraph& coloring);
Vector dual_score_at(const Matrix& completed_adjacency, const Matrix& step1_adjacency,
                     const ColoredGraph& coloring);

/// Negative Hessian of the dual log-likelihood in nu with off-edge Gamma held
/// fixed: (1/4) sum sum (Theta_ut Theta_vs + Theta_us Theta_vt).
///
/// The positive sign is the one confirmed by the one-edge closed form and by
/// finite differences; a leading minus sign is sometimes quoted for this
/// expression and is wrong.
Matrix dual_information(const Vector& nu, const ColoredGraph& coloring);
Matrix dual_information_at(const Matrix& theta, const ColoredGraph& coloring);

/// Dual log-likelihood of the completed Gamma(nu) against Q~.
double rvar_dual_loglik(const Vector& nu, const Matrix& step1_adjacency, const ColoredGraph& coloring);

/// Per-class average of the empirical variogram on the edges.
Vector default_rvar_start(const Matrix& empirical_variogram, const ColoredGraph& coloring);

struct RvarFit {
  GraphicalFit step1;
  FitReport report;
  PrecisionModel model;
  Variogram gamma;
};

/// Two-step surrogate mixed dual estimate: graphical MLE, then reciprocal
/// scoring nu <- nu + (I + S S^T)^{-1} S with per-iterate completion.
RvarFit fit_rvar(const Matrix& empirical_variogram, const ColoredGraph& coloring,
                 const FitOptions& options = {});

/// Step two alone, given a step-one adjacency.
RvarFit fit_rvar_dual(const Matrix& step1_adjacency, const Vector& start, const ColoredGraph& coloring,
                      const FitOptions& options = {});

}  // namespace colorhr
