#include "colorhr/rvar.hpp"

#include "colorhr/error.hpp"
#include "colorhr/likelihood.hpp"

#include <cmath>
#include <sstream>

namespace colorhr {

namespace {

Matrix edge_class_indicator(const ColoredGraph& coloring) {
  Matrix c = Matrix::Zero(static_cast<Index>(coloring.graph().num_edges()), coloring.num_colors());
  for (std::size_t e = 0; e < coloring.colors().size(); ++e) c(e, coloring.colors()[e]) = 1.0;
  return c;
}

Matrix edge_values_matrix(const Graph& g, std::span<const double> values) {
  Matrix m = Matrix::Zero(g.dim(), g.dim());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [u, v] = g.edges()[e];
    m(u, v) = m(v, u) = values[e];
  }
  return m;
}

}  // namespace

std::optional<Completion> complete_variogram(const Graph& g, std::span<const double> edge_values,
                                             const Vector* warm_weights) {
  if (edge_values.size() != g.num_edges()) {
    throw Error(ErrorCode::InvalidArgument, "one value per edge required for completion");
  }
  if (!g.is_connected()) throw Error(ErrorCode::Structure, "completion requires a connected graph");
  for (double v : edge_values) {
    if (!(v > 0.0)) return std::nullopt;
  }
  const ColoredGraph trivial = ColoredGraph::trivial(g);
  FitOptions opts;
  opts.score_tol = kCompletionTol;
  opts.max_iter = kCompletionMaxIter;
  if (warm_weights && warm_weights->size() == static_cast<Index>(g.num_edges())) {
    opts.start = *warm_weights;
  } else {
    Vector w(static_cast<Index>(g.num_edges()));
    for (std::size_t e = 0; e < g.num_edges(); ++e) w(e) = 1.0 / edge_values[e];
    opts.start = w;
  }
  RconFit fit = fit_rcon(edge_values_matrix(g, edge_values), trivial, opts);
  if (!fit.report.converged && warm_weights) {
    // A warm start from a distant iterate can stall; retry from the tree-like start.
    return complete_variogram(g, edge_values, nullptr);
  }
  if (!fit.report.converged) return std::nullopt;
  return Completion{fit.model, fit.gamma, fit.report.estimate, fit.report.iterations};
}

GraphicalFit fit_graphical_mle(const Matrix& empirical_variogram, const Graph& g) {
  if (!g.is_connected()) throw Error(ErrorCode::Structure, "graphical fit requires a connected graph");
  FitOptions opts;
  opts.score_tol = kCompletionTol;
  opts.max_iter = kCompletionMaxIter;
  RconFit fit = fit_rcon(empirical_variogram, ColoredGraph::trivial(g), opts);
  if (!fit.report.converged) {
    // Retry from the positive start 1/Gamma before declaring the data infeasible.
    std::vector<double> values(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      values[e] = empirical_variogram(g.edges()[e].u, g.edges()[e].v);
    }
    auto completion = complete_variogram(g, values, nullptr);
    if (!completion) {
      throw Error(ErrorCode::Infeasible,
                  "edge variogram values admit no valid completion (" + fit.report.message + ")");
    }
    fit.model = completion->model;
    fit.gamma = completion->gamma;
    fit.report.estimate = completion->edge_weights;
    fit.report.converged = true;
    fit.report.status = FitStatus::Converged;
    fit.report.final_score_norm =
        rcon_score_at(fit.gamma.matrix(), empirical_variogram, ColoredGraph::trivial(g)).lpNorm<1>();
    fit.report.loglik = loglik(fit.model, empirical_variogram);
  }
  return GraphicalFit{fit.model, fit.gamma, fit.report};
}

std::vector<double> rvar_edge_values(const Vector& nu, const ColoredGraph& coloring) {
  if (nu.size() != coloring.num_colors()) {
    std::ostringstream os;
    os << "parameter vector has length " << nu.size() << " but the coloring has "
       << coloring.num_colors() << " classes";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  std::vector<double> values(coloring.graph().num_edges());
  for (std::size_t e = 0; e < values.size(); ++e) values[e] = nu(coloring.colors()[e]);
  return values;
}

std::optional<Completion> complete_rvar(const Vector& nu, const ColoredGraph& coloring,
                                        const Vector* warm_weights) {
  const auto values = rvar_edge_values(nu, coloring);
  return complete_variogram(coloring.graph(), values, warm_weights);
}

Vector dual_score_at(const Matrix& completed_adjacency, const Matrix& step1_adjacency,
                     const ColoredGraph& coloring) {
  Vector s = Vector::Zero(coloring.num_colors());
  const auto& edges = coloring.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    s(coloring.colors()[e]) += 0.5 * (completed_adjacency(u, v) - step1_adjacency(u, v));
  }
  return s;
}

Vector dual_score(const Vector& nu, const Matrix& step1_adjacency, const ColoredGraph& coloring) {
  const auto completion = complete_rvar(nu, coloring);
  if (!completion) throw Error(ErrorCode::Infeasible, "nu admits no valid completion");
  return dual_score_at(completion->model.adjacency(), step1_adjacency, coloring);
}

Matrix dual_information_at(const Matrix& theta, const ColoredGraph& coloring) {
  const auto& edges = coloring.graph().edges();
  const Index m = static_cast<Index>(edges.size());
  Matrix pair(m, m);
  for (Index a = 0; a < m; ++a) {
    const auto [u, v] = edges[a];
    for (Index b = a; b < m; ++b) {
      const auto [s, t] = edges[b];
      pair(a, b) = pair(b, a) = 0.25 * (theta(u, t) * theta(v, s) + theta(u, s) * theta(v, t));
    }
  }
  const Matrix c = edge_class_indicator(coloring);
  return c.transpose() * pair * c;
}

Matrix dual_information(const Vector& nu, const ColoredGraph& coloring) {
  const auto completion = complete_rvar(nu, coloring);
  if (!completion) throw Error(ErrorCode::Infeasible, "nu admits no valid completion");
  return dual_information_at(completion->model.theta(), coloring);
}

double rvar_dual_loglik(const Vector& nu, const Matrix& step1_adjacency, const ColoredGraph& coloring) {
  const auto completion = complete_rvar(nu, coloring);
  if (!completion) throw Error(ErrorCode::Infeasible, "nu admits no valid completion");
  return dual_loglik(completion->gamma, step1_adjacency);
}

Vector default_rvar_start(const Matrix& empirical_variogram, const ColoredGraph& coloring) {
  Vector nu = Vector::Zero(coloring.num_colors());
  const auto& edges = coloring.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    nu(coloring.colors()[e]) += empirical_variogram(edges[e].u, edges[e].v);
  }
  for (int c = 0; c < coloring.num_colors(); ++c) {
    nu(c) /= static_cast<double>(coloring.color_class(c).size());
  }
  return nu;
}

namespace {

struct DualState {
  Vector nu;
  Completion completion;
  double objective = 0.0;
  Vector score;
};

std::optional<DualState> evaluate_dual(const Vector& nu, const Matrix& q_hat, const ColoredGraph& coloring,
                                       const Vector* warm) {
  auto completion = complete_rvar(nu, coloring, warm);
  if (!completion) return std::nullopt;
  DualState s{nu, std::move(*completion), 0.0, {}};
  try {
    s.objective = dual_loglik(s.completion.gamma, q_hat);
  } catch (const Error&) {
    return std::nullopt;
  }
  s.score = dual_score_at(s.completion.model.adjacency(), q_hat, coloring);
  return s;
}

}  // namespace

RvarFit fit_rvar_dual(const Matrix& q_hat, const Vector& start, const ColoredGraph& coloring,
                      const FitOptions& options) {
  if (start.size() != coloring.num_colors()) {
    throw Error(ErrorCode::InvalidArgument, "start value length does not match the coloring");
  }
  RvarFit out;
  FitReport& report = out.report;
  auto state = evaluate_dual(start, q_hat, coloring, nullptr);
  if (!state) {
    report.estimate = start;
    report.status = FitStatus::Diverged;
    report.message = "start value admits no valid completion";
    return out;
  }
  report.objective_trace.push_back(state->objective);

  for (;;) {
    if (state->score.lpNorm<1>() < options.score_tol) {
      report.converged = true;
      report.status = FitStatus::Converged;
      break;
    }
    if (report.iterations >= options.max_iter) {
      report.status = FitStatus::MaxIterations;
      report.message = "iteration limit reached";
      break;
    }
    const Vector& s = state->score;
    const Matrix info = dual_information_at(state->completion.model.theta(), coloring);
    const Vector direction = (info + s * s.transpose()).ldlt().solve(s);
    const double slack = 1e-12 * (1.0 + std::abs(state->objective));

    std::optional<DualState> next;
    double step = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      auto candidate = evaluate_dual(state->nu + step * direction, q_hat, coloring,
                                     &state->completion.edge_weights);
      if (candidate && candidate->objective >= state->objective - slack) {
        next = std::move(candidate);
        break;
      }
    }
    if (!next) {
      report.status = FitStatus::Diverged;
      report.message = "no feasible ascent step after step-halving";
      break;
    }
    state = std::move(next);
    ++report.iterations;
    report.objective_trace.push_back(state->objective);
  }

  report.estimate = state->nu;
  report.final_score_norm = state->score.lpNorm<1>();
  report.dual_loglik = state->objective;
  out.model = state->completion.model;
  out.gamma = state->completion.gamma;
  return out;
}

RvarFit fit_rvar(const Matrix& empirical_variogram, const ColoredGraph& coloring,
                 const FitOptions& options) {
  if (empirical_variogram.rows() != coloring.dim() || empirical_variogram.cols() != coloring.dim()) {
    throw Error(ErrorCode::InvalidDimension, "variogram dimension does not match the graph");
  }
  GraphicalFit step1 = fit_graphical_mle(empirical_variogram, coloring.graph());
  const Vector start = options.start ? *options.start : default_rvar_start(empirical_variogram, coloring);
  RvarFit out = fit_rvar_dual(step1.model.adjacency(), start, coloring, options);
  out.step1 = std::move(step1);
  if (out.report.status != FitStatus::Diverged || out.report.iterations > 0) {
    out.report.loglik = loglik(out.model, empirical_variogram);
  }
  return out;
}

}  // namespace colorhr
