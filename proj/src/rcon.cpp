#include "colorhr/rcon.hpp"

#include "colorhr/error.hpp"
#include "colorhr/likelihood.hpp"

#include <cmath>
#include <sstream>

namespace colorhr {

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max-iterations";
    case FitStatus::Diverged: return "diverged";
  }
  return "unknown";
}

namespace {

void check_shapes(const Matrix& gamma, const ColoredGraph& coloring) {
  if (gamma.rows() != coloring.dim() || gamma.cols() != coloring.dim()) {
    std::ostringstream os;
    os << "variogram is " << gamma.rows() << "x" << gamma.cols() << " but the graph has "
       << coloring.dim() << " vertices";
    throw Error(ErrorCode::InvalidDimension, os.str());
  }
}

Matrix edge_class_indicator(const ColoredGraph& coloring) {
  Matrix c = Matrix::Zero(static_cast<Index>(coloring.graph().num_edges()), coloring.num_colors());
  for (std::size_t e = 0; e < coloring.colors().size(); ++e) c(e, coloring.colors()[e]) = 1.0;
  return c;
}

struct State {
  Vector omega;
  PrecisionModel model;
  Matrix gamma;
  double loglik = 0.0;
  Vector score;
};

std::optional<State> evaluate(const Vector& omega, const Matrix& data, const ColoredGraph& coloring) {
  State s;
  s.omega = omega;
  s.model = expand_coloring(omega, coloring);
  const auto logdet = log_cofactor_det(s.model.theta(), s.model.dim() - 1);
  if (!logdet) return std::nullopt;
  try {
    s.gamma = theta_to_gamma(s.model).matrix();
  } catch (const Error&) {
    return std::nullopt;
  }
  s.loglik = 0.5 * *logdet - 0.5 * inner(data, s.model.adjacency());
  s.score = rcon_score_at(s.gamma, data, coloring);
  return s;
}

}  // namespace

PrecisionModel expand_coloring(const Vector& omega, const ColoredGraph& coloring) {
  if (omega.size() != coloring.num_colors()) {
    std::ostringstream os;
    os << "parameter vector has length " << omega.size() << " but the coloring has "
       << coloring.num_colors() << " classes";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const int d = coloring.dim();
  Matrix q = Matrix::Zero(d, d);
  const auto& edges = coloring.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    q(edges[e].u, edges[e].v) = q(edges[e].v, edges[e].u) = omega(coloring.colors()[e]);
  }
  return PrecisionModel::from_adjacency(std::move(q));
}

Vector sufficient_stat(const Matrix& sample_variogram, const ColoredGraph& coloring) {
  check_shapes(sample_variogram, coloring);
  Vector t = Vector::Zero(coloring.num_colors());
  const auto& edges = coloring.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    t(coloring.colors()[e]) -= 0.5 * sample_variogram(edges[e].u, edges[e].v);
  }
  return t;
}

Vector rcon_score_at(const Matrix& fitted_gamma, const Matrix& sample_variogram,
                     const ColoredGraph& coloring) {
  Vector s = Vector::Zero(coloring.num_colors());
  const auto& edges = coloring.graph().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    s(coloring.colors()[e]) += 0.5 * (fitted_gamma(u, v) - sample_variogram(u, v));
  }
  return s;
}

Matrix rcon_information_at(const Matrix& g, const ColoredGraph& coloring) {
  const auto& edges = coloring.graph().edges();
  const Index m = static_cast<Index>(edges.size());
  Matrix pair(m, m);
  for (Index a = 0; a < m; ++a) {
    const auto [u, v] = edges[a];
    for (Index b = a; b < m; ++b) {
      const auto [s, t] = edges[b];
      const double x = g(s, v) - g(u, s) - g(t, v) + g(u, t);
      pair(a, b) = pair(b, a) = 0.125 * x * x;
    }
  }
  const Matrix c = edge_class_indicator(coloring);
  return c.transpose() * pair * c;
}

Vector rcon_score(const Vector& omega, const Matrix& sample_variogram, const ColoredGraph& coloring) {
  check_shapes(sample_variogram, coloring);
  const PrecisionModel model = expand_coloring(omega, coloring);
  if (!log_cofactor_det(model.theta(), model.dim() - 1)) {
    throw Error(ErrorCode::OutsideNaturalSpace, "Q(omega) is outside the natural parameter space");
  }
  return rcon_score_at(theta_to_gamma(model).matrix(), sample_variogram, coloring);
}

Matrix rcon_information(const Vector& omega, const ColoredGraph& coloring) {
  const PrecisionModel model = expand_coloring(omega, coloring);
  if (!log_cofactor_det(model.theta(), model.dim() - 1)) {
    throw Error(ErrorCode::OutsideNaturalSpace, "Q(omega) is outside the natural parameter space");
  }
  return rcon_information_at(theta_to_gamma(model).matrix(), coloring);
}

double rcon_loglik(const Vector& omega, const Matrix& sample_variogram, const ColoredGraph& coloring) {
  check_shapes(sample_variogram, coloring);
  return loglik(expand_coloring(omega, coloring), sample_variogram);
}

Vector default_rcon_start(const Matrix& empirical_variogram, const ColoredGraph& coloring) {
  check_shapes(empirical_variogram, coloring);
  const auto& edges = coloring.graph().edges();
  const int r = coloring.num_colors();
  auto class_average = [&](auto value) {
    Vector w = Vector::Zero(r);
    for (std::size_t e = 0; e < edges.size(); ++e) w(coloring.colors()[e]) += value(edges[e]);
    for (int c = 0; c < r; ++c) w(c) /= static_cast<double>(coloring.color_class(c).size());
    return w;
  };
  try {
    const PrecisionModel empirical = gamma_to_theta(project_variogram(empirical_variogram));
    const Matrix& q = empirical.adjacency();
    Vector w = class_average([&](const Edge& e) { return q(e.u, e.v); });
    const PrecisionModel candidate = expand_coloring(w, coloring);
    if (log_cofactor_det(candidate.theta(), candidate.dim() - 1) && w.allFinite()) return w;
  } catch (const Error&) {
  }
  return class_average([&](const Edge& e) { return 1.0 / empirical_variogram(e.u, e.v); });
}

RconFit fit_rcon(const Matrix& data, const ColoredGraph& coloring, const FitOptions& options) {
  check_shapes(data, coloring);
  for (const Edge& e : coloring.graph().edges()) {
    if (!(data(e.u, e.v) > 0.0)) {
      std::ostringstream os;
      os << "empirical variogram must be positive on edge (" << e.u + 1 << "," << e.v + 1 << ")";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  const Vector start = options.start ? *options.start : default_rcon_start(data, coloring);
  if (start.size() != coloring.num_colors()) {
    throw Error(ErrorCode::InvalidArgument, "start value length does not match the coloring");
  }

  RconFit out;
  FitReport& report = out.report;
  auto state = evaluate(start, data, coloring);
  if (!state) {
    report.estimate = start;
    report.status = FitStatus::Diverged;
    report.message = "start value is outside the natural parameter space";
    return out;
  }
  report.objective_trace.push_back(state->loglik);

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
    const Matrix info = rcon_information_at(state->gamma, coloring);
    const Matrix system = info + s * s.transpose();
    const Vector direction = system.ldlt().solve(s);
    const double slack = 1e-12 * (1.0 + std::abs(state->loglik));

    std::optional<State> next;
    double step = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      auto candidate = evaluate(state->omega + step * direction, data, coloring);
      if (candidate && candidate->loglik >= state->loglik - slack) {
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
    report.objective_trace.push_back(state->loglik);
  }

  report.estimate = state->omega;
  report.final_score_norm = state->score.lpNorm<1>();
  report.loglik = state->loglik;
  out.model = state->model;
  out.gamma = Variogram(state->gamma);
  return out;
}

}  // namespace colorhr
