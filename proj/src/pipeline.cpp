#include "colorhr/pipeline.hpp"

#include "colorhr/error.hpp"
#include "colorhr/likelihood.hpp"
#include "colorhr/rvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace colorhr {

Matrix to_exponential_margins(const Matrix& raw) {
  const Index n = raw.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "margin standardization needs at least two rows");
  Matrix out(n, raw.cols());
  std::vector<Index> order(n);
  for (Index c = 0; c < raw.cols(); ++c) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return raw(a, c) < raw(b, c); });
    if (raw(order.front(), c) == raw(order.back(), c)) {
      throw Error(ErrorCode::DegenerateMargin, "column " + std::to_string(c + 1) + " is constant");
    }
    Index start = 0;
    while (start < n) {
      Index stop = start + 1;
      while (stop < n && raw(order[stop], c) == raw(order[start], c)) ++stop;
      // Ranks are 1-based; a tie block shares the mean of its ranks.
      const double rank = 0.5 * static_cast<double>(start + 1 + stop);
      const double value = -std::log1p(-rank / static_cast<double>(n + 1));
      for (Index t = start; t < stop; ++t) out(order[t], c) = value;
      start = stop;
    }
  }
  return out;
}

double exceedance_threshold(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold probability must lie in (0, 1)");
  return -std::log1p(-p);
}

ExceedanceSample threshold_exceedances(const Matrix& exp_data, double p) {
  const double u = exceedance_threshold(p);
  std::vector<Index> keep;
  for (Index r = 0; r < exp_data.rows(); ++r) {
    if ((exp_data.row(r).array() - u).maxCoeff() > 0.0) keep.push_back(r);
  }
  if (keep.empty()) throw Error(ErrorCode::EstimatorUndefined, "no observation exceeds the threshold");
  ExceedanceSample s;
  s.p = p;
  s.u = u;
  s.y.resize(static_cast<Index>(keep.size()), exp_data.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) s.y.row(i) = exp_data.row(keep[i]).array() - u;
  return s;
}

Matrix anchor_variogram(const Matrix& y, Index k) {
  const Index d = y.cols();
  std::vector<Index> rows;
  for (Index r = 0; r < y.rows(); ++r) {
    if (y(r, k) > 0.0) rows.push_back(r);
  }
  if (rows.size() < 2) return Matrix::Zero(d, d);
  Matrix z(static_cast<Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) z.row(i) = y.row(rows[i]);
  z.rowwise() -= z.colwise().mean();
  const Matrix c = (z.transpose() * z) / static_cast<double>(rows.size());
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = c(i, i) + c(j, j) - 2.0 * c(i, j);
  }
  // Clamp rounding noise; each entry is a variance.
  return symmetrize_zero_diag(g.cwiseMax(0.0));
}

Matrix empirical_variogram_blocks(std::span<const Matrix> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::InvalidArgument, "no data blocks given");
  const Index d = blocks.front().cols();
  if (static_cast<Index>(blocks.size()) != d) {
    throw Error(ErrorCode::InvalidDimension, "one data block per coordinate required");
  }
  if (d < 2) throw Error(ErrorCode::InvalidDimension, "variogram needs at least two coordinates");
  Matrix total = Matrix::Zero(d, d);
  bool any = false;
  for (Index k = 0; k < d; ++k) {
    const Matrix& y = blocks[k];
    if (y.cols() != d) throw Error(ErrorCode::InvalidDimension, "data blocks differ in width");
    if (!y.allFinite()) throw Error(ErrorCode::InvalidArgument, "data contain non-finite values");
    Index count = 0;
    for (Index r = 0; r < y.rows(); ++r) count += y(r, k) > 0.0 ? 1 : 0;
    if (count >= 2) {
      any = true;
      total += anchor_variogram(y, k);
    }
  }
  if (!any) {
    throw Error(ErrorCode::EstimatorUndefined, "no coordinate has at least two exceedances");
  }
  return total / static_cast<double>(d);
}

Matrix empirical_variogram(const Matrix& y) {
  std::vector<Matrix> blocks(static_cast<std::size_t>(y.cols()), y);
  return empirical_variogram_blocks(blocks);
}

Matrix empirical_variogram(const ExceedanceSample& sample) { return empirical_variogram(sample.y); }

PrecisionModel empirical_precision(const Matrix& empirical_variogram) {
  return gamma_to_theta(project_variogram(empirical_variogram));
}

namespace {

struct Assignment {
  std::vector<int> nearest;  // position in medoid list
  double cost = 0.0;
};

Assignment assign(std::span<const double> x, const std::vector<int>& medoids) {
  Assignment a;
  a.nearest.assign(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      if (static_cast<int>(i) == medoids[m]) {
        best = 0.0;
        a.nearest[i] = static_cast<int>(m);
        break;
      }
      const double dist = std::abs(x[i] - x[medoids[m]]);
      if (dist < best) {
        best = dist;
        a.nearest[i] = static_cast<int>(m);
      }
    }
    a.cost += best;
  }
  return a;
}

double cost_of(std::span<const double> x, const std::vector<int>& medoids) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int m : medoids) best = std::min(best, std::abs(x[i] - x[m]));
    total += best;
  }
  return total;
}

}  // namespace

PamResult pam(std::span<const double> x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "class count " << k << " must lie between 1 and the number of items " << n;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "clustering statistics must be finite");
  }
  std::vector<int> medoids;
  std::vector<bool> is_medoid(n, false);
  // BUILD: greedily add the item that lowers the cost most.
  for (int step = 0; step < k; ++step) {
    int best_item = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      medoids.push_back(c);
      const double cost = cost_of(x, medoids);
      medoids.pop_back();
      if (cost < best_cost) {
        best_cost = cost;
        best_item = c;
      }
    }
    medoids.push_back(best_item);
    is_medoid[best_item] = true;
  }
  PamResult result;
  double current = cost_of(x, medoids);
  result.objective_trace.push_back(current);
  // SWAP: best improving exchange until none lowers the cost.
  for (;;) {
    double best_cost = current;
    int best_m = -1;
    int best_o = -1;
    for (int m = 0; m < k; ++m) {
      for (int o = 0; o < n; ++o) {
        if (is_medoid[o]) continue;
        std::vector<int> trial = medoids;
        trial[m] = o;
        const double cost = cost_of(x, trial);
        if (cost < best_cost - 1e-12 * (1.0 + std::abs(best_cost))) {
          best_cost = cost;
          best_m = m;
          best_o = o;
        }
      }
    }
    if (best_m < 0) break;
    is_medoid[medoids[best_m]] = false;
    is_medoid[best_o] = true;
    medoids[best_m] = best_o;
    current = best_cost;
    result.objective_trace.push_back(current);
  }
  std::sort(medoids.begin(), medoids.end(), [&](int a, int b) { return x[a] < x[b] || (x[a] == x[b] && a < b); });
  const Assignment a = assign(x, medoids);
  result.colors = a.nearest;
  result.medoids = medoids;
  result.objective = a.cost;
  return result;
}

std::vector<int> pam_edges(std::span<const double> edge_stats, int k) { return pam(edge_stats, k).colors; }

std::vector<double> edge_statistics(const Matrix& empirical_variogram, const Graph& g, ModelKind kind) {
  std::vector<double> stats(g.num_edges());
  if (kind == ModelKind::Rcon) {
    const Matrix q = empirical_precision(empirical_variogram).adjacency();
    for (std::size_t e = 0; e < stats.size(); ++e) stats[e] = q(g.edges()[e].u, g.edges()[e].v);
  } else {
    for (std::size_t e = 0; e < stats.size(); ++e) {
      stats[e] = empirical_variogram(g.edges()[e].u, g.edges()[e].v);
    }
  }
  return stats;
}

ValidationScore validation_loglik(const PrecisionModel& model, const Matrix& validation_variogram,
                                  Index exceedances) {
  ValidationScore s;
  s.exceedances = exceedances;
  s.per_exceedance = loglik(model, validation_variogram);
  s.total = static_cast<double>(exceedances) * s.per_exceedance;
  return s;
}

ValidationScore validation_loglik(const PrecisionModel& model, const ExceedanceSample& validation) {
  if (validation.dim() != model.dim()) {
    throw Error(ErrorCode::InvalidDimension, "validation data and model differ in dimension");
  }
  return validation_loglik(model, empirical_variogram(validation), validation.n());
}

std::pair<Matrix, Matrix> split_rows(const Matrix& raw, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "training fraction must lie in (0, 1)");
  }
  const Index n_train = static_cast<Index>(std::floor(train_frac * static_cast<double>(raw.rows())));
  if (n_train < 2 || raw.rows() - n_train < 2) {
    throw Error(ErrorCode::InvalidArgument, "both splits need at least two rows");
  }
  return {raw.topRows(n_train), raw.bottomRows(raw.rows() - n_train)};
}

SweepResult run_sweep(const Matrix& raw, const std::optional<Graph>& graph, const SweepOptions& options) {
  const auto [train_raw, val_raw] = split_rows(raw, options.train_frac);
  const ExceedanceSample train = threshold_exceedances(to_exponential_margins(train_raw), options.p);
  const ExceedanceSample val = threshold_exceedances(to_exponential_margins(val_raw), options.p);

  SweepResult result;
  result.train_variogram = empirical_variogram(train);
  result.validation_variogram = empirical_variogram(val);
  result.train_exceedances = train.n();
  result.validation_exceedances = val.n();
  if (graph) {
    if (graph->dim() != raw.cols()) {
      throw Error(ErrorCode::InvalidDimension, "graph and data differ in dimension");
    }
    result.graph = *graph;
  } else {
    result.graph = minimum_spanning_tree(result.train_variogram);
  }
  const Graph& g = result.graph;
  if (!g.is_connected()) throw Error(ErrorCode::Structure, "sweep requires a connected graph");
  if (options.kmax < 1 || options.kmax > static_cast<int>(g.num_edges())) {
    std::ostringstream os;
    os << "kmax " << options.kmax << " must lie between 1 and the edge count " << g.num_edges();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const auto stats = edge_statistics(result.train_variogram, g, options.model);

  for (int k = 1; k <= options.kmax; ++k) {
    SweepRow row;
    row.k = k;
    row.num_params = k;
    row.colors = pam_edges(stats, k);
    const ColoredGraph cg(g, row.colors);
    try {
      if (options.model == ModelKind::Rcon) {
        RconFit fit = fit_rcon(result.train_variogram, cg, options.fit);
        row.report = fit.report;
        row.model = fit.model;
        row.ok = fit.report.status != FitStatus::Diverged || fit.report.iterations > 0;
      } else {
        RvarFit fit = fit_rvar(result.train_variogram, cg, options.fit);
        row.report = fit.report;
        row.model = fit.model;
        row.ok = fit.report.status != FitStatus::Diverged || fit.report.iterations > 0;
      }
      if (row.ok) {
        row.train_loglik = static_cast<double>(train.n()) * loglik(row.model, result.train_variogram);
        row.validation = validation_loglik(row.model, result.validation_variogram, val.n());
      } else {
        row.error = row.report.message;
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    if (row.ok && (!result.best || row.validation.total > result.rows[*result.best].validation.total)) {
      result.best = result.rows.size();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace colorhr
