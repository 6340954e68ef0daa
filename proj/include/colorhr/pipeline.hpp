#pragma once

#include "colorhr/graph.hpp"
#include "colorhr/matrix_core.hpp"
#include "colorhr/rcon.hpp"

#include <optional>
#include <span>
#include <vector>

namespace colorhr {

/// Columnwise rank transform x -> -log(1 - rank/(n+1)), average ranks for ties.
/// Throws DegenerateMargin on a constant column.
Matrix to_exponential_margins(const Matrix& raw);

/// Observations shifted by the threshold u = -log(1 - p); only rows with a
/// positive entry are kept.
struct ExceedanceSample {
  Matrix y;
  double p = 0.0;
  double u = 0.0;

  Index n() const noexcept { return y.rows(); }
  Index dim() const noexcept { return y.cols(); }
};

double exceedance_threshold(double p);

/// Throws InvalidArgument for p outside (0, 1) and EstimatorUndefined when no
/// row exceeds the threshold.
ExceedanceSample threshold_exceedances(const Matrix& exp_data, double p);

/// Average over anchors k of the centered second moments of the differences
/// among rows with y_k > 0; anchors with fewer than two such rows contribute
/// zero. The sum is divided by d regardless.
Matrix empirical_variogram(const ExceedanceSample& sample);
Matrix empirical_variogram(const Matrix& y);

/// Same estimator with anchor k restricted to its own block of rows, e.g.
/// block k holding draws of Y^k. Requires one block per coordinate.
Matrix empirical_variogram_blocks(std::span<const Matrix> blocks);

/// Per-anchor term for a single set of rows.
Matrix anchor_variogram(const Matrix& y, Index k);

/// gamma_to_theta after projecting onto the valid variograms.
PrecisionModel empirical_precision(const Matrix& empirical_variogram);

struct PamResult {
  std::vector<int> colors;       // class of each item, classes ordered by medoid value
  std::vector<int> medoids;      // item index of each class medoid
  double objective = 0.0;        // sum of |stat - medoid stat|
  std::vector<double> objective_trace;  // after BUILD, then after every accepted SWAP
};

/// Partitioning around medoids on scalars with absolute-difference dissimilarity.
/// Deterministic: ties are resolved by the lowest item index.
PamResult pam(std::span<const double> stats, int k);

/// Edge coloring with k classes; throws InvalidArgument when k is not in [1, |E|].
std::vector<int> pam_edges(std::span<const double> edge_stats, int k);

/// Scalar statistic per edge used for data-driven colorings: the empirical
/// precision weight for RCON, the empirical variogram value for RVAR.
enum class ModelKind { Rcon, Rvar };
std::vector<double> edge_statistics(const Matrix& empirical_variogram, const Graph& g, ModelKind kind);

struct ValidationScore {
  double total = 0.0;           // n_exceedances * l(Q; Gamma_val)
  double per_exceedance = 0.0;  // l(Q; Gamma_val)
  Index exceedances = 0;
};

ValidationScore validation_loglik(const PrecisionModel& model, const ExceedanceSample& validation);
ValidationScore validation_loglik(const PrecisionModel& model, const Matrix& validation_variogram,
                                  Index exceedances);

/// Chronological split: the first floor(train_frac * n) rows train.
std::pair<Matrix, Matrix> split_rows(const Matrix& raw, double train_frac);

struct SweepOptions {
  ModelKind model = ModelKind::Rcon;
  int kmax = 1;
  double p = 0.85;
  double train_frac = 0.5;
  FitOptions fit;
};

struct SweepRow {
  int k = 0;
  int num_params = 0;
  std::vector<int> colors;
  FitReport report;
  PrecisionModel model;
  double train_loglik = 0.0;  // total over training exceedances
  ValidationScore validation;
  bool ok = false;            // false when the fit failed outright
  std::string error;
};

struct SweepResult {
  Graph graph;
  Matrix train_variogram;
  Matrix validation_variogram;
  Index train_exceedances = 0;
  Index validation_exceedances = 0;
  std::vector<SweepRow> rows;
  /// Index into rows of the largest validation total among successful fits.
  std::optional<std::size_t> best;
};

/// Fit colorings k = 1..kmax on the training split and score them on the
/// validation split. Without a graph, the minimum spanning tree of the
/// training variogram is used.
SweepResult run_sweep(const Matrix& raw, const std::optional<Graph>& graph, const SweepOptions& options);

}  // namespace colorhr
