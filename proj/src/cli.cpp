#include "colorhr/cli.hpp"

#include "colorhr/error.hpp"
#include "colorhr/extremal_ci.hpp"
#include "colorhr/io.hpp"
#include "colorhr/likelihood.hpp"
#include "colorhr/pipeline.hpp"
#include "colorhr/rcon.hpp"
#include "colorhr/rvar.hpp"
#include "colorhr/simulate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

namespace colorhr {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string gamma, graph, data, spec, q, out, model = "rcon", kind = "extremal", k = "1";
  double p = 0.85;
  bool p_given = false;
  double train_frac = 0.5;
  double tol = 1e-6;
  double ci_tol = kDefaultCiTol;
  int max_iter = 200;
  int kmax = 1;
  long long n = 1000;
  std::uint64_t seed = 1;
  int i = 0, j = 0;
  std::vector<int> cond;
  std::vector<double> start;
};

// Raised for a fit that ran but did not converge; files are still written.
struct NumericalFailure {
  nlohmann::json diagnostic;
};

Variogram load_variogram(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  try {
    return Variogram(m);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
}

void check_dim(Index d, int graph_d, const std::string& gamma_path, const std::string& graph_path) {
  if (d != graph_d) {
    std::ostringstream os;
    os << "dimension mismatch: " << gamma_path << " is " << d << "x" << d << " but " << graph_path
       << " has " << graph_d << " vertices";
    throw Error(ErrorCode::InvalidDimension, os.str());
  }
}

std::vector<std::string> coordinate_names(Index d) {
  std::vector<std::string> names;
  for (Index i = 0; i < d; ++i) names.push_back("y" + std::to_string(i + 1));
  return names;
}

ModelKind parse_model(const std::string& s) {
  if (s == "rcon") return ModelKind::Rcon;
  if (s == "rvar") return ModelKind::Rvar;
  throw Error(ErrorCode::InvalidArgument, "--model must be rcon or rvar, got '" + s + "'");
}

FitOptions fit_options(const Options& o) {
  FitOptions f;
  f.score_tol = o.tol;
  f.max_iter = o.max_iter;
  if (!o.start.empty()) f.start = Eigen::Map<const Vector>(o.start.data(), static_cast<Index>(o.start.size()));
  return f;
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(10) << "[";
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Variogram gamma = load_variogram(o.gamma);
  const Index d = gamma.dim();
  if (o.n < 1) throw Error(ErrorCode::InvalidArgument, "--n must be positive");
  DataTable t;
  t.names = coordinate_names(d);
  if (o.kind == "spectral") {
    t.values = sample_spectral(gamma, o.n, o.seed);
  } else if (o.kind == "raw") {
    t.values = sample_domain_of_attraction(gamma, o.n, o.seed);
  } else if (o.kind == "extremal") {
    if (o.k == "all") {
      t.names.insert(t.names.begin(), "anchor");
      t.values.resize(d * o.n, d + 1);
      for (Index k = 0; k < d; ++k) {
        const Matrix y = sample_extremal_function(gamma, k, o.n, o.seed + static_cast<std::uint64_t>(k));
        t.values.block(k * o.n, 0, o.n, 1).setConstant(static_cast<double>(k + 1));
        t.values.block(k * o.n, 1, o.n, d) = y;
      }
    } else {
      int k = 0;
      try {
        k = std::stoi(o.k);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "--k must be an index or 'all', got '" + o.k + "'");
      }
      if (k < 1 || k > d) throw Error(ErrorCode::InvalidArgument, "--k outside 1.." + std::to_string(d));
      t.values = sample_extremal_function(gamma, k - 1, o.n, o.seed);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "--kind must be extremal, spectral or raw");
  }
  write_data_csv(o.out, t);
  out << "wrote " << t.values.rows() << " rows x " << d << " coordinates to " << o.out << "\n";
  return kExitOk;
}

int cmd_simulate_tree(const Options& o, std::ostream& out) {
  const GraphFile gf = read_graph_json(o.graph);
  const ColoredGraph cg = gf.colors ? gf.colored() : ColoredGraph::monochromatic(gf.graph);
  const IncrementSpec spec = read_increment_spec(o.spec);
  int root = 0;
  try {
    root = std::stoi(o.k) - 1;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "--k must be the root index, got '" + o.k + "'");
  }
  const RootedTree tree(gf.graph, root);
  DataTable t;
  t.names = coordinate_names(gf.graph.dim());
  t.values = sample_colored_tree(tree, cg, spec, o.n, o.seed);
  write_data_csv(o.out, t);
  out << "wrote " << t.values.rows() << " increment paths rooted at " << root + 1 << " to " << o.out << "\n";
  return kExitOk;
}

int cmd_empvario(const Options& o, std::ostream& out) {
  const DataTable t = read_data_csv(o.data);
  Matrix g;
  if (!t.names.empty() && t.names.front() == "anchor") {
    const Index d = t.values.cols() - 1;
    if (d < 2) throw Error(ErrorCode::InvalidDimension, o.data + ": need at least two coordinates");
    std::vector<std::vector<Index>> rows(d);
    for (Index r = 0; r < t.values.rows(); ++r) {
      const double a = t.values(r, 0);
      const Index k = static_cast<Index>(std::llround(a)) - 1;
      if (a != std::round(a) || k < 0 || k >= d) {
        throw Error(ErrorCode::Parse, o.data + ": anchor column must hold indices 1.." + std::to_string(d));
      }
      rows[k].push_back(r);
    }
    std::vector<Matrix> blocks(d);
    for (Index k = 0; k < d; ++k) {
      blocks[k].resize(static_cast<Index>(rows[k].size()), d);
      for (std::size_t r = 0; r < rows[k].size(); ++r) blocks[k].row(r) = t.values.row(rows[k][r]).tail(d);
    }
    g = empirical_variogram_blocks(blocks);
    out << "anchored estimator over " << t.values.rows() << " rows\n";
  } else if (o.p_given) {
    const ExceedanceSample s = threshold_exceedances(to_exponential_margins(t.values), o.p);
    g = empirical_variogram(s);
    out << "threshold u = " << s.u << ", " << s.n() << " of " << t.values.rows() << " rows exceed\n";
  } else {
    g = empirical_variogram(t.values);
    out << "exceedance-scale estimator over " << t.values.rows() << " rows\n";
  }
  write_matrix_csv(o.out, g);
  out << "wrote " << g.rows() << "x" << g.cols() << " empirical variogram to " << o.out << "\n";
  return kExitOk;
}

void write_fit(const std::string& prefix, const FitReport& report, const std::string& model,
               const PrecisionModel& pm, const Variogram& gamma, std::ostream& out) {
  const auto j = fit_report_json(report, model);
  write_json(prefix + ".json", j);
  if (pm.dim() > 0) {
    write_matrix_csv(prefix + "_q.csv", pm.adjacency());
    write_matrix_csv(prefix + "_gamma.csv", gamma.matrix());
  }
  out << "model: " << model << "\n"
      << "status: " << to_string(report.status) << "\n"
      << "iterations: " << report.iterations << "\n"
      << "estimate: " << format_vector(report.estimate) << "\n"
      << "loglik: " << std::setprecision(10) << report.loglik << "\n";
  if (report.dual_loglik) out << "dual_loglik: " << *report.dual_loglik << "\n";
  if (!report.converged) throw NumericalFailure{j};
}

int cmd_fit(const Options& o, const std::string& which, std::ostream& out) {
  const Matrix gbar = read_matrix_csv(o.gamma);
  const GraphFile gf = read_graph_json(o.graph);
  check_dim(gbar.rows(), gf.graph.dim(), o.gamma, o.graph);
  if (gbar.rows() != gbar.cols()) throw Error(ErrorCode::InvalidDimension, o.gamma + ": matrix is not square");
  const FitOptions opts = fit_options(o);
  if (which == "graph") {
    const RconFit fit = fit_rcon(gbar, ColoredGraph::trivial(gf.graph), opts);
    write_fit(o.out, fit.report, "graphical", fit.model, fit.gamma, out);
  } else if (which == "rcon") {
    const RconFit fit = fit_rcon(gbar, gf.colored(), opts);
    write_fit(o.out, fit.report, "rcon", fit.model, fit.gamma, out);
  } else {
    const RvarFit fit = fit_rvar(gbar, gf.colored(), opts);
    write_fit(o.out, fit.report, "rvar", fit.model, fit.gamma, out);
  }
  return kExitOk;
}

int cmd_ci_test(const Options& o, std::ostream& out) {
  const Variogram gamma = load_variogram(o.gamma);
  std::vector<int> cond;
  for (int c : o.cond) cond.push_back(c - 1);
  const bool independent = ci_test(gamma, o.i - 1, o.j - 1, cond, o.ci_tol);
  out << "independent: " << (independent ? "true" : "false") << "\n"
      << "statistic: " << std::setprecision(10) << ci_statistic(gamma, o.i - 1, o.j - 1, cond) + 0.0 << "\n";
  return kExitOk;
}

int cmd_loglik(const Options& o, std::ostream& out) {
  const Matrix gbar = read_matrix_csv(o.gamma);
  const Matrix q = read_matrix_csv(o.q);
  if (gbar.rows() != q.rows() || gbar.cols() != q.cols()) {
    throw Error(ErrorCode::InvalidDimension, "dimension mismatch between " + o.gamma + " and " + o.q);
  }
  const PrecisionModel pm = PrecisionModel::from_adjacency(q);
  out << "loglik: " << std::setprecision(12) << loglik(pm, gbar) << "\n";
  return kExitOk;
}

int cmd_color_edges(const Options& o, std::ostream& out) {
  const Matrix gbar = read_matrix_csv(o.gamma);
  const GraphFile gf = read_graph_json(o.graph);
  check_dim(gbar.rows(), gf.graph.dim(), o.gamma, o.graph);
  int k = 0;
  try {
    k = std::stoi(o.k);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "--k must be a class count, got '" + o.k + "'");
  }
  const auto stats = edge_statistics(gbar, gf.graph, parse_model(o.model));
  const auto colors = pam_edges(stats, k);
  write_json(o.out, graph_json(gf.graph, &colors));
  out << "colors:";
  for (int c : colors) out << " " << c + 1;
  out << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const DataTable t = read_data_csv(o.data);
  std::optional<Graph> graph;
  if (!o.graph.empty()) graph = read_graph_json(o.graph).graph;
  SweepOptions so;
  so.model = parse_model(o.model);
  so.kmax = o.kmax;
  so.p = o.p;
  so.train_frac = o.train_frac;
  so.fit = fit_options(o);
  const SweepResult r = run_sweep(t.values, graph, so);

  std::ostringstream tsv;
  tsv << std::setprecision(12)
      << "k\tparams\ttrain_loglik\tval_loglik\tval_loglik_per_exceedance\tconverged\titerations\n";
  std::ostringstream curve;
  curve << std::setprecision(12) << "k,val_loglik\n";
  for (const auto& row : r.rows) {
    if (row.ok) {
      tsv << row.k << '\t' << row.num_params << '\t' << row.train_loglik << '\t' << row.validation.total << '\t'
          << row.validation.per_exceedance << '\t' << (row.report.converged ? "true" : "false") << '\t'
          << row.report.iterations << '\n';
      curve << row.k << ',' << row.validation.total << '\n';
    } else {
      tsv << row.k << '\t' << row.num_params << "\tnan\tnan\tnan\tfalse\t" << row.report.iterations << '\n';
      curve << row.k << ",nan\n";
    }
    auto j = fit_report_json(row.report, o.model);
    j["k"] = row.k;
    j["graph"] = graph_json(r.graph, &row.colors);
    if (!row.ok) j["error"] = row.error;
    write_json(o.out + "_k" + std::to_string(row.k) + ".json", j);
  }
  write_text(o.out + ".tsv", tsv.str());
  write_text(o.out + "_curve.csv", curve.str());
  out << "training exceedances: " << r.train_exceedances << "\n"
      << "validation exceedances: " << r.validation_exceedances << "\n";
  if (r.best) out << "best k: " << r.rows[*r.best].k << "\n";
  out << "wrote " << r.rows.size() << " rows to " << o.out << ".tsv\n";
  if (!r.best) throw NumericalFailure{{{"error", "no coloring could be fitted"}}};
  return kExitOk;
}

void add_gamma(CLI::App* c, Options& o) {
  c->add_option("--gamma", o.gamma, "matrix CSV (headerless)")->required();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Colored Husler-Reiss graphical models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::map<std::string, CLI::App*> cmds;
  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed"); };
  auto fit_flags = [&](CLI::App* c) {
    c->add_option("--tol", o.tol, "l1 score tolerance");
    c->add_option("--max-iter", o.max_iter, "iteration limit");
  };

  auto* sim = app.add_subcommand("simulate", "sample extremal functions, spectral or raw vectors");
  add_gamma(sim, o);
  sim->add_option("--k", o.k, "anchor index (1-based) or 'all'");
  sim->add_option("--n", o.n, "draws (per anchor for --k all)");
  sim->add_option("--kind", o.kind, "extremal | spectral | raw");
  sim->add_option("--out", o.out, "output data CSV")->required();
  seed(sim);
  cmds["simulate"] = sim;

  auto* simt = app.add_subcommand("simulate-tree", "sample colored tree increments");
  simt->add_option("--graph", o.graph, "tree JSON")->required();
  simt->add_option("--spec", o.spec, "increment spec JSON")->required();
  simt->add_option("--k", o.k, "root index (1-based)");
  simt->add_option("--n", o.n, "draws");
  simt->add_option("--out", o.out, "output data CSV")->required();
  seed(simt);
  cmds["simulate-tree"] = simt;

  auto* emp = app.add_subcommand("empvario", "empirical variogram of a data CSV");
  emp->add_option("--data", o.data, "data CSV with header")->required();
  emp->add_option("--p", o.p, "standardize margins and threshold at probability p")
      ->each([&](const std::string&) { o.p_given = true; });
  emp->add_option("--out", o.out, "output matrix CSV")->required();
  seed(emp);
  cmds["empvario"] = emp;

  for (const char* name : {"fit-graph", "fit-rcon", "fit-rvar"}) {
    auto* f = app.add_subcommand(name, std::string("fit ") + (name + 4) + " model");
    add_gamma(f, o);
    f->add_option("--graph", o.graph, "graph JSON")->required();
    f->add_option("--out", o.out, "output prefix")->required();
    fit_flags(f);
    if (std::string(name) == "fit-rcon") {
      f->add_option("--omega0", o.start, "start value, comma separated")->delimiter(',');
    } else if (std::string(name) == "fit-rvar") {
      f->add_option("--nu0", o.start, "start value, comma separated")->delimiter(',');
    }
    seed(f);
    cmds[name] = f;
  }

  auto* ci = app.add_subcommand("ci-test", "extremal conditional independence test");
  add_gamma(ci, o);
  ci->add_option("--i", o.i, "first index (1-based)")->required();
  ci->add_option("--j", o.j, "second index (1-based)")->required();
  ci->add_option("--cond", o.cond, "conditioning indices, comma separated")->required()->delimiter(',');
  ci->add_option("--tol", o.ci_tol, "tolerance on the normalized minor");
  seed(ci);
  cmds["ci-test"] = ci;

  auto* ll = app.add_subcommand("loglik", "surrogate log-likelihood of Q under an empirical variogram");
  add_gamma(ll, o);
  ll->add_option("--q", o.q, "weighted adjacency CSV")->required();
  seed(ll);
  cmds["loglik"] = ll;

  auto* col = app.add_subcommand("color-edges", "k-medoids edge coloring");
  add_gamma(col, o);
  col->add_option("--graph", o.graph, "graph JSON")->required();
  col->add_option("--k", o.k, "number of classes")->required();
  col->add_option("--model", o.model, "rcon | rvar");
  col->add_option("--out", o.out, "output colored graph JSON")->required();
  seed(col);
  cmds["color-edges"] = col;

  auto* sw = app.add_subcommand("sweep", "validation likelihood over colorings k = 1..kmax");
  sw->add_option("--data", o.data, "raw data CSV with header, rows in time order")->required();
  sw->add_option("--graph", o.graph, "graph JSON (default: minimum spanning tree)");
  sw->add_option("--p", o.p, "threshold probability");
  sw->add_option("--train-frac", o.train_frac, "leading fraction of rows used for training");
  sw->add_option("--kmax", o.kmax, "largest class count")->required();
  sw->add_option("--model", o.model, "rcon | rvar");
  sw->add_option("--out", o.out, "output prefix")->required();
  fit_flags(sw);
  seed(sw);
  cmds["sweep"] = sw;

  if (!args.empty() && args.front().rfind("-", 0) != 0 && !cmds.count(args.front())) {
    err << "usage error: unknown subcommand '" << args.front() << "'\n";
    return kExitUsage;
  }

  std::vector<std::string> argv_store;
  argv_store.push_back("colorhr");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto active = app.get_subcommands().front()->get_name();
    if (active == "simulate") return cmd_simulate(o, out);
    if (active == "simulate-tree") return cmd_simulate_tree(o, out);
    if (active == "empvario") return cmd_empvario(o, out);
    if (active == "fit-graph") return cmd_fit(o, "graph", out);
    if (active == "fit-rcon") return cmd_fit(o, "rcon", out);
    if (active == "fit-rvar") return cmd_fit(o, "rvar", out);
    if (active == "ci-test") return cmd_ci_test(o, out);
    if (active == "loglik") return cmd_loglik(o, out);
    if (active == "color-edges") return cmd_color_edges(o, out);
    if (active == "sweep") return cmd_sweep(o, out);
    err << "usage error: unknown subcommand '" << active << "'\n";
    return kExitUsage;
  } catch (const NumericalFailure& f) {
    err << f.diagnostic.dump() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    if (e.is_usage()) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    nlohmann::json j{{"error", to_string(e.code())}, {"message", e.what()}};
    err << j.dump() << "\n";
    return kExitNumeric;
  }
}

}  // namespace colorhr
