#include "colorhr/io.hpp"

#include "colorhr/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace colorhr {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
  out << std::setprecision(12);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

Matrix parse_rows(std::istream& in, const std::string& path, int first_line, Index expected_cols) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = first_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (expected_cols >= 0 && static_cast<Index>(fields.size()) != expected_cols) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected " << expected_cols << " fields, found " << fields.size();
      throw Error(ErrorCode::Parse, os.str());
    }
    expected_cols = static_cast<Index>(fields.size());
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_double(fields[c]);
      if (!v) {
        std::ostringstream os;
        os << path << ":" << lineno << ": field " << c + 1 << " ('" << fields[c] << "') is not a number";
        throw Error(ErrorCode::Parse, os.str());
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), std::max<Index>(expected_cols, 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<int> int_array(const nlohmann::json& j, const std::string& what, const std::string& source) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, source + ": '" + what + "' must be an array");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw Error(ErrorCode::Parse, source + ": '" + what + "' must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  Matrix m = parse_rows(in, path, 0, -1);
  if (m.rows() == 0) throw Error(ErrorCode::Parse, path + ": no data rows");
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  auto out = open_out(path);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

DataTable read_data_csv(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  while (std::getline(in, header) && trim(header).empty()) {
  }
  if (trim(header).empty()) throw Error(ErrorCode::Parse, path + ": missing header row");
  DataTable t;
  t.names = split_fields(header);
  for (const auto& name : t.names) {
    if (parse_double(name)) {
      throw Error(ErrorCode::Parse, path + ": first row must be a header of column names");
    }
  }
  t.values = parse_rows(in, path, 1, static_cast<Index>(t.names.size()));
  if (t.values.rows() == 0) throw Error(ErrorCode::Parse, path + ": no data rows");
  return t;
}

void write_data_csv(const std::string& path, const DataTable& t) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < t.names.size(); ++c) out << (c ? "," : "") << t.names[c];
  out << '\n';
  for (Index r = 0; r < t.values.rows(); ++r) {
    for (Index c = 0; c < t.values.cols(); ++c) out << (c ? "," : "") << t.values(r, c);
    out << '\n';
  }
}

ColoredGraph GraphFile::colored() const {
  if (!colors) throw Error(ErrorCode::Structure, "graph file has no edge colors");
  return ColoredGraph(graph, *colors);
}

GraphFile parse_graph_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object() || !j.contains("d") || !j.contains("edges")) {
    throw Error(ErrorCode::Parse, source + ": graph JSON needs 'd' and 'edges'");
  }
  if (!j["d"].is_number_integer()) throw Error(ErrorCode::Parse, source + ": 'd' must be an integer");
  const int d = j["d"].get<int>();
  std::vector<Edge> edges;
  if (!j["edges"].is_array()) throw Error(ErrorCode::Parse, source + ": 'edges' must be an array");
  for (const auto& e : j["edges"]) {
    const auto uv = int_array(e, "edges", source);
    if (uv.size() != 2) throw Error(ErrorCode::Parse, source + ": every edge needs two endpoints");
    if (uv[0] < 1 || uv[0] > d || uv[1] < 1 || uv[1] > d) {
      throw Error(ErrorCode::Structure, source + ": edge endpoint outside 1.." + std::to_string(d));
    }
    edges.emplace_back(uv[0] - 1, uv[1] - 1);
  }
  GraphFile g{Graph(d, edges), std::nullopt};
  if (j.contains("colors") && !j["colors"].is_null()) {
    auto colors = int_array(j["colors"], "colors", source);
    if (colors.size() != g.graph.num_edges()) {
      throw Error(ErrorCode::Structure, source + ": one color per edge required");
    }
    for (int& c : colors) {
      if (c < 1) throw Error(ErrorCode::Structure, source + ": colors are 1-based");
      --c;
    }
    // Edge order in the file may differ from the canonical order kept by Graph.
    std::vector<int> aligned(colors.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      aligned[g.graph.edge_index(edges[e].u, edges[e].v)] = colors[e];
    }
    g.colors = aligned;
  }
  return g;
}

GraphFile read_graph_json(const std::string& path) { return parse_graph_json(read_json(path), path); }

nlohmann::json graph_json(const Graph& g, const std::vector<int>* colors) {
  nlohmann::json j;
  j["d"] = g.dim();
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({e.u + 1, e.v + 1});
  if (colors) {
    j["colors"] = nlohmann::json::array();
    for (int c : *colors) j["colors"].push_back(c + 1);
  }
  return j;
}

IncrementSpec read_increment_spec(const std::string& path) {
  const auto j = read_json(path);
  if (!j.is_object() || !j.contains("classes") || !j["classes"].is_array()) {
    throw Error(ErrorCode::Parse, path + ": increment spec needs a 'classes' array");
  }
  IncrementSpec spec;
  for (const auto& c : j["classes"]) {
    IncrementDistribution dist;
    const std::string tag = c.value("dist", "gaussian");
    if (tag == "gaussian") {
      dist.kind = IncrementKind::Gaussian;
    } else if (tag == "laplace") {
      dist.kind = IncrementKind::Laplace;
    } else if (tag == "constant") {
      dist.kind = IncrementKind::Constant;
      dist.variance = 0.0;
      dist.value = c.value("value", 0.0);
    } else {
      throw Error(ErrorCode::Parse, path + ": unknown increment distribution '" + tag + "'");
    }
    if (dist.kind != IncrementKind::Constant) {
      if (!c.contains("variance") || !c["variance"].is_number()) {
        throw Error(ErrorCode::Parse, path + ": every non-constant class needs a numeric 'variance'");
      }
      dist.variance = c["variance"].get<double>();
    }
    spec.classes.push_back(dist);
  }
  return spec;
}

nlohmann::json fit_report_json(const FitReport& report, const std::string& model) {
  nlohmann::json j;
  j["model"] = model;
  j["estimate"] = std::vector<double>(report.estimate.data(), report.estimate.data() + report.estimate.size());
  j["iterations"] = report.iterations;
  j["final_score_norm"] = report.final_score_norm;
  j["loglik"] = std::isfinite(report.loglik) ? nlohmann::json(report.loglik) : nlohmann::json();
  j["converged"] = report.converged;
  j["status"] = to_string(report.status);
  if (report.dual_loglik) j["dual_loglik"] = *report.dual_loglik;
  if (!report.message.empty()) j["message"] = report.message;
  return j;
}

nlohmann::json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace colorhr
