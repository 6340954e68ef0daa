#pragma once

#include "colorhr/graph.hpp"
#include "colorhr/matrix_core.hpp"
#include "colorhr/rcon.hpp"
#include "colorhr/simulate.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace colorhr {

/// Headerless numeric CSV. Parse errors name the file and line.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// CSV with a header row of column names.
struct DataTable {
  std::vector<std::string> names;
  Matrix values;
};

DataTable read_data_csv(const std::string& path);
void write_data_csv(const std::string& path, const DataTable& table);

/// {"d": 5, "edges": [[1,2], ...], "colors": [1, ...]} with 1-based vertices and
/// colors; "colors" is optional.
struct GraphFile {
  Graph graph;
  std::optional<std::vector<int>> colors;  // 0-based once parsed

  ColoredGraph colored() const;  // throws Structure without colors
};

GraphFile parse_graph_json(const nlohmann::json& j, const std::string& source);
GraphFile read_graph_json(const std::string& path);
nlohmann::json graph_json(const Graph& g, const std::vector<int>* colors = nullptr);

/// {"classes": [{"dist": "gaussian", "variance": 0.5}, {"dist": "laplace", ...},
///  {"dist": "constant", "value": 0}]}
IncrementSpec read_increment_spec(const std::string& path);

nlohmann::json fit_report_json(const FitReport& report, const std::string& model);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace colorhr
