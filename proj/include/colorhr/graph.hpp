#pragma once

#include "colorhr/matrix_core.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace colorhr {

/// Undirected edge stored canonically with u < v (0-based vertices).
struct Edge {
  int u = 0;
  int v = 0;

  Edge() = default;
  Edge(int a, int b);

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on vertices 0..d-1.
class Graph {
 public:
  Graph() = default;
  Graph(int d, std::vector<Edge> edges);

  int dim() const noexcept { return d_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool has_edge(int a, int b) const;
  /// Position of the edge in edges(), or -1.
  int edge_index(int a, int b) const;
  const std::vector<int>& neighbors(int a) const { return adjacency_[a]; }

  bool is_connected() const;
  bool is_tree() const;

  static Graph complete(int d);

 private:
  int d_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Graph with a surjective edge coloring onto 0..r-1.
class ColoredGraph {
 public:
  ColoredGraph() = default;
  ColoredGraph(Graph graph, std::vector<int> colors);

  /// Every edge in its own class, in edge order.
  static ColoredGraph trivial(Graph graph);
  static ColoredGraph monochromatic(Graph graph);

  const Graph& graph() const noexcept { return graph_; }
  const std::vector<int>& colors() const noexcept { return colors_; }
  int num_colors() const noexcept { return r_; }
  int dim() const noexcept { return graph_.dim(); }
  /// Edge indices belonging to color class c.
  const std::vector<int>& color_class(int c) const { return classes_[c]; }

 private:
  Graph graph_;
  std::vector<int> colors_;
  std::vector<std::vector<int>> classes_;
  int r_ = 0;
};

/// Tree with all edges oriented away from the root.
struct RootedTree {
  RootedTree(Graph tree, int root);

  Graph tree;
  int root = 0;
  std::vector<int> parent;              // parent[root] == -1
  std::vector<std::pair<int, int>> directed;  // (parent, child), BFS order
  std::vector<int> directed_edge_index; // index into tree.edges() per directed edge
};

using EdgeSubset = std::vector<int>;

inline constexpr std::size_t kMaxEnumerated = 1'000'000;
inline constexpr int kMaxEnumerationDim = 12;

/// All spanning trees, each as a sorted list of edge indices. Oracle use only.
std::vector<EdgeSubset> spanning_trees(const Graph& g);

/// All two-tree spanning forests separating i from j.
std::vector<EdgeSubset> separating_forests(const Graph& g, int i, int j);

/// Path-sum completion of positive edge values (aligned with t.edges()).
Variogram tree_metric_complete(const Graph& t, std::span<const double> edge_values);

/// Kruskal with lexicographic (weight, u, v) ordering.
Graph minimum_spanning_tree(const Matrix& weights);

/// Vertices on the unique path between a and b in a tree, inclusive.
std::vector<int> tree_path(const Graph& t, int a, int b);

/// True when every a-b path meets the vertex set `separator`.
bool separates(const Graph& g, int a, int b, std::span<const int> separator);

}  // namespace colorhr
