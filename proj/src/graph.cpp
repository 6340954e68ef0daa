#include "colorhr/graph.hpp"

#include "colorhr/error.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

namespace colorhr {

Edge::Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}

Graph::Graph(int d, std::vector<Edge> edges) : d_(d), edges_(std::move(edges)), adjacency_(d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "graph needs at least one vertex");
  std::vector<Edge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::Structure, "graph has a repeated edge");
  }
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.v >= d) {
      std::ostringstream os;
      os << "edge (" << e.u + 1 << "," << e.v + 1 << ") references a vertex outside 1.." << d;
      throw Error(ErrorCode::Structure, os.str());
    }
    if (e.u == e.v) throw Error(ErrorCode::Structure, "graph has a loop");
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
}

bool Graph::has_edge(int a, int b) const { return edge_index(a, b) >= 0; }

int Graph::edge_index(int a, int b) const {
  const Edge key(a, b);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i] == key) return static_cast<int>(i);
  }
  return -1;
}

bool Graph::is_connected() const {
  if (d_ == 0) return false;
  std::vector<bool> seen(d_, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (int b : adjacency_[a]) {
      if (!seen[b]) {
        seen[b] = true;
        ++count;
        stack.push_back(b);
      }
    }
  }
  return count == d_;
}

bool Graph::is_tree() const {
  return static_cast<int>(edges_.size()) == d_ - 1 && is_connected();
}

Graph Graph::complete(int d) {
  std::vector<Edge> edges;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) edges.emplace_back(a, b);
  return Graph(d, std::move(edges));
}

ColoredGraph::ColoredGraph(Graph graph, std::vector<int> colors)
    : graph_(std::move(graph)), colors_(std::move(colors)) {
  if (colors_.size() != graph_.num_edges()) {
    std::ostringstream os;
    os << "coloring has " << colors_.size() << " entries for " << graph_.num_edges() << " edges";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (colors_.empty()) throw Error(ErrorCode::Structure, "colored graph has no edges");
  r_ = *std::max_element(colors_.begin(), colors_.end()) + 1;
  if (*std::min_element(colors_.begin(), colors_.end()) < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative color index");
  }
  classes_.assign(r_, {});
  for (std::size_t e = 0; e < colors_.size(); ++e) classes_[colors_[e]].push_back(static_cast<int>(e));
  for (int c = 0; c < r_; ++c) {
    if (classes_[c].empty()) {
      std::ostringstream os;
      os << "coloring is not surjective: color " << c + 1 << " is unused";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
}

ColoredGraph ColoredGraph::trivial(Graph graph) {
  std::vector<int> colors(graph.num_edges());
  std::iota(colors.begin(), colors.end(), 0);
  return ColoredGraph(std::move(graph), std::move(colors));
}

ColoredGraph ColoredGraph::monochromatic(Graph graph) {
  std::vector<int> colors(graph.num_edges(), 0);
  return ColoredGraph(std::move(graph), std::move(colors));
}

RootedTree::RootedTree(Graph t, int r) : tree(std::move(t)), root(r) {
  if (!tree.is_tree()) throw Error(ErrorCode::Structure, "rooted tree input is not a tree");
  if (r < 0 || r >= tree.dim()) throw Error(ErrorCode::InvalidArgument, "root out of range");
  parent.assign(tree.dim(), -1);
  std::vector<bool> seen(tree.dim(), false);
  std::queue<int> queue;
  queue.push(r);
  seen[r] = true;
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop();
    for (int b : tree.neighbors(a)) {
      if (seen[b]) continue;
      seen[b] = true;
      parent[b] = a;
      directed.emplace_back(a, b);
      directed_edge_index.push_back(tree.edge_index(a, b));
      queue.push(b);
    }
  }
}

namespace {

struct UnionFind {
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  std::vector<int> parent;
};

void guard_dim(const Graph& g) {
  if (g.dim() > kMaxEnumerationDim) {
    std::ostringstream os;
    os << "enumeration limited to d <= " << kMaxEnumerationDim << ", got " << g.dim();
    throw Error(ErrorCode::SizeGuard, os.str());
  }
}

// Include/exclude recursion over edges: including an edge contracts its
// endpoints' components, excluding deletes it. `forbidden` = pair of
// vertices that must stay in different components (-1 if none).
class ForestEnumerator {
 public:
  ForestEnumerator(const Graph& g, int target_edges, int sep_a, int sep_b)
      : g_(g), target_(target_edges), a_(sep_a), b_(sep_b) {}

  std::vector<EdgeSubset> run() {
    std::vector<int> comp(g_.dim());
    std::iota(comp.begin(), comp.end(), 0);
    recurse(0, comp);
    return std::move(out_);
  }

 private:
  void recurse(std::size_t next, const std::vector<int>& comp) {
    const int have = static_cast<int>(chosen_.size());
    if (have == target_) {
      out_.push_back(chosen_);
      if (out_.size() > kMaxEnumerated) {
        throw Error(ErrorCode::SizeGuard, "enumeration exceeded 10^6 structures");
      }
      return;
    }
    if (static_cast<int>(g_.num_edges() - next) < target_ - have) return;
    const Edge& e = g_.edges()[next];
    const int cu = comp[e.u];
    const int cv = comp[e.v];
    const bool joins_separated =
        a_ >= 0 && ((cu == comp[a_] && cv == comp[b_]) || (cu == comp[b_] && cv == comp[a_]));
    if (cu != cv && !joins_separated) {
      std::vector<int> merged = comp;
      for (int& c : merged)
        if (c == cv) c = cu;
      chosen_.push_back(static_cast<int>(next));
      recurse(next + 1, merged);
      chosen_.pop_back();
    }
    recurse(next + 1, comp);
  }

  const Graph& g_;
  int target_;
  int a_;
  int b_;
  EdgeSubset chosen_;
  std::vector<EdgeSubset> out_;
};

}  // namespace

std::vector<EdgeSubset> spanning_trees(const Graph& g) {
  guard_dim(g);
  if (!g.is_connected()) return {};
  return ForestEnumerator(g, g.dim() - 1, -1, -1).run();
}

std::vector<EdgeSubset> separating_forests(const Graph& g, int i, int j) {
  if (i == j) throw Error(ErrorCode::InvalidArgument, "separating forests need distinct vertices");
  if (i < 0 || j < 0 || i >= g.dim() || j >= g.dim()) {
    throw Error(ErrorCode::InvalidArgument, "vertex out of range");
  }
  guard_dim(g);
  return ForestEnumerator(g, g.dim() - 2, i, j).run();
}

Variogram tree_metric_complete(const Graph& t, std::span<const double> edge_values) {
  if (!t.is_tree()) throw Error(ErrorCode::Structure, "tree metric requires a tree");
  if (edge_values.size() != t.num_edges()) {
    throw Error(ErrorCode::InvalidArgument, "one value per tree edge required");
  }
  for (double v : edge_values) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "tree edge values must be positive");
  }
  const int d = t.dim();
  Matrix g = Matrix::Zero(d, d);
  for (int s = 0; s < d; ++s) {
    std::vector<double> dist(d, -1.0);
    dist[s] = 0.0;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : t.neighbors(a)) {
        if (dist[b] >= 0.0) continue;
        dist[b] = dist[a] + edge_values[t.edge_index(a, b)];
        stack.push_back(b);
      }
    }
    for (int b = 0; b < d; ++b) g(s, b) = dist[b];
  }
  return Variogram(symmetrize_zero_diag(g));
}

Graph minimum_spanning_tree(const Matrix& weights) {
  const int d = static_cast<int>(weights.rows());
  if (weights.rows() != weights.cols()) {
    throw Error(ErrorCode::InvalidDimension, "weight matrix must be square");
  }
  std::vector<std::tuple<double, int, int>> candidates;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const double w = 0.5 * (weights(a, b) + weights(b, a));
      if (!(w > 0.0)) {
        std::ostringstream os;
        os << "nonpositive weight " << w << " at (" << a + 1 << "," << b + 1 << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
      }
      candidates.emplace_back(w, a, b);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  UnionFind uf(d);
  std::vector<Edge> edges;
  for (const auto& [w, a, b] : candidates) {
    const int ra = uf.find(a);
    const int rb = uf.find(b);
    if (ra == rb) continue;
    uf.parent[rb] = ra;
    edges.emplace_back(a, b);
    if (static_cast<int>(edges.size()) == d - 1) break;
  }
  std::sort(edges.begin(), edges.end());
  return Graph(d, std::move(edges));
}

std::vector<int> tree_path(const Graph& t, int a, int b) {
  RootedTree rooted(t, a);
  std::vector<int> path;
  for (int v = b; v != -1; v = rooted.parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

bool separates(const Graph& g, int a, int b, std::span<const int> separator) {
  std::vector<bool> blocked(g.dim(), false);
  for (int s : separator) blocked[s] = true;
  if (blocked[a] || blocked[b]) return true;
  std::vector<bool> seen(g.dim(), false);
  std::vector<int> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    if (x == b) return false;
    for (int y : g.neighbors(x)) {
      if (!seen[y] && !blocked[y]) {
        seen[y] = true;
        stack.push_back(y);
      }
    }
  }
  return true;
}

}  // namespace colorhr
