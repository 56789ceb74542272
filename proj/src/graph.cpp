#include "qwalk/graph.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "qwalk/errors.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::line: return "line";
    case GraphKind::cycle: return "cycle";
    case GraphKind::hypercube: return "hypercube";
    case GraphKind::glued_trees: return "glued_trees";
  }
  return "unknown";
}

std::string to_string(GlueMode mode) {
  return mode == GlueMode::symmetric ? "symmetric" : "random-cycle";
}

Graph::Graph(GraphKind kind, int n, std::vector<std::pair<Vertex, Vertex>> edges,
             std::string description, int size_parameter)
    : kind_(kind),
      adjacency_(static_cast<std::size_t>(n)),
      description_(std::move(description)),
      size_parameter_(size_parameter) {
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (u == v) throw InvalidArgument("self-loop");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw InvalidArgument("duplicate edge");
  }
  for (const auto& [u, v] : edges) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  edges_ = std::move(edges);
  set_ports(adjacency_);
}

void Graph::set_ports(std::vector<std::vector<Vertex>> ports) {
  ports_ = std::move(ports);
  max_ports_ = 0;
  for (const auto& p : ports_) {
    max_ports_ = std::max(max_ports_, static_cast<int>(p.size()));
  }
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
  if (!valid(v)) throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
  return adjacency_[v];
}

int Graph::degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

std::span<const Vertex> Graph::ports(Vertex v) const {
  if (!valid(v)) throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
  return ports_[v];
}

int Graph::coordinate(Vertex v) const {
  if (!has_coordinates()) throw InvalidArgument(description_ + " has no position coordinates");
  if (!valid(v)) throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
  return coordinates_[v];
}

std::optional<Vertex> Graph::vertex_at(int x) const {
  if (!has_coordinates()) throw InvalidArgument(description_ + " has no position coordinates");
  const int n = vertex_count();
  if (kind_ == GraphKind::line) {
    const int k = x + (n - 1) / 2;
    if (k < 0 || k >= n) return std::nullopt;
    return k;
  }
  const auto it = std::find(coordinates_.begin(), coordinates_.end(), x);
  if (it == coordinates_.end()) return std::nullopt;
  return static_cast<Vertex>(it - coordinates_.begin());
}

int Graph::column_count() const {
  if (labels_.empty()) return 0;
  return *std::max_element(labels_.begin(), labels_.end()) + 1;
}

Graph build_line(int num_positions) {
  if (num_positions < 1 || num_positions % 2 == 0) {
    throw InvalidArgument("line needs a positive odd number of positions, got " +
                          std::to_string(num_positions));
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex k = 0; k + 1 < num_positions; ++k) edges.emplace_back(k, k + 1);
  Graph g(GraphKind::line, num_positions, std::move(edges),
          "line positions=" + std::to_string(num_positions), num_positions);

  const int half = (num_positions - 1) / 2;
  std::vector<std::vector<Vertex>> ports(num_positions);
  for (Vertex k = 0; k < num_positions; ++k) {
    ports[k] = {k > 0 ? k - 1 : kNoVertex, k + 1 < num_positions ? k + 1 : kNoVertex};
    g.coordinates_.push_back(k - half);
  }
  g.set_ports(std::move(ports));
  return g;
}

Graph build_cycle(int n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3, got " + std::to_string(n));
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex k = 0; k < n; ++k) edges.emplace_back(k, (k + 1) % n);
  Graph g(GraphKind::cycle, n, std::move(edges), "cycle n=" + std::to_string(n), n);

  std::vector<std::vector<Vertex>> ports(n);
  for (Vertex k = 0; k < n; ++k) {
    ports[k] = {(k + n - 1) % n, (k + 1) % n};
    g.coordinates_.push_back(k <= n / 2 ? k : k - n);
  }
  g.set_ports(std::move(ports));
  return g;
}

Graph build_hypercube(int n) {
  if (n < 1) throw InvalidArgument("hypercube needs dimension >= 1, got " + std::to_string(n));
  if (n > 24) throw InvalidArgument("hypercube dimension " + std::to_string(n) + " too large");
  const int count = 1 << n;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 0; v < count; ++v) {
    for (int bit = 0; bit < n; ++bit) {
      const Vertex u = v ^ (1 << bit);
      if (v < u) edges.emplace_back(v, u);
    }
  }
  Graph g(GraphKind::hypercube, count, std::move(edges),
          "hypercube n=" + std::to_string(n), n);

  std::vector<std::vector<Vertex>> ports(count);
  for (Vertex v = 0; v < count; ++v) {
    for (int bit = 0; bit < n; ++bit) ports[v].push_back(v ^ (1 << bit));
  }
  g.set_ports(std::move(ports));
  return g;
}

Graph build_glued_trees(int depth, const GlueSpec& glue) {
  if (depth < 1) throw InvalidArgument("glued trees need depth >= 1, got " + std::to_string(depth));
  if (depth > 20) throw InvalidArgument("glued trees depth " + std::to_string(depth) + " too large");
  if (glue.mode == GlueMode::random_cycle && !glue.seed) {
    throw MissingSeed("random-cycle glue requires a seed");
  }

  const int tree_size = (1 << (depth + 1)) - 1;
  const int n = 2 * tree_size;
  // Left tree level l, node j: heap order. Right tree level l, node j: columns
  // run leaves-first so the whole graph is numbered by ascending column.
  auto left = [](int level, int j) { return (1 << level) - 1 + j; };
  auto right = [&](int level, int j) {
    return tree_size + (1 << (depth + 1)) - (1 << (level + 1)) + j;
  };

  std::vector<std::pair<Vertex, Vertex>> edges;
  for (int level = 0; level < depth; ++level) {
    for (int j = 0; j < (1 << level); ++j) {
      for (int child = 0; child < 2; ++child) {
        edges.emplace_back(left(level, j), left(level + 1, 2 * j + child));
        edges.emplace_back(right(level, j), right(level + 1, 2 * j + child));
      }
    }
  }

  const int leaves = 1 << depth;
  if (glue.mode == GlueMode::symmetric) {
    for (int i = 0; i < leaves; ++i) edges.emplace_back(left(depth, i), right(depth, i));
  } else {
    std::vector<int> order(leaves);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(*glue.seed);
    for (int i = leaves - 1; i > 0; --i) {
      const auto k = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[k]);
    }
    for (int i = 0; i < leaves; ++i) {
      edges.emplace_back(left(depth, i), right(depth, order[i]));
      edges.emplace_back(right(depth, order[i]), left(depth, (i + 1) % leaves));
    }
  }

  std::string description = "glued_trees depth=" + std::to_string(depth) +
                            " glue=" + to_string(glue.mode);
  if (glue.mode == GlueMode::random_cycle) description += " seed=" + std::to_string(*glue.seed);
  Graph g(GraphKind::glued_trees, n, std::move(edges), std::move(description), depth);

  g.labels_.assign(n, 0);
  for (int level = 0; level <= depth; ++level) {
    for (int j = 0; j < (1 << level); ++j) {
      g.labels_[left(level, j)] = level;
      g.labels_[right(level, j)] = 2 * depth + 1 - level;
    }
  }
  return g;
}

Vertex glued_entrance(const Graph& g) {
  if (g.kind() != GraphKind::glued_trees) throw InvalidArgument("not a glued-trees graph");
  return 0;
}

Vertex glued_exit(const Graph& g) {
  if (g.kind() != GraphKind::glued_trees) throw InvalidArgument("not a glued-trees graph");
  return g.vertex_count() - 1;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# " << g.description() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace qwalk
