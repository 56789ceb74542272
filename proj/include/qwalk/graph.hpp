#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

using Vertex = int;

// Marks a coin port that leads nowhere (the ends of a finite line window).
inline constexpr Vertex kNoVertex = -1;

enum class GraphKind { line, cycle, hypercube, glued_trees };

enum class GlueMode { symmetric, random_cycle };

struct GlueSpec {
  GlueMode mode = GlueMode::random_cycle;
  std::optional<std::uint64_t> seed;
};

std::string to_string(GraphKind kind);
std::string to_string(GlueMode mode);

// Undirected simple graph with dense vertex indices.
//
// Besides the ascending neighbor lists, every vertex carries an ordered list of
// coin ports used by the coined walk. For most builders the ports are the
// neighbors themselves; the line and cycle order them as [left, right] and the
// hypercube orders them by flipped bit. A line endpoint keeps two ports, one of
// which is kNoVertex, so the line behaves as a window onto the unbounded line.
//
// Immutable after construction.
class Graph {
 public:
  GraphKind kind() const { return kind_; }
  int vertex_count() const { return static_cast<int>(adjacency_.size()); }
  std::size_t edge_count() const { return edges_.size(); }

  // Unordered edges as (u, v) with u < v, sorted lexicographically.
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }

  // Ascending neighbor list. Throws InvalidArgument for an invalid vertex.
  std::span<const Vertex> neighbors(Vertex v) const;
  int degree(Vertex v) const;

  std::span<const Vertex> ports(Vertex v) const;
  int port_count(Vertex v) const { return static_cast<int>(ports(v).size()); }
  int max_port_count() const { return max_ports_; }

  // Position coordinate for line and cycle graphs (cycles are centred so that
  // vertex 0 sits at the origin). Empty for graphs without a numeric axis.
  bool has_coordinates() const { return !coordinates_.empty(); }
  int coordinate(Vertex v) const;
  std::span<const int> coordinates() const { return coordinates_; }
  // Inverse of coordinate(); nullopt when x is outside the graph.
  std::optional<Vertex> vertex_at(int x) const;

  // Column index of each vertex for glued trees; empty otherwise.
  std::span<const int> labels() const { return labels_; }
  int column_count() const;

  // Builder name and parameters, e.g. "cycle n=5".
  const std::string& description() const { return description_; }
  // The construction parameter: line positions, cycle length, hypercube
  // dimension or glued-trees depth.
  int size_parameter() const { return size_parameter_; }

  bool valid(Vertex v) const { return v >= 0 && v < vertex_count(); }

  friend Graph build_line(int num_positions);
  friend Graph build_cycle(int n);
  friend Graph build_hypercube(int n);
  friend Graph build_glued_trees(int depth, const GlueSpec& glue);

 private:
  Graph(GraphKind kind, int n, std::vector<std::pair<Vertex, Vertex>> edges,
        std::string description, int size_parameter);

  void set_ports(std::vector<std::vector<Vertex>> ports);

  GraphKind kind_;
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::vector<Vertex>> ports_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<int> coordinates_;
  std::vector<int> labels_;
  std::string description_;
  int size_parameter_ = 0;
  int max_ports_ = 0;
};

// Path on num_positions vertices centred at the origin: vertex k is x = k - (n-1)/2.
Graph build_line(int num_positions);
Graph build_cycle(int n);
Graph build_hypercube(int n);

// Two complete binary trees of the given depth joined leaf layer to leaf layer.
// Vertices are numbered column by column; the entrance (left root) is vertex 0
// and the exit (right root) is the last vertex. Random-cycle glue shuffles the
// right leaves with a Fisher-Yates pass driven by Rng(seed), giving the order
// R[0..m), then joins L[i]-R[i] and R[i]-L[(i+1) mod m].
Graph build_glued_trees(int depth, const GlueSpec& glue);

Vertex glued_entrance(const Graph& g);
Vertex glued_exit(const Graph& g);

// Edge list dump: a "# <description>" header, then one "u v" line per edge.
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace qwalk
