#pragma once

#include <vector>

namespace dcpm {

/// Undirected edge with a stored direction a -> b. Loops (a == b) and parallel
/// edges are allowed.
struct Edge {
  int a = 0;
  int b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Multigraph on vertices 0..vertex_count-1, edges indexed by position.
struct Graph {
  int vertex_count = 0;
  std::vector<Edge> edges;

  int edge_count() const { return static_cast<int>(edges.size()); }
  bool is_connected() const;
};

} // namespace dcpm
