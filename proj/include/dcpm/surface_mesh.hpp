#pragma once

#include "dcpm/graph.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace dcpm {

/// An edge traversed inside a face. forward means a -> b.
struct DirectedEdge {
  int edge = 0;
  bool forward = true;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Corner `slot` of `face` sits at the tail of the face's slot-th directed edge.
struct Corner {
  int face = 0;
  int slot = 0;
};

/// A face slot using an edge.
struct EdgeUse {
  int face = 0;
  int slot = 0;
  bool forward = true;
};

using FaceEdges = std::array<DirectedEdge, 3>;

/// Closed oriented triangulated surface as a Delta-complex: explicit edge ids,
/// loops and multi-edges allowed. Only combinatorics is stored; geometry lives
/// in per-edge lengths held elsewhere.
///
/// Face f walks d0, d1, d2. Corner s is the tail of d_s, and the edge opposite
/// corner s is d_{s+1}. The constructor only checks that ids are in range;
/// surface invariants are checked by validate_topology().
class SurfaceMesh {
public:
  SurfaceMesh() = default;
  SurfaceMesh(int vertex_count, std::vector<Edge> edges, std::vector<FaceEdges> faces);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int euler_characteristic() const { return vertex_count_ - edge_count() + face_count(); }

  const Edge& edge(int e) const { return edges_[e]; }
  const FaceEdges& face(int f) const { return faces_[f]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<FaceEdges>& faces() const { return faces_; }

  int tail(DirectedEdge d) const { return d.forward ? edges_[d.edge].a : edges_[d.edge].b; }
  int head(DirectedEdge d) const { return d.forward ? edges_[d.edge].b : edges_[d.edge].a; }

  int corner_vertex(int f, int slot) const { return tail(faces_[f][slot]); }
  std::array<int, 3> face_vertices(int f) const;
  int opposite_edge(int f, int slot) const { return faces_[f][(slot + 1) % 3].edge; }

  /// Edge ids incident to v (a loop is listed once).
  std::span<const int> edges_at(int v) const { return edges_at_[v]; }
  /// Corners at v in ascending (face, slot) order.
  std::span<const Corner> corners_at(int v) const { return corners_at_[v]; }
  /// Face slots using edge e in ascending (face, slot) order.
  std::span<const EdgeUse> uses_of(int e) const { return uses_of_[e]; }

  Graph skeleton() const { return Graph{vertex_count_, edges_}; }

  friend bool operator==(const SurfaceMesh& x, const SurfaceMesh& y) {
    return x.vertex_count_ == y.vertex_count_ && x.edges_ == y.edges_ && x.faces_ == y.faces_;
  }

private:
  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<FaceEdges> faces_;
  std::vector<std::vector<int>> edges_at_;
  std::vector<std::vector<Corner>> corners_at_;
  std::vector<std::vector<EdgeUse>> uses_of_;
};

struct TopologyReport {
  int chi = 0;
  int genus = 0;
  bool is_simplicial = false;
  int max_vertex_degree = 0;
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
  /// The prescribed-curvature solver needs a valid surface of genus >= 2.
  bool solver_eligible() const { return valid() && genus >= 2; }
};

TopologyReport validate_topology(const SurfaceMesh& mesh);

} // namespace dcpm
