#include "dcpm/surface_mesh.hpp"

#include "dcpm/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace dcpm {

ParseError::ParseError(int line, const std::string& what)
    : Error(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

InfeasibleFaceError::InfeasibleFaceError(int face, const std::string& what) : Error(what), face_(face) {}

bool Graph::is_connected() const {
  if (vertex_count <= 1) return true;
  std::vector<int> parent(vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = vertex_count;
  for (const Edge& e : edges) {
    int ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

SurfaceMesh::SurfaceMesh(int vertex_count, std::vector<Edge> edges, std::vector<FaceEdges> faces)
    : vertex_count_(vertex_count), edges_(std::move(edges)), faces_(std::move(faces)) {
  if (vertex_count_ < 0) throw TopologyError("negative vertex count");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.a < 0 || ed.a >= vertex_count_ || ed.b < 0 || ed.b >= vertex_count_)
      throw TopologyError(fmt::format("edge {} references a vertex outside 0..{}", e, vertex_count_ - 1));
  }
  for (std::size_t f = 0; f < faces_.size(); ++f)
    for (const DirectedEdge& d : faces_[f])
      if (d.edge < 0 || d.edge >= edge_count())
        throw TopologyError(fmt::format("face {} references unknown edge {}", f, d.edge));

  edges_at_.assign(vertex_count_, {});
  corners_at_.assign(vertex_count_, {});
  uses_of_.assign(edges_.size(), {});
  for (int e = 0; e < edge_count(); ++e) {
    edges_at_[edges_[e].a].push_back(e);
    if (edges_[e].b != edges_[e].a) edges_at_[edges_[e].b].push_back(e);
  }
  for (int f = 0; f < face_count(); ++f)
    for (int s = 0; s < 3; ++s) {
      corners_at_[corner_vertex(f, s)].push_back({f, s});
      uses_of_[faces_[f][s].edge].push_back({f, s, faces_[f][s].forward});
    }
}

std::array<int, 3> SurfaceMesh::face_vertices(int f) const {
  return {corner_vertex(f, 0), corner_vertex(f, 1), corner_vertex(f, 2)};
}

TopologyReport validate_topology(const SurfaceMesh& mesh) {
  TopologyReport r;
  const int V = mesh.vertex_count(), E = mesh.edge_count(), F = mesh.face_count();
  r.chi = mesh.euler_characteristic();

  if (V == 0 || F == 0) r.violations.push_back("empty mesh");

  for (int f = 0; f < F; ++f) {
    const FaceEdges& fe = mesh.face(f);
    for (int s = 0; s < 3; ++s)
      if (mesh.head(fe[s]) != mesh.tail(fe[(s + 1) % 3]))
        r.violations.push_back(fmt::format("face {}: directed edges {} and {} do not chain", f, s, (s + 1) % 3));
  }

  for (int e = 0; e < E; ++e) {
    auto uses = mesh.uses_of(e);
    if (uses.size() < 2) {
      r.violations.push_back(fmt::format("edge {}: dangling edge used by {} face slot(s)", e, uses.size()));
    } else if (uses.size() > 2) {
      r.violations.push_back(fmt::format("edge {}: non-manifold edge used by {} face slots", e, uses.size()));
    } else if (uses[0].forward == uses[1].forward) {
      r.violations.push_back(fmt::format("edge {}: traversed in the same direction by both faces", e));
    }
  }

  if (3 * F != 2 * E) r.violations.push_back(fmt::format("3|F| = {} differs from 2|E| = {}", 3 * F, 2 * E));

  std::vector<bool> touched(V, false);
  for (const Edge& e : mesh.edges()) touched[e.a] = touched[e.b] = true;
  for (int v = 0; v < V; ++v)
    if (!touched[v]) r.violations.push_back(fmt::format("vertex {}: isolated", v));
  if (!mesh.skeleton().is_connected()) r.violations.push_back("incidence graph is disconnected");

  if (r.chi % 2 != 0) r.violations.push_back(fmt::format("Euler characteristic {} is odd", r.chi));
  r.genus = (2 - r.chi) / 2;
  if (r.genus < 0 && r.violations.empty()) r.violations.push_back("negative genus");

  for (int v = 0; v < V; ++v) {
    int degree = 0;
    for (int e : mesh.edges_at(v)) degree += mesh.edge(e).a == mesh.edge(e).b ? 2 : 1;
    r.max_vertex_degree = std::max(r.max_vertex_degree, degree);
  }

  bool simplicial = true;
  std::set<std::pair<int, int>> edge_keys;
  for (const Edge& e : mesh.edges()) {
    if (e.a == e.b) simplicial = false;
    if (!edge_keys.insert(std::minmax(e.a, e.b)).second) simplicial = false;
  }
  std::set<std::array<int, 3>> face_keys;
  for (int f = 0; f < F && simplicial; ++f) {
    auto vs = mesh.face_vertices(f);
    std::sort(vs.begin(), vs.end());
    if (vs[0] == vs[1] || vs[1] == vs[2]) simplicial = false;
    if (!face_keys.insert(vs).second) simplicial = false;
  }
  r.is_simplicial = simplicial;
  return r;
}

} // namespace dcpm
