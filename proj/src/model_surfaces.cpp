#include "dcpm/model_surfaces.hpp"

#include "dcpm/curvature_geometry.hpp"
#include "dcpm/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace dcpm {

double octagon_spoke_length() {
  // Half of a spoke triangle is a right triangle with two pi/8 angles:
  // cosh(hypotenuse) = cot^2(pi/8).
  const double cot = 1.0 / std::tan(std::numbers::pi / 8);
  return std::acosh(cot * cot);
}

double octagon_side_length() {
  return 2.0 * std::asinh(std::sin(std::numbers::pi / 8) * std::sinh(octagon_spoke_length()));
}

ModelSurface gen_octagon_genus2() {
  // Vertex 0 is the center, vertex 1 the single glued corner. Edges 0..7 are
  // the spokes, 8..11 the side loops a, b, c, d.
  constexpr int kCenter = 0, kCorner = 1;
  std::vector<Edge> edges;
  for (int k = 0; k < 8; ++k) edges.push_back({kCenter, kCorner});
  for (int k = 0; k < 4; ++k) edges.push_back({kCorner, kCorner});

  // Boundary word a b a^-1 b^-1 c d c^-1 d^-1, sides listed counterclockwise.
  const std::array<DirectedEdge, 8> sides{{{8, true}, {9, true}, {8, false}, {9, false},
                                           {10, true}, {11, true}, {10, false}, {11, false}}};
  std::vector<FaceEdges> faces;
  for (int k = 0; k < 8; ++k) faces.push_back({DirectedEdge{k, true}, sides[k], DirectedEdge{(k + 1) % 8, false}});

  EdgeLengths lengths(12);
  for (int k = 0; k < 8; ++k) lengths[k] = octagon_spoke_length();
  for (int k = 8; k < 12; ++k) lengths[k] = octagon_side_length();
  return {SurfaceMesh(2, std::move(edges), std::move(faces)), std::move(lengths), 0,
          "regular hyperbolic octagon with corner angles pi/4, sides glued by a b a^-1 b^-1 c d c^-1 d^-1, "
          "8 spoke triangles"};
}

double minkowski_dot(const HyperboloidPoint& p, const HyperboloidPoint& q) {
  return p.x * q.x + p.y * q.y - p.t * q.t;
}

double hyperbolic_distance(const HyperboloidPoint& p, const HyperboloidPoint& q) {
  // <p-q, p-q> = 4 sinh^2(d/2); avoids acosh near 1.
  const double dx = p.x - q.x, dy = p.y - q.y, dt = p.t - q.t;
  const double chord2 = std::max(0.0, dx * dx + dy * dy - dt * dt);
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

HyperboloidPoint geodesic_midpoint(const HyperboloidPoint& p, const HyperboloidPoint& q) {
  HyperboloidPoint s{p.x + q.x, p.y + q.y, p.t + q.t};
  const double norm = std::sqrt(-minkowski_dot(s, s));
  return {s.x / norm, s.y / norm, s.t / norm};
}

std::array<HyperboloidPoint, 3> embed_triangle(double ab, double bc, double ca) {
  if (!triangle_feasible({bc, ca, ab}))
    throw InfeasibleFaceError(-1, fmt::format("cannot embed triangle with sides ({:.17g}, {:.17g}, {:.17g})", ab, bc, ca));
  const double alpha = hyperbolic_angles({bc, ca, ab})[0];
  HyperboloidPoint A{0.0, 0.0, 1.0};
  HyperboloidPoint B{std::sinh(ab), 0.0, std::cosh(ab)};
  HyperboloidPoint C{std::sinh(ca) * std::cos(alpha), std::sinh(ca) * std::sin(alpha), std::cosh(ca)};
  return {A, B, C};
}

namespace {

// The half of directed edge d that starts at its tail, as a directed edge of the
// refined mesh. Edge e splits into 2e (a -> mid) and 2e+1 (mid -> b).
DirectedEdge first_half(DirectedEdge d) { return d.forward ? DirectedEdge{2 * d.edge, true} : DirectedEdge{2 * d.edge + 1, false}; }
DirectedEdge second_half(DirectedEdge d) { return d.forward ? DirectedEdge{2 * d.edge + 1, true} : DirectedEdge{2 * d.edge, false}; }

} // namespace

ModelSurface refine_midpoint(const ModelSurface& m) {
  const SurfaceMesh& mesh = m.mesh;
  const int V = mesh.vertex_count(), E = mesh.edge_count(), F = mesh.face_count();

  std::vector<Edge> edges;
  edges.reserve(2 * E + 3 * F);
  EdgeLengths lengths(2 * E + 3 * F);
  for (int e = 0; e < E; ++e) {
    const int mid = V + e;
    edges.push_back({mesh.edge(e).a, mid});
    edges.push_back({mid, mesh.edge(e).b});
    lengths[2 * e] = lengths[2 * e + 1] = 0.5 * m.lengths[e];
  }

  std::vector<FaceEdges> faces;
  faces.reserve(4 * F);
  for (int f = 0; f < F; ++f) {
    const FaceEdges& d = mesh.face(f);
    const auto P = embed_triangle(m.lengths[d[0].edge], m.lengths[d[1].edge], m.lengths[d[2].edge]);
    std::array<HyperboloidPoint, 3> mid;
    for (int s = 0; s < 3; ++s) mid[s] = geodesic_midpoint(P[s], P[(s + 1) % 3]);
    std::array<int, 3> mid_vertex;
    for (int s = 0; s < 3; ++s) mid_vertex[s] = V + d[s].edge;

    // Interior edge I_s runs from mid_s to mid_{s+2}, cutting off corner s.
    std::array<DirectedEdge, 3> inner;
    for (int s = 0; s < 3; ++s) {
      const int id = 2 * E + 3 * f + s;
      edges.push_back({mid_vertex[s], mid_vertex[(s + 2) % 3]});
      lengths[id] = hyperbolic_distance(mid[s], mid[(s + 2) % 3]);
      inner[s] = {id, true};
    }
    for (int s = 0; s < 3; ++s) faces.push_back({first_half(d[s]), inner[s], second_half(d[(s + 2) % 3])});
    faces.push_back({DirectedEdge{inner[1].edge, false}, DirectedEdge{inner[2].edge, false},
                     DirectedEdge{inner[0].edge, false}});
  }

  return {SurfaceMesh(V + E, std::move(edges), std::move(faces)), std::move(lengths), m.level + 1,
          m.provenance + "; geodesic midpoint subdivision"};
}

ModelSurface octagon_fixture(int level) {
  if (level < 0) throw Error("refinement level must be >= 0");
  ModelSurface m = gen_octagon_genus2();
  for (int i = 0; i < level; ++i) m = refine_midpoint(m);
  return m;
}

VertexField true_angle_sums(const SurfaceMesh& mesh, const EdgeLengths& lengths) {
  VertexField sums(mesh.vertex_count(), 0.0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    std::array<double, 3> sides;
    for (int s = 0; s < 3; ++s) sides[s] = lengths[mesh.opposite_edge(f, s)];
    const auto angles = hyperbolic_angles(sides);
    for (int s = 0; s < 3; ++s) sums[mesh.corner_vertex(f, s)] += angles[s];
  }
  return sums;
}

FaceCurvature dual_distance_curvature(const SurfaceMesh& mesh, double amplitude, int marked_face) {
  const int F = mesh.face_count();
  if (marked_face < 0 || marked_face >= F) throw Error("marked face out of range");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw Error("family amplitude must be in [0, 1)");
  std::vector<int> dist(F, -1);
  std::queue<int> queue;
  dist[marked_face] = 0;
  queue.push(marked_face);
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (const DirectedEdge& d : mesh.face(f))
      for (const EdgeUse& use : mesh.uses_of(d.edge))
        if (dist[use.face] < 0) {
          dist[use.face] = dist[f] + 1;
          queue.push(use.face);
        }
  }
  int max_dist = 0;
  for (int x : dist) max_dist = std::max(max_dist, x);
  FaceCurvature kappa(F);
  for (int f = 0; f < F; ++f) {
    const double s = max_dist > 0 && dist[f] >= 0 ? static_cast<double>(dist[f]) / max_dist : 0.0;
    kappa[f] = -1.0 + amplitude * s;
  }
  return kappa;
}

FaceCurvature KappaSpec::evaluate(const SurfaceMesh& mesh) const {
  if (kind == Kind::Constant) return FaceCurvature(mesh.face_count(), value);
  return dual_distance_curvature(mesh, amplitude, marked_face);
}

std::optional<double> KappaSpec::exact_solution() const {
  if (kind == Kind::Constant) return -0.5 * std::log(-value);
  return std::nullopt;
}

KappaSpec parse_kappa_spec(const std::string& text) {
  auto number = [&](std::size_t prefix) {
    const std::string rest = text.substr(prefix);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size() || !std::isfinite(v)) throw ParseError(0, fmt::format("bad number in '{}'", text));
    return v;
  };
  KappaSpec spec;
  if (text.rfind("const:", 0) == 0) {
    spec.kind = KappaSpec::Kind::Constant;
    spec.value = number(6);
    if (!(spec.value < 0.0)) throw ParseError(0, "curvature must be negative");
  } else if (text.rfind("family:", 0) == 0) {
    spec.kind = KappaSpec::Kind::DualDistance;
    spec.amplitude = number(7);
    if (!(spec.amplitude >= 0.0 && spec.amplitude < 1.0)) throw ParseError(0, "family amplitude must be in [0, 1)");
  } else {
    throw ParseError(0, fmt::format("unknown curvature spec '{}'; use const:<neg> or family:<amplitude>", text));
  }
  return spec;
}

std::vector<ConvergenceRow> convergence_study(int levels, const KappaSpec& kappa_spec, const SolveConfig& cfg) {
  if (levels < 1) throw Error("convergence study needs at least one level");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ConvergenceRow> rows;
  ModelSurface m = gen_octagon_genus2();
  for (int level = 0; level < levels; ++level) {
    if (level > 0) m = refine_midpoint(m);
    const FaceCurvature kappa = kappa_spec.evaluate(m.mesh);
    ConvergenceRow row;
    row.level = level;
    row.max_len = max_length(m.lengths);
    row.margin = first_infeasible_face(m.mesh, kappa, m.lengths) ? nan : acuteness_margin(m.mesh, kappa, m.lengths);
    row.residual = nan;
    row.error_inf = nan;
    try {
      const SolveResult res = newton_solve(m.mesh, kappa, m.lengths, cfg);
      row.iters = res.iterations;
      row.residual = res.residual_inf;
      row.converged = res.converged;
      if (auto exact = kappa_spec.exact_solution()) {
        double err = 0.0;
        for (double x : res.u.values) err = std::max(err, std::abs(x - *exact));
        row.error_inf = err;
      }
    } catch (const Error&) {
      row.converged = false;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "level,max_len,margin,iters,residual,error_inf\n";
  for (const ConvergenceRow& r : rows)
    out += fmt::format("{},{:.17g},{:.17g},{},{:.17g},{:.17g}\n", r.level, r.max_len, r.margin, r.iters, r.residual,
                       r.error_inf);
  return out;
}

} // namespace dcpm
