#pragma once

#include "dcpm/fields.hpp"
#include "dcpm/solver.hpp"
#include "dcpm/surface_mesh.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dcpm {

/// A geodesic triangulation of a closed curvature -1 surface.
struct ModelSurface {
  SurfaceMesh mesh;
  EdgeLengths lengths;
  int level = 0;
  std::string provenance;
};

/// Center-to-corner length of the regular octagon with corner angles pi/4.
double octagon_spoke_length();
/// Side length of the same octagon.
double octagon_side_length();

/// Regular hyperbolic octagon glued by a b a^-1 b^-1 c d c^-1 d^-1 and cut into
/// 8 spoke triangles: 2 vertices, 12 edges, 8 faces, genus 2.
ModelSurface gen_octagon_genus2();

/// 1-to-4 midpoint subdivision with exact hyperbolic lengths. Old vertices keep
/// their ids, the midpoint of edge e becomes vertex V + e.
ModelSurface refine_midpoint(const ModelSurface& m);

/// The octagon surface refined `level` times.
ModelSurface octagon_fixture(int level);

/// Angle sums at each vertex using the true curvature -1 law of cosines on the
/// stored lengths (no model-length transform). 2 pi everywhere for a fixture.
VertexField true_angle_sums(const SurfaceMesh& mesh, const EdgeLengths& lengths);

/// Point (x, y, t) on the upper sheet t^2 - x^2 - y^2 = 1.
struct HyperboloidPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 1.0;
};

/// Minkowski product x1 x2 + y1 y2 - t1 t2.
double minkowski_dot(const HyperboloidPoint& p, const HyperboloidPoint& q);
double hyperbolic_distance(const HyperboloidPoint& p, const HyperboloidPoint& q);
HyperboloidPoint geodesic_midpoint(const HyperboloidPoint& p, const HyperboloidPoint& q);

/// Points A, B, C with d(A,B) = ab, d(B,C) = bc, d(C,A) = ca. Throws
/// InfeasibleFaceError if the lengths violate the triangle inequality.
std::array<HyperboloidPoint, 3> embed_triangle(double ab, double bc, double ca);

/// Background curvature choice for studies and the CLI.
struct KappaSpec {
  enum class Kind { Constant, DualDistance };
  Kind kind = Kind::Constant;
  double value = -1.0; // Constant
  double amplitude = 0.0; // DualDistance: kappa = -1 + amplitude * s, s in [0, 1]
  int marked_face = 0;

  FaceCurvature evaluate(const SurfaceMesh& mesh) const;
  /// Known smooth conformal factor restricted to vertices: -ln(-kappa)/2 for a
  /// constant kappa on a curvature -1 surface. None for the families.
  std::optional<double> exact_solution() const;
};

/// Parses `const:<neg>` or `family:<amplitude>` (amplitude in [0, 1)).
KappaSpec parse_kappa_spec(const std::string& text);

/// kappa(f) = -1 + amplitude * dist(f) / max dist, dist measured in the dual graph.
FaceCurvature dual_distance_curvature(const SurfaceMesh& mesh, double amplitude, int marked_face);

struct ConvergenceRow {
  int level = 0;
  double max_len = 0.0;
  double margin = 0.0; // acuteness margin of the input lengths
  int iters = 0;
  double residual = 0.0;
  double error_inf = 0.0; // NaN when no exact solution is known
  bool converged = false;
};

/// Solves on octagon fixtures of levels 0..levels-1.
std::vector<ConvergenceRow> convergence_study(int levels, const KappaSpec& kappa, const SolveConfig& cfg);

/// Header `level,max_len,margin,iters,residual,error_inf`, numbers with 17 digits.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

} // namespace dcpm
