#pragma once

#include "dcpm/fields.hpp"
#include "dcpm/surface_mesh.hpp"

#include <array>
#include <optional>
#include <vector>

namespace dcpm {

/// Per face, the angle at corner slot 0, 1, 2.
struct CornerAngles {
  std::vector<std::array<double, 3>> per_face;
};

/// exp((u_i + u_j) / 2) * l; a loop edge scales by exp(u_i).
double scale_length(double l, double ui, double uj);
/// u * l on every edge.
EdgeLengths scale_lengths(const SurfaceMesh& mesh, const ConformalFactor& u, const EdgeLengths& l);

/// (2 / -kappa) * asinh((-kappa / 2) * l).
double constant_curvature_edge_length(double kappa, double l);

/// H = 2 * asinh((-kappa / 2) * l): the curvature -1 length used for all angles.
/// Equals (-kappa) * constant_curvature_edge_length(kappa, l).
double model_length(double kappa, double l);

/// Relative slack below which a triangle counts as degenerate.
inline constexpr double kFeasibilityTolerance = 1e-12;

/// True iff the longest side is shorter than the sum of the other two by more
/// than kFeasibilityTolerance * longest.
bool triangle_feasible(const std::array<double, 3>& sides);

/// Angles of the curvature -1 triangle whose side opposite corner s is sides[s].
/// Throws InfeasibleFaceError (face -1) when !triangle_feasible(sides).
std::array<double, 3> hyperbolic_angles(const std::array<double, 3>& sides);

/// Model lengths of face f, indexed by opposite corner slot.
std::array<double, 3> face_model_lengths(const SurfaceMesh& mesh, const FaceCurvature& kappa,
                                         const EdgeLengths& l, int f);

/// Inner angles of face f for background curvature kappa(f) and lengths l.
std::array<double, 3> corner_angles(const SurfaceMesh& mesh, const FaceCurvature& kappa,
                                    const EdgeLengths& l, int f);

/// corner_angles for every face. Throws InfeasibleFaceError naming the lowest bad face.
CornerAngles all_corner_angles(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l);

/// Lowest-id infeasible face, if any.
std::optional<int> first_infeasible_face(const SurfaceMesh& mesh, const FaceCurvature& kappa,
                                         const EdgeLengths& l);

/// K_i = 2 pi - sum of corner angles at i, summed in ascending face order.
VertexCurvature curvature_from_angles(const SurfaceMesh& mesh, const CornerAngles& angles);

/// K(u) for background curvatures kappa and base lengths l.
VertexCurvature discrete_curvature(const SurfaceMesh& mesh, const FaceCurvature& kappa,
                                   const ConformalFactor& u, const EdgeLengths& l);

/// sum_i K_i - sum_f (pi - angle sum of f) - 2 pi chi. Zero up to roundoff.
double gauss_bonnet_residual(const SurfaceMesh& mesh, const CornerAngles& angles, const VertexCurvature& K);

/// min over corners of (pi/2 - angle); the surface is eps-acute iff margin >= eps.
double acuteness_margin(const CornerAngles& angles);
double acuteness_margin(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l);

/// |l|_inf.
double max_length(const EdgeLengths& l);

/// Throws TopologyError unless l has one positive entry per edge and kappa one
/// negative entry per face.
void check_geometry_inputs(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l);

} // namespace dcpm
