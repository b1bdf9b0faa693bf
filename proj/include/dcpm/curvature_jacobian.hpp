#pragma once

#include "dcpm/curvature_geometry.hpp"
#include "dcpm/fields.hpp"
#include "dcpm/graph.hpp"
#include "dcpm/surface_mesh.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <vector>

namespace dcpm {

/// Pieces of dK/du = D - Delta_eta.
struct JacobianParts {
  EdgeWeight eta;
  VertexField diag;
  /// Per face, the half-angle combination at each corner slot.
  std::vector<std::array<double, 3>> tilde;
  /// Per face, lambda of the edge opposite each corner slot.
  std::vector<std::array<double, 3>> lambda;
};

/// theta~_i = (pi + theta_i - theta_j - theta_k) / 2 for each corner.
std::array<double, 3> tilde_theta(const std::array<double, 3>& angles);

/// kappa^2 s^2 / (kappa^2 s^2 + 4), equal to tanh^2(model_length(kappa, s) / 2).
double lambda_factor(double kappa, double scaled_length);

/// Guard for cot(theta~): a half-angle this close to 0 or pi is a singularity.
inline constexpr double kCotGuard = 1e-12;

/// Assembles eta(u) and D(u) face by face. Each face adds, for the edge opposite
/// corner k, (1/2) cot(theta~_k) (1 - lambda) to eta of that edge and
/// cot(theta~_k) lambda to D at both of the edge's corners in the face.
/// Throws InfeasibleFaceError or Error (cot singularity).
JacobianParts assemble_jacobian(const SurfaceMesh& mesh, const FaceCurvature& kappa, const ConformalFactor& u,
                                const EdgeLengths& l);

/// Same, from precomputed scaled lengths u*l and their corner angles.
JacobianParts assemble_jacobian_at(const SurfaceMesh& mesh, const FaceCurvature& kappa,
                                   const EdgeLengths& scaled, const CornerAngles& angles);

/// J = D - Delta_eta as a sparse symmetric matrix.
Eigen::SparseMatrix<double> jacobian_matrix(const Graph& g, const JacobianParts& parts);

} // namespace dcpm
