#include "dcpm/curvature_jacobian.hpp"

#include "dcpm/errors.hpp"
#include "dcpm/graph_calculus.hpp"
#include "dcpm/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace dcpm {

std::array<double, 3> tilde_theta(const std::array<double, 3>& angles) {
  std::array<double, 3> t;
  for (int i = 0; i < 3; ++i)
    t[i] = 0.5 * (std::numbers::pi + angles[i] - angles[(i + 1) % 3] - angles[(i + 2) % 3]);
  return t;
}

double lambda_factor(double kappa, double scaled_length) {
  const double q = kappa * kappa * scaled_length * scaled_length;
  return q / (q + 4.0);
}

JacobianParts assemble_jacobian_at(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& scaled,
                                   const CornerAngles& angles) {
  const int F = mesh.face_count();
  JacobianParts parts;
  parts.eta = EdgeWeight(mesh.edge_count(), 0.0);
  parts.diag = VertexField(mesh.vertex_count(), 0.0);
  parts.tilde.resize(F);
  parts.lambda.resize(F);
  std::vector<std::array<double, 3>> cot(F);
  std::vector<char> singular(F, 0);

  parallel_for(F, [&](int begin, int end) {
    for (int f = begin; f < end; ++f) {
      parts.tilde[f] = tilde_theta(angles.per_face[f]);
      for (int k = 0; k < 3; ++k) {
        const double t = parts.tilde[f][k];
        if (!(t > kCotGuard && t < std::numbers::pi - kCotGuard)) singular[f] = 1;
        cot[f][k] = std::cos(t) / std::sin(t);
        parts.lambda[f][k] = lambda_factor(kappa[f], scaled[mesh.opposite_edge(f, k)]);
      }
    }
  });

  for (int f = 0; f < F; ++f) {
    if (singular[f]) throw Error(fmt::format("cot singularity in face {}: half-angle combination at 0 or pi", f));
    for (int k = 0; k < 3; ++k) {
      const double lam = parts.lambda[f][k];
      parts.eta[mesh.opposite_edge(f, k)] += 0.5 * cot[f][k] * (1.0 - lam);
      parts.diag[mesh.corner_vertex(f, (k + 1) % 3)] += cot[f][k] * lam;
      parts.diag[mesh.corner_vertex(f, (k + 2) % 3)] += cot[f][k] * lam;
    }
  }
  return parts;
}

JacobianParts assemble_jacobian(const SurfaceMesh& mesh, const FaceCurvature& kappa, const ConformalFactor& u,
                                const EdgeLengths& l) {
  const EdgeLengths scaled = scale_lengths(mesh, u, l);
  return assemble_jacobian_at(mesh, kappa, scaled, all_corner_angles(mesh, kappa, scaled));
}

Eigen::SparseMatrix<double> jacobian_matrix(const Graph& g, const JacobianParts& parts) {
  Eigen::SparseMatrix<double> J = -laplacian_matrix(g, parts.eta);
  for (int i = 0; i < g.vertex_count; ++i) J.coeffRef(i, i) += parts.diag[i];
  J.makeCompressed();
  return J;
}

} // namespace dcpm
