#include "dcpm/curvature_geometry.hpp"

#include "dcpm/errors.hpp"
#include "dcpm/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dcpm {

double scale_length(double l, double ui, double uj) { return std::exp(0.5 * (ui + uj)) * l; }

EdgeLengths scale_lengths(const SurfaceMesh& mesh, const ConformalFactor& u, const EdgeLengths& l) {
  EdgeLengths out(l.size());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const Edge& ed = mesh.edge(e);
    out[e] = scale_length(l[e], u[ed.a], u[ed.b]);
  }
  return out;
}

double constant_curvature_edge_length(double kappa, double l) {
  return (2.0 / -kappa) * std::asinh((-kappa / 2.0) * l);
}

double model_length(double kappa, double l) { return 2.0 * std::asinh((-kappa / 2.0) * l); }

bool triangle_feasible(const std::array<double, 3>& sides) {
  for (double s : sides)
    if (!(s > 0.0) || !std::isfinite(s)) return false;
  const double longest = std::max({sides[0], sides[1], sides[2]});
  const double sum = sides[0] + sides[1] + sides[2];
  return longest < (sum - longest) - kFeasibilityTolerance * longest;
}

std::array<double, 3> hyperbolic_angles(const std::array<double, 3>& sides) {
  if (!triangle_feasible(sides))
    throw InfeasibleFaceError(-1, fmt::format("infeasible triangle with model lengths ({:.17g}, {:.17g}, {:.17g})",
                                              sides[0], sides[1], sides[2]));
  // Half-angle form of the hyperbolic law of cosines:
  // tan^2(A/2) = sinh(p-b) sinh(p-c) / (sinh p sinh(p-a)), p the semiperimeter.
  std::array<double, 3> sorted = sides; // order-independent sum keeps relabeling exact
  std::sort(sorted.begin(), sorted.end());
  const double p = 0.5 * (sorted[0] + sorted[1] + sorted[2]);
  std::array<double, 3> excess; // p - side, formed without cancellation against p
  for (int s = 0; s < 3; ++s) excess[s] = 0.5 * (sides[(s + 1) % 3] + sides[(s + 2) % 3] - sides[s]);
  const double sinh_p = std::sinh(p);
  std::array<double, 3> angles;
  for (int s = 0; s < 3; ++s) {
    const double num = std::sinh(excess[(s + 1) % 3]) * std::sinh(excess[(s + 2) % 3]);
    const double den = sinh_p * std::sinh(excess[s]);
    angles[s] = 2.0 * std::atan(std::sqrt(num / den));
  }
  return angles;
}

std::array<double, 3> face_model_lengths(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                                         int f) {
  std::array<double, 3> H;
  for (int s = 0; s < 3; ++s) H[s] = model_length(kappa[f], l[mesh.opposite_edge(f, s)]);
  return H;
}

std::array<double, 3> corner_angles(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                                    int f) {
  const auto H = face_model_lengths(mesh, kappa, l, f);
  if (!triangle_feasible(H))
    throw InfeasibleFaceError(f, fmt::format("face {} is infeasible: model lengths ({:.17g}, {:.17g}, {:.17g})", f,
                                             H[0], H[1], H[2]));
  return hyperbolic_angles(H);
}

std::optional<int> first_infeasible_face(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l) {
  for (int f = 0; f < mesh.face_count(); ++f)
    if (!triangle_feasible(face_model_lengths(mesh, kappa, l, f))) return f;
  return std::nullopt;
}

CornerAngles all_corner_angles(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l) {
  const int F = mesh.face_count();
  CornerAngles out;
  out.per_face.resize(F);
  std::vector<char> bad(F, 0);
  parallel_for(F, [&](int begin, int end) {
    for (int f = begin; f < end; ++f) {
      const auto H = face_model_lengths(mesh, kappa, l, f);
      if (triangle_feasible(H))
        out.per_face[f] = hyperbolic_angles(H);
      else
        bad[f] = 1;
    }
  });
  for (int f = 0; f < F; ++f)
    if (bad[f]) corner_angles(mesh, kappa, l, f); // throws with the face's details
  return out;
}

VertexCurvature curvature_from_angles(const SurfaceMesh& mesh, const CornerAngles& angles) {
  VertexCurvature K(mesh.vertex_count(), 2.0 * std::numbers::pi);
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int s = 0; s < 3; ++s) K[mesh.corner_vertex(f, s)] -= angles.per_face[f][s];
  return K;
}

VertexCurvature discrete_curvature(const SurfaceMesh& mesh, const FaceCurvature& kappa, const ConformalFactor& u,
                                   const EdgeLengths& l) {
  return curvature_from_angles(mesh, all_corner_angles(mesh, kappa, scale_lengths(mesh, u, l)));
}

double gauss_bonnet_residual(const SurfaceMesh& mesh, const CornerAngles& angles, const VertexCurvature& K) {
  double total_K = 0.0;
  for (double k : K.values) total_K += k;
  double total_deficit = 0.0;
  for (const auto& a : angles.per_face) total_deficit += std::numbers::pi - (a[0] + a[1] + a[2]);
  return total_K - total_deficit - 2.0 * std::numbers::pi * mesh.euler_characteristic();
}

double acuteness_margin(const CornerAngles& angles) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& a : angles.per_face)
    for (double theta : a) margin = std::min(margin, std::numbers::pi / 2 - theta);
  return margin;
}

double acuteness_margin(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l) {
  return acuteness_margin(all_corner_angles(mesh, kappa, l));
}

double max_length(const EdgeLengths& l) { return max_abs(l.view()); }

void check_geometry_inputs(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l) {
  if (static_cast<int>(l.size()) != mesh.edge_count())
    throw TopologyError(fmt::format("{} edge lengths for {} edges", l.size(), mesh.edge_count()));
  if (static_cast<int>(kappa.size()) != mesh.face_count())
    throw TopologyError(fmt::format("{} face curvatures for {} faces", kappa.size(), mesh.face_count()));
  for (std::size_t e = 0; e < l.size(); ++e)
    if (!(l[e] > 0.0) || !std::isfinite(l[e])) throw TopologyError(fmt::format("edge {} length must be positive", e));
  for (std::size_t f = 0; f < kappa.size(); ++f)
    if (!(kappa[f] < 0.0) || !std::isfinite(kappa[f]))
      throw TopologyError(fmt::format("face {} curvature must be negative", f));
}

} // namespace dcpm
