#pragma once

#include "dcpm/curvature_jacobian.hpp"
#include "dcpm/fields.hpp"
#include "dcpm/surface_mesh.hpp"

#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dcpm {

struct LineSearchParams {
  double shrink = 0.5;
  double slope = 1e-4;
  int max_backtracks = 40;
};

struct SolveConfig {
  double tolerance = 1e-10;  // on |K|_inf
  int max_iterations = 100;
  std::optional<ConformalFactor> initial_u; // zero when absent
  LineSearchParams damping;
  /// Trial points with an acuteness margin below this are rejected.
  double min_margin = -std::numbers::pi / 4;
};

struct StepRecord {
  int iteration = 0;
  double residual = 0.0;    // |K|_inf after the step
  double residual_l2 = 0.0; // |K|_2 after the step
  double step = 0.0;     // accepted step length s
  double margin = 0.0;   // acuteness margin after the step
  bool newton = true;    // false for a gradient fallback step
};

struct SolveResult {
  ConformalFactor u;
  double residual_inf = 0.0;
  int iterations = 0;
  /// Entry 0 is the starting point (step 0); one entry per accepted step after it.
  std::vector<StepRecord> step_log;
  bool converged = false;
  std::string message;
};

/// Damped Newton iteration on K(u) = 0 with Hessian D - Delta_eta.
///
/// Each step solves (D - Delta_eta) d = -K and backtracks until every face stays
/// feasible, the margin stays above cfg.min_margin, and |K|_2^2 drops by the
/// Armijo factor. If the Cholesky factorization fails the step falls back to
/// d = -K with Armijo on the convex energy. Hitting the iteration limit or a
/// failed line search returns the best iterate with converged = false.
///
/// Throws TopologyError for invalid meshes or genus < 2, InfeasibleFaceError
/// when the initial point is infeasible.
SolveResult newton_solve(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                         const SolveConfig& cfg = {});

struct ContinuationConfig {
  int steps = 1000;
  bool newton_polish = true;
  SolveConfig polish;
  /// Without polish, converged means |K(u(1))|_inf <= this.
  double tolerance = 1e-6;
};

struct TracePoint {
  double t = 0.0;
  double residual_inf = 0.0;     // |K(u(t))|_inf
  double linearity_defect = 0.0; // |K(u(t)) - (1-t) K(u0)|_inf
};

struct ContinuationResult {
  SolveResult result;
  /// Max defect over the checkpoints t = 1/4, 1/2, 3/4.
  double linearity_defect = 0.0;
  /// Checkpoints at t = 0, 1/4, 1/2, 3/4, 1 (snapped to the step grid).
  std::vector<TracePoint> trace;
  /// Endpoint before polishing.
  ConformalFactor endpoint;
};

/// Integrates u' = (Delta_eta(u) - D(u))^{-1} K(u0) from t = 0 to 1 with fixed
/// step RK4, so that K(u(t)) = (1 - t) K(u0) along the exact path.
/// Throws InfeasibleFaceError (message includes t) if the path leaves the
/// feasible domain and LinearSolveError if the system is not SPD.
ContinuationResult continuation_solve(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                                      const ConformalFactor& u0, const ContinuationConfig& cfg = {});

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points);

/// Line integral of sum_i K_i du_i along the segment u_start -> u_end.
double energy_along_path(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                         const ConformalFactor& u_start, const ConformalFactor& u_end, int quadrature_points);

/// Solves (D - Delta_eta) d = rhs by sparse Cholesky. Throws LinearSolveError
/// if the factorization fails or the residual exceeds 1e-10 |rhs|_inf.
VertexField solve_linear_spd(const Graph& g, const JacobianParts& parts, const VertexField& rhs);

} // namespace dcpm
