#include "dcpm/solver.hpp"

#include "dcpm/curvature_geometry.hpp"
#include "dcpm/errors.hpp"

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace dcpm {

namespace {

struct Evaluation {
  EdgeLengths scaled;
  CornerAngles angles;
  VertexCurvature K;
  double margin = 0.0;
};

Evaluation evaluate(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                    const ConformalFactor& u) {
  Evaluation ev;
  ev.scaled = scale_lengths(mesh, u, l);
  ev.angles = all_corner_angles(mesh, kappa, ev.scaled);
  ev.K = curvature_from_angles(mesh, ev.angles);
  ev.margin = acuteness_margin(ev.angles);
  return ev;
}

std::optional<Evaluation> try_evaluate(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                                       const ConformalFactor& u) {
  for (double x : u.values)
    if (!std::isfinite(x)) return std::nullopt;
  if (first_infeasible_face(mesh, kappa, scale_lengths(mesh, u, l))) return std::nullopt;
  return evaluate(mesh, kappa, l, u);
}

ConformalFactor axpy(const ConformalFactor& u, double s, const VertexField& d) {
  ConformalFactor out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + s * d[i];
  return out;
}

double squared_norm(const VertexField& v) {
  double s = 0.0;
  for (double x : v.values) s += x * x;
  return s;
}

void require_solvable(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l, bool need_genus) {
  check_geometry_inputs(mesh, kappa, l);
  const TopologyReport topo = validate_topology(mesh);
  if (!topo.valid()) throw TopologyError("invalid mesh: " + topo.violations.front());
  if (need_genus && topo.genus < 2) throw TopologyError(fmt::format("genus >= 2 required, mesh has genus {}", topo.genus));
}

} // namespace

VertexField solve_linear_spd(const Graph& g, const JacobianParts& parts, const VertexField& rhs) {
  const Eigen::SparseMatrix<double> J = jacobian_matrix(g, parts);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(J);
  if (llt.info() != Eigen::Success) throw LinearSolveError("Cholesky factorization failed: D - Delta is not positive definite");
  const Eigen::VectorXd b = rhs.vec();
  Eigen::VectorXd d = llt.solve(b);
  const double tol = 1e-10 * b.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd r = b - J * d;
  if (r.lpNorm<Eigen::Infinity>() > tol) {
    d += llt.solve(r);
    r = b - J * d;
  }
  if (!d.allFinite() || r.lpNorm<Eigen::Infinity>() > tol)
    throw LinearSolveError(fmt::format("linear solve residual {:.3g} exceeds tolerance", r.lpNorm<Eigen::Infinity>()));
  return VertexField::from(d);
}

SolveResult newton_solve(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                         const SolveConfig& cfg) {
  require_solvable(mesh, kappa, l, true);
  if (!(cfg.tolerance > 0.0) || cfg.max_iterations < 1) throw Error("tolerance must be > 0 and max_iterations >= 1");

  SolveResult result;
  result.u = cfg.initial_u.value_or(ConformalFactor(mesh.vertex_count(), 0.0));
  if (static_cast<int>(result.u.size()) != mesh.vertex_count())
    throw TopologyError("initial conformal factor has the wrong size");
  if (auto f = first_infeasible_face(mesh, kappa, scale_lengths(mesh, result.u, l)))
    throw InfeasibleFaceError(*f, fmt::format("initial point is infeasible at face {}", *f));

  const Graph graph = mesh.skeleton();
  const LineSearchParams& ls = cfg.damping;
  Evaluation current = evaluate(mesh, kappa, l, result.u);
  result.step_log.push_back({0, max_abs(current.K.view()), std::sqrt(squared_norm(current.K)), 0.0, current.margin, true});

  for (int iter = 0;; ++iter) {
    const double residual = max_abs(current.K.view());
    if (residual <= cfg.tolerance) {
      result.converged = true;
      break;
    }
    if (iter == cfg.max_iterations) {
      result.message = fmt::format("iteration limit {} reached", cfg.max_iterations);
      break;
    }

    const double phi = squared_norm(current.K);
    VertexField minus_K(current.K.size());
    for (std::size_t i = 0; i < minus_K.size(); ++i) minus_K[i] = -current.K[i];

    bool newton = true;
    VertexField direction;
    try {
      direction = solve_linear_spd(graph, assemble_jacobian_at(mesh, kappa, current.scaled, current.angles), minus_K);
    } catch (const LinearSolveError&) {
      newton = false;
      direction = minus_K;
    } catch (const Error&) { // cot singularity
      newton = false;
      direction = minus_K;
    }

    double step = 1.0;
    std::optional<Evaluation> accepted;
    ConformalFactor trial_u;
    for (int b = 0; b <= ls.max_backtracks; ++b, step *= ls.shrink) {
      trial_u = axpy(result.u, step, direction);
      auto trial = try_evaluate(mesh, kappa, l, trial_u);
      if (!trial || trial->margin < cfg.min_margin) continue;
      const double trial_phi = squared_norm(trial->K);
      bool ok;
      if (newton) {
        ok = trial_phi <= (1.0 - 2.0 * ls.slope * step) * phi;
      } else {
        // Armijo on the convex energy along -K, plus a strict drop in |K|.
        double energy_drop;
        try {
          energy_drop = energy_along_path(mesh, kappa, l, result.u, trial_u, 8);
        } catch (const InfeasibleFaceError&) {
          continue;
        }
        ok = energy_drop <= -ls.slope * step * phi && trial_phi < phi;
      }
      if (ok) {
        accepted = std::move(trial);
        break;
      }
    }
    if (!accepted) {
      result.message = fmt::format("line search failed at iteration {}", iter);
      break;
    }
    result.u = std::move(trial_u);
    current = std::move(*accepted);
    ++result.iterations;
    result.step_log.push_back({result.iterations, max_abs(current.K.view()), std::sqrt(squared_norm(current.K)), step,
                               current.margin, newton});
  }

  result.residual_inf = max_abs(discrete_curvature(mesh, kappa, result.u, l).view());
  result.converged = result.residual_inf <= cfg.tolerance;
  if (result.converged) result.message = "converged";
  return result;
}

ContinuationResult continuation_solve(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                                      const ConformalFactor& u0, const ContinuationConfig& cfg) {
  require_solvable(mesh, kappa, l, false);
  if (cfg.steps < 1) throw Error("continuation needs at least one step");
  if (static_cast<int>(u0.size()) != mesh.vertex_count()) throw TopologyError("initial conformal factor has the wrong size");
  if (auto f = first_infeasible_face(mesh, kappa, scale_lengths(mesh, u0, l)))
    throw InfeasibleFaceError(*f, fmt::format("initial point is infeasible at face {}", *f));

  const Graph graph = mesh.skeleton();
  const VertexCurvature K0 = discrete_curvature(mesh, kappa, u0, l);
  VertexField minus_K0(K0.size());
  for (std::size_t i = 0; i < K0.size(); ++i) minus_K0[i] = -K0[i];
  const double h = 1.0 / cfg.steps;

  double t = 0.0;
  auto rhs = [&](const ConformalFactor& u) {
    try {
      return solve_linear_spd(graph, assemble_jacobian(mesh, kappa, u, l), minus_K0);
    } catch (const InfeasibleFaceError& e) {
      throw InfeasibleFaceError(e.face(), fmt::format("continuation left the feasible domain near t = {:.6g}: {}", t, e.what()));
    }
  };

  // Checkpoint step indices for t = 0, 1/4, 1/2, 3/4, 1.
  std::array<int, 5> checkpoints;
  for (int c = 0; c < 5; ++c) checkpoints[c] = static_cast<int>(std::lround(cfg.steps * c / 4.0));

  ContinuationResult out;
  ConformalFactor u = u0;
  auto record = [&](int step_index) {
    const double tc = static_cast<double>(step_index) / cfg.steps;
    const VertexCurvature K = discrete_curvature(mesh, kappa, u, l);
    double defect = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) defect = std::max(defect, std::abs(K[i] - (1.0 - tc) * K0[i]));
    out.trace.push_back({tc, max_abs(K.view()), defect});
  };

  int next_checkpoint = 0;
  for (int i = 0; i <= cfg.steps; ++i) {
    while (next_checkpoint < 5 && checkpoints[next_checkpoint] == i) {
      record(i);
      ++next_checkpoint;
    }
    if (i == cfg.steps) break;
    t = i * h;
    const VertexField k1 = rhs(u);
    const VertexField k2 = rhs(axpy(u, 0.5 * h, k1));
    const VertexField k3 = rhs(axpy(u, 0.5 * h, k2));
    const VertexField k4 = rhs(axpy(u, h, k3));
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  for (std::size_t c = 1; c + 1 < out.trace.size(); ++c)
    out.linearity_defect = std::max(out.linearity_defect, out.trace[c].linearity_defect);
  out.endpoint = u;

  if (cfg.newton_polish) {
    SolveConfig polish = cfg.polish;
    polish.initial_u = u;
    out.result = newton_solve(mesh, kappa, l, polish);
  } else {
    out.result.u = u;
    out.result.iterations = cfg.steps;
    out.result.residual_inf = max_abs(discrete_curvature(mesh, kappa, u, l).view());
    out.result.converged = out.result.residual_inf <= cfg.tolerance;
    out.result.message = out.result.converged ? "converged" : "endpoint residual above tolerance";
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
  if (points < 1) throw Error("quadrature needs at least one point");
  if (points == 1) return {{0.5}, {1.0}};
  std::vector<double> nodes(points), weights(points);
  for (int i = 0; i < points; ++i) {
    // Newton on P_n for the i-th root in [-1, 1].
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

double energy_along_path(const SurfaceMesh& mesh, const FaceCurvature& kappa, const EdgeLengths& l,
                         const ConformalFactor& u_start, const ConformalFactor& u_end, int quadrature_points) {
  VertexField delta(u_start.size());
  bool zero = true;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = u_end[i] - u_start[i];
    if (delta[i] != 0.0) zero = false;
  }
  if (zero) return 0.0;
  const auto [nodes, weights] = gauss_legendre(quadrature_points);
  double total = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const VertexCurvature K = discrete_curvature(mesh, kappa, axpy(u_start, nodes[q], delta), l);
    double dot = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) dot += K[i] * delta[i];
    total += weights[q] * dot;
  }
  return total;
}

} // namespace dcpm
