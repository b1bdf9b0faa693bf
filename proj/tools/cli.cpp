#include "cli.hpp"

#include "dcpm/curvature_geometry.hpp"
#include "dcpm/errors.hpp"
#include "dcpm/graph_calculus.hpp"
#include "dcpm/mesh_io.hpp"
#include "dcpm/model_surfaces.hpp"
#include "dcpm/parallel.hpp"
#include "dcpm/solver.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <optional>

namespace dcpm::cli {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Common {
  std::string mesh_path;
  std::string kappa = "const:-1";
  std::string report_path;
  int threads = 0;
};

struct SolveArgs {
  Common common;
  double tol = 1e-10;
  int max_iter = 100;
  std::string init_path;
  std::string out_path;
};

struct FlowArgs {
  Common common;
  int steps = 1000;
  bool polish = true;
  double tol = 1e-10;
  std::string init_path;
  std::string out_path;
  std::string trace_path;
};

struct CheckArgs {
  Common common;
  bool isoperimetric = false;
};

struct GenArgs {
  std::string surface;
  int refine = 0;
  std::string out_path;
};

struct ConvergeArgs {
  int levels = 3;
  std::string kappa = "const:-1";
  double tol = 1e-10;
  int max_iter = 100;
  std::string out_path;
  int threads = 0;
};

void apply_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("DCPM_THREADS")) n = std::atoi(env);
  }
  set_thread_count(n > 0 ? n : 1);
}

FaceCurvature read_kappa(const std::string& arg, const SurfaceMesh& mesh) {
  if (arg.rfind("family:", 0) == 0) return parse_kappa_spec(arg).evaluate(mesh);
  return parse_kappa_argument(arg, mesh.face_count());
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json input_digest(const Common& c, const MeshData& data) {
  const TopologyReport topo = validate_topology(data.mesh);
  Json j;
  j["mesh"] = c.mesh_path;
  j["kappa"] = c.kappa;
  j["vertices"] = data.mesh.vertex_count();
  j["edges"] = data.mesh.edge_count();
  j["faces"] = data.mesh.face_count();
  j["max_length"] = max_length(data.lengths);
  j["euler_characteristic"] = topo.chi;
  j["genus"] = topo.genus;
  return j;
}

// Everything about the final iterate is evaluated here, not taken from the solver.
struct FinalState {
  double residual_inf = 0.0;
  double gauss_bonnet = 0.0;
  double margin = 0.0;
};

FinalState evaluate_final(const MeshData& data, const FaceCurvature& kappa, const ConformalFactor& u) {
  const EdgeLengths scaled = scale_lengths(data.mesh, u, data.lengths);
  const CornerAngles angles = all_corner_angles(data.mesh, kappa, scaled);
  const VertexCurvature K = curvature_from_angles(data.mesh, angles);
  return {max_abs(K.view()), gauss_bonnet_residual(data.mesh, angles, K), acuteness_margin(angles)};
}

Json steps_json(const std::vector<StepRecord>& log) {
  Json steps = Json::array();
  for (const StepRecord& s : log)
    steps.push_back({{"iteration", s.iteration},
                     {"residual_inf", s.residual},
                     {"residual_l2", s.residual_l2},
                     {"step", s.step},
                     {"margin", s.margin},
                     {"newton", s.newton}});
  return steps;
}

void write_report(const std::string& path, const Json& report) {
  if (!path.empty()) write_text_file(path, report.dump(2) + "\n");
}

std::optional<ConformalFactor> read_initial(const std::string& path, int vertex_count) {
  if (path.empty()) return std::nullopt;
  return load_conformal_factor(read_text_file(path), vertex_count);
}

int cmd_solve(const SolveArgs& a, const std::vector<std::string>& echo, std::ostream& out) {
  apply_threads(a.common.threads);
  const MeshData data = load_mesh_file(a.common.mesh_path);
  const FaceCurvature kappa = read_kappa(a.common.kappa, data.mesh);
  SolveConfig cfg;
  cfg.tolerance = a.tol;
  cfg.max_iterations = a.max_iter;
  cfg.initial_u = read_initial(a.init_path, data.mesh.vertex_count());

  const auto start = Clock::now();
  const SolveResult r = newton_solve(data.mesh, kappa, data.lengths, cfg);
  const double elapsed = seconds_since(start);
  const FinalState fin = evaluate_final(data, kappa, r.u);
  const bool ok = r.converged && fin.residual_inf <= a.tol;

  if (!a.out_path.empty()) write_text_file(a.out_path, write_conformal_factor(r.u));
  Json report;
  report["command"] = echo;
  report["input"] = input_digest(a.common, data);
  report["tolerance"] = a.tol;
  report["converged"] = ok;
  report["message"] = r.message;
  report["iterations"] = r.iterations;
  report["residual_inf"] = fin.residual_inf;
  report["solver_residual_inf"] = r.residual_inf;
  report["gauss_bonnet_residual"] = fin.gauss_bonnet;
  report["acuteness_margin"] = fin.margin;
  report["steps"] = steps_json(r.step_log);
  write_report(a.common.report_path, report);

  out << fmt::format("solve: {} after {} iterations, |K|_inf = {:.3e}, margin {:.4f}, {:.3f} s\n",
                     ok ? "converged" : "not converged", r.iterations, fin.residual_inf, fin.margin, elapsed);
  if (!ok) out << "solve: " << r.message << "\n";
  return ok ? kOk : kNotConverged;
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::string csv = "t,residual_inf,linearity_defect\n";
  for (const TracePoint& p : trace)
    csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.t, p.residual_inf, p.linearity_defect);
  return csv;
}

int cmd_flow(const FlowArgs& a, const std::vector<std::string>& echo, std::ostream& out) {
  apply_threads(a.common.threads);
  const MeshData data = load_mesh_file(a.common.mesh_path);
  const FaceCurvature kappa = read_kappa(a.common.kappa, data.mesh);
  if (a.steps < 1) throw ParseError(0, "--steps must be positive");
  ContinuationConfig cfg;
  cfg.steps = a.steps;
  cfg.newton_polish = a.polish;
  cfg.polish.tolerance = a.tol;
  const ConformalFactor u0 =
      read_initial(a.init_path, data.mesh.vertex_count()).value_or(ConformalFactor(data.mesh.vertex_count(), 0.0));

  const auto start = Clock::now();
  const ContinuationResult c = continuation_solve(data.mesh, kappa, data.lengths, u0, cfg);
  const double elapsed = seconds_since(start);
  const FinalState fin = evaluate_final(data, kappa, c.result.u);
  const double tolerance = a.polish ? a.tol : cfg.tolerance;
  const bool ok = c.result.converged && fin.residual_inf <= tolerance;

  if (!a.out_path.empty()) write_text_file(a.out_path, write_conformal_factor(c.result.u));
  if (!a.trace_path.empty()) write_text_file(a.trace_path, trace_csv(c.trace));
  Json report;
  report["command"] = echo;
  report["input"] = input_digest(a.common, data);
  report["steps"] = a.steps;
  report["polish"] = a.polish;
  report["tolerance"] = tolerance;
  report["converged"] = ok;
  report["message"] = c.result.message;
  report["iterations"] = c.result.iterations;
  report["residual_inf"] = fin.residual_inf;
  report["linearity_defect"] = c.linearity_defect;
  report["gauss_bonnet_residual"] = fin.gauss_bonnet;
  report["acuteness_margin"] = fin.margin;
  write_report(a.common.report_path, report);

  out << fmt::format("flow: {} steps, {}, |K|_inf = {:.3e}, linearity defect {:.3e}, {:.3f} s\n", a.steps,
                     ok ? "converged" : "not converged", fin.residual_inf, c.linearity_defect, elapsed);
  return ok ? kOk : kNotConverged;
}

int cmd_check(const CheckArgs& a, const std::vector<std::string>& echo, std::ostream& out) {
  apply_threads(a.common.threads);
  const MeshData data = load_mesh_file(a.common.mesh_path);
  const TopologyReport topo = validate_topology(data.mesh);

  Json report;
  report["command"] = echo;
  report["input"] = input_digest(a.common, data);
  report["topology"] = {{"valid", topo.valid()},
                        {"simplicial", topo.is_simplicial},
                        {"max_vertex_degree", topo.max_vertex_degree},
                        {"solver_eligible", topo.solver_eligible()},
                        {"violations", topo.violations}};
  out << fmt::format("check: V={} E={} F={} chi={} genus={} simplicial={}\n", data.mesh.vertex_count(),
                     data.mesh.edge_count(), data.mesh.face_count(), topo.chi, topo.genus, topo.is_simplicial);
  for (const std::string& v : topo.violations) out << "check: violation: " << v << "\n";
  if (!topo.valid()) {
    write_report(a.common.report_path, report);
    return kInvalidInput;
  }
  if (!topo.solver_eligible()) out << "check: genus >= 2 required for solving\n";

  const FaceCurvature kappa = read_kappa(a.common.kappa, data.mesh);
  const std::optional<int> bad = first_infeasible_face(data.mesh, kappa, data.lengths);
  report["feasible"] = !bad.has_value();
  if (bad) {
    report["infeasible_face"] = *bad;
    out << fmt::format("check: face {} is infeasible at u = 0\n", *bad);
  } else {
    const CornerAngles angles = all_corner_angles(data.mesh, kappa, data.lengths);
    const VertexCurvature K = curvature_from_angles(data.mesh, angles);
    report["acuteness_margin"] = acuteness_margin(angles);
    report["gauss_bonnet_residual"] = gauss_bonnet_residual(data.mesh, angles, K);
    report["residual_inf"] = max_abs(K.view());
    out << fmt::format("check: margin {:.6f}, Gauss-Bonnet residual {:.3e}, |K|_inf {:.3e}\n",
                       acuteness_margin(angles), gauss_bonnet_residual(data.mesh, angles, K), max_abs(K.view()));
  }
  if (a.isoperimetric) {
    if (data.mesh.vertex_count() > kMaxIsoperimetricVertices) {
      out << fmt::format("check: isoperimetric constant skipped, more than {} vertices\n",
                         kMaxIsoperimetricVertices);
    } else {
      const double c = isoperimetric_constant(data.mesh.skeleton(), data.lengths);
      report["isoperimetric_constant"] = c;
      out << fmt::format("check: isoperimetric constant {:.17g}\n", c);
    }
  }
  write_report(a.common.report_path, report);
  return kOk;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (a.surface != "octagon") throw ParseError(0, fmt::format("unknown surface '{}'", a.surface));
  if (a.refine < 0 || a.refine > 8) throw ParseError(0, "--refine must be in 0..8");
  const ModelSurface m = octagon_fixture(a.refine);
  const std::string text = write_mesh(m.mesh, m.lengths);
  if (a.out_path.empty()) out << text;
  else write_text_file(a.out_path, text);
  return kOk;
}

int cmd_converge(const ConvergeArgs& a, std::ostream& out) {
  apply_threads(a.threads);
  if (a.levels < 1 || a.levels > 8) throw ParseError(0, "--levels must be in 1..8");
  SolveConfig cfg;
  cfg.tolerance = a.tol;
  cfg.max_iterations = a.max_iter;
  const std::vector<ConvergenceRow> rows = convergence_study(a.levels, parse_kappa_spec(a.kappa), cfg);
  const std::string csv = convergence_csv(rows);
  if (a.out_path.empty()) out << csv;
  else write_text_file(a.out_path, csv);
  bool all = true;
  for (const ConvergenceRow& r : rows) all = all && r.converged;
  return all ? kOk : kNotConverged;
}

void add_common(CLI::App* cmd, Common& c, bool mesh_required) {
  auto* mesh = cmd->add_option("--mesh", c.mesh_path, "mesh file in DCPM 1 format");
  if (mesh_required) mesh->required();
  cmd->add_option("--kappa", c.kappa, "const:<negative>, family:<amplitude>, or a curvature file")
      ->capture_default_str();
  cmd->add_option("--report", c.report_path, "JSON report path");
  cmd->add_option("--threads", c.threads, "worker threads (DCPM_THREADS when unset)");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete conformal factors with prescribed curvature", "dcpm"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "damped Newton solve of K(u) = 0");
  add_common(s, solve.common, true);
  s->add_option("--tol", solve.tol, "tolerance on |K|_inf")->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "iteration limit")->capture_default_str();
  s->add_option("--init", solve.init_path, "initial conformal factor file");
  s->add_option("--out", solve.out_path, "output conformal factor file");

  FlowArgs flow;
  auto* f = app.add_subcommand("flow", "RK4 continuation from u0 to K = 0");
  add_common(f, flow.common, true);
  f->add_option("--steps", flow.steps, "RK4 steps")->capture_default_str();
  f->add_flag("--polish,!--no-polish", flow.polish, "finish with Newton")->capture_default_str();
  f->add_option("--tol", flow.tol, "polish tolerance on |K|_inf")->capture_default_str();
  f->add_option("--init", flow.init_path, "initial conformal factor file");
  f->add_option("--out", flow.out_path, "output conformal factor file");
  f->add_option("--trace", flow.trace_path, "checkpoint CSV");

  CheckArgs check;
  auto* c = app.add_subcommand("check", "topology, feasibility and acuteness report");
  add_common(c, check.common, true);
  c->add_flag("--isoperimetric", check.isoperimetric, "exact isoperimetric constant (at most 24 vertices)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write a fixture mesh");
  g->add_option("surface", gen.surface, "fixture name (octagon)")->required();
  g->add_option("--refine", gen.refine, "midpoint refinement levels")->capture_default_str();
  g->add_option("--out", gen.out_path, "output mesh path (stdout when unset)");

  ConvergeArgs conv;
  auto* v = app.add_subcommand("converge", "solve on refined fixtures and tabulate errors");
  v->add_option("--levels", conv.levels, "number of levels, starting at 0")->capture_default_str();
  v->add_option("--kappa", conv.kappa, "const:<negative> or family:<amplitude>")->capture_default_str();
  v->add_option("--tol", conv.tol, "tolerance on |K|_inf")->capture_default_str();
  v->add_option("--max-iter", conv.max_iter, "iteration limit")->capture_default_str();
  v->add_option("--out", conv.out_path, "CSV path (stdout when unset)");
  v->add_option("--threads", conv.threads, "worker threads (DCPM_THREADS when unset)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dcpm: " << e.what() << "\n";
    return kInvalidInput;
  }

  std::vector<std::string> echo{"dcpm"};
  echo.insert(echo.end(), args.begin(), args.end());
  try {
    if (s->parsed()) return cmd_solve(solve, echo, out);
    if (f->parsed()) return cmd_flow(flow, echo, out);
    if (c->parsed()) return cmd_check(check, echo, out);
    if (g->parsed()) return cmd_gen(gen, out);
    return cmd_converge(conv, out);
  } catch (const InfeasibleFaceError& e) {
    err << "dcpm: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const LinearSolveError& e) {
    err << "dcpm: " << e.what() << "\n";
    return kNotConverged;
  } catch (const Error& e) {
    err << "dcpm: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "dcpm: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

} // namespace dcpm::cli
