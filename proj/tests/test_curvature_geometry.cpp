#include "doctest.h"

#include "oracles.hpp"

#include "dcpm/curvature_geometry.hpp"
#include "dcpm/errors.hpp"
#include "dcpm/model_surfaces.hpp"
#include "dcpm/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace dcpm;
using doctest::Approx;

namespace {

// Reference values from 30-digit evaluation of the closed forms.
constexpr double kAsinhHalfTwice = 0.962423650119206894995517826849; // 2 asinh(1/2)
constexpr double kQuarterAsinh2 = 0.721817737589405171246638370137;  // asinh(2) / 2
constexpr double kTwoAsinh1 = 1.76274717403908605046521864996;       // 2 asinh(1)
constexpr double kEquilateralAngle = 0.918797872178027369036733054549; // H = (1, 1, 1)

// Single triangle used as a six-face fan around one vertex: a hexagon of
// equilateral triangles, center vertex 0, rim vertices 1..6.
SurfaceMesh hexagon_fan() {
  std::vector<Edge> edges;
  for (int k = 0; k < 6; ++k) edges.push_back({0, 1 + k});           // spokes 0..5
  for (int k = 0; k < 6; ++k) edges.push_back({1 + k, 1 + (k + 1) % 6}); // rim 6..11
  std::vector<FaceEdges> faces;
  for (int k = 0; k < 6; ++k)
    faces.push_back({DirectedEdge{k, true}, DirectedEdge{6 + k, true}, DirectedEdge{(k + 1) % 6, false}});
  return SurfaceMesh(7, edges, faces);
}

} // namespace

TEST_CASE("scale_lengths") {
  const ModelSurface m = octagon_fixture(1);
  const ConformalFactor zero(m.mesh.vertex_count(), 0.0);
  CHECK(scale_lengths(m.mesh, zero, m.lengths) == m.lengths);
  CHECK(scale_length(1.0, 2.0 * std::log(2.0), 0.0) == Approx(2.0).epsilon(1e-15));
  CHECK(scale_length(3.0, 0.5, 0.5) == Approx(3.0 * std::exp(0.5)).epsilon(1e-15));

  // Octagon loop edges scale by exp(u_i).
  const ModelSurface o = gen_octagon_genus2();
  const ConformalFactor u(std::vector<double>{0.0, 0.3});
  CHECK(scale_lengths(o.mesh, u, o.lengths)[8] == Approx(std::exp(0.3) * o.lengths[8]).epsilon(1e-15));

  // u * (v * l) = (u + v) * l.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    ConformalFactor a(m.mesh.vertex_count()), b(m.mesh.vertex_count()), sum(m.mesh.vertex_count());
    for (int v = 0; v < m.mesh.vertex_count(); ++v) {
      a[v] = U(rng);
      b[v] = U(rng);
      sum[v] = a[v] + b[v];
    }
    const EdgeLengths lhs = scale_lengths(m.mesh, a, scale_lengths(m.mesh, b, m.lengths));
    const EdgeLengths rhs = scale_lengths(m.mesh, sum, m.lengths);
    for (std::size_t e = 0; e < lhs.size(); ++e) CHECK(lhs[e] == Approx(rhs[e]).epsilon(1e-14));
  }
}

TEST_CASE("constant-curvature and model lengths") {
  CHECK(constant_curvature_edge_length(-1.0, 1.0) == Approx(kAsinhHalfTwice).epsilon(1e-15));
  CHECK(constant_curvature_edge_length(-4.0, 1.0) == Approx(kQuarterAsinh2).epsilon(1e-15));
  CHECK(std::abs(constant_curvature_edge_length(-1.0, 1e-8) - 1e-8) <= 1e-15 * 1e-8);

  CHECK(model_length(-1.0, 1.0) == Approx(kAsinhHalfTwice).epsilon(1e-15));
  CHECK(model_length(-2.0, 1.0) == Approx(kTwoAsinh1).epsilon(1e-15));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> K(-3.0, -0.1), L(1e-4, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double k = K(rng), s = L(rng);
    const double H = model_length(k, s);
    CHECK(H == Approx(-k * constant_curvature_edge_length(k, s)).epsilon(1e-14));
    const double t = std::tanh(H / 2);
    CHECK(t * t == Approx(k * k * s * s / (k * k * s * s + 4.0)).epsilon(1e-14));
    CHECK(model_length(k, s * 1.001) > H);
    CHECK(constant_curvature_edge_length(k, s * 1.001) > constant_curvature_edge_length(k, s));
  }
}

TEST_CASE("hyperbolic_angles") {
  const auto eq = hyperbolic_angles({1.0, 1.0, 1.0});
  for (double a : eq) CHECK(a == Approx(kEquilateralAngle).epsilon(1e-14));
  CHECK(eq[0] + eq[1] + eq[2] < std::numbers::pi);

  for (double a : hyperbolic_angles({1e-4, 1e-4, 1e-4})) CHECK(std::abs(a - std::numbers::pi / 3) < 1e-8);

  CHECK_THROWS_AS(hyperbolic_angles({2.2, 1.0, 1.0}), InfeasibleFaceError);
  CHECK_THROWS_AS(hyperbolic_angles({2.0, 1.0, 1.0}), InfeasibleFaceError);
  CHECK_FALSE(triangle_feasible({2.0 - 1e-14, 1.0, 1.0}));
  CHECK(triangle_feasible({2.0 - 1e-9, 1.0, 1.0}));

  // Against the direct law of cosines, and corner relabeling permutes angles.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  for (int i = 0; i < 2000; ++i) {
    std::array<double, 3> s{U(rng), U(rng), U(rng)};
    if (!triangle_feasible(s) || !triangle_feasible({s[0] * 1.01, s[1], s[2]})) continue;
    const auto a = hyperbolic_angles(s);
    const auto ref = oracle::law_of_cosines_angles(s);
    for (int k = 0; k < 3; ++k) CHECK(a[k] == Approx(ref[k]).epsilon(1e-9));
    CHECK(a[0] + a[1] + a[2] < std::numbers::pi);
    const auto p = hyperbolic_angles({s[2], s[0], s[1]});
    CHECK(p[0] == a[2]);
    CHECK(p[1] == a[0]);
    CHECK(p[2] == a[1]);
  }
}

TEST_CASE("corner_angles and infeasible faces") {
  const SurfaceMesh fan = hexagon_fan();
  // kappa = -1 and l = 2 sinh(1/2) give model length exactly 1 (up to rounding).
  const EdgeLengths l(fan.edge_count(), 2.0 * std::sinh(0.5));
  const FaceCurvature kappa(fan.face_count(), -1.0);
  for (double a : corner_angles(fan, kappa, l, 0)) CHECK(a == Approx(kEquilateralAngle).epsilon(1e-13));

  EdgeLengths bad = l;
  bad[6] = 10.0;
  try {
    corner_angles(fan, kappa, bad, 0);
    FAIL("expected infeasible face");
  } catch (const InfeasibleFaceError& e) {
    CHECK(e.face() == 0);
  }
  CHECK(first_infeasible_face(fan, kappa, bad) == 0);
  CHECK_FALSE(first_infeasible_face(fan, kappa, l).has_value());
}

TEST_CASE("discrete_curvature at a vertex of six equilateral faces") {
  const SurfaceMesh fan = hexagon_fan();
  const EdgeLengths l(fan.edge_count(), 2.0 * std::sinh(0.5));
  const FaceCurvature kappa(fan.face_count(), -1.0);
  const VertexCurvature K = discrete_curvature(fan, kappa, ConformalFactor(7, 0.0), l);
  CHECK(K[0] == Approx(2.0 * std::numbers::pi - 6.0 * kEquilateralAngle).epsilon(1e-12));
  CHECK(K[0] == Approx(0.770398074111422262704888439264).epsilon(1e-12));
  CHECK(acuteness_margin(fan, kappa, l) == Approx(0.651998454616869250194588637091).epsilon(1e-12));
}

TEST_CASE("a vertex with corners summing to 2 pi has zero curvature") {
  // True curvature -1 lengths on the octagon: with the model transform removed
  // (H = l) the angle sums are exactly 2 pi.
  const ModelSurface m = gen_octagon_genus2();
  const VertexField sums = true_angle_sums(m.mesh, m.lengths);
  for (double s : sums.values) CHECK(2.0 * std::numbers::pi - s == Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("Gauss-Bonnet holds on random feasible inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-0.1, 0.1), K(-2.0, -0.5);
  for (int level = 0; level <= 2; ++level) {
    const ModelSurface m = octagon_fixture(level);
    for (int trial = 0; trial < 10; ++trial) {
      ConformalFactor u(m.mesh.vertex_count());
      for (auto& x : u.values) x = U(rng);
      FaceCurvature kappa(m.mesh.face_count());
      for (auto& x : kappa.values) x = K(rng);
      const EdgeLengths scaled = scale_lengths(m.mesh, u, m.lengths);
      const CornerAngles angles = all_corner_angles(m.mesh, kappa, scaled);
      const VertexCurvature Kv = curvature_from_angles(m.mesh, angles);
      CHECK(std::abs(gauss_bonnet_residual(m.mesh, angles, Kv)) <= 1e-9 * m.mesh.face_count());
      for (const auto& a : angles.per_face) CHECK(a[0] + a[1] + a[2] < std::numbers::pi);
    }
  }
}

TEST_CASE("acuteness margin") {
  // A right angle: sides with cosh c = cosh a cosh b.
  const double a = 0.7, b = 0.9, c = std::acosh(std::cosh(a) * std::cosh(b));
  const auto ang = hyperbolic_angles({a, b, c});
  CHECK(std::numbers::pi / 2 - ang[2] == Approx(0.0).scale(1.0).epsilon(1e-12));

  // Shrinking an equilateral mesh drives the margin to pi/2 - pi/3.
  const SurfaceMesh fan = hexagon_fan();
  const FaceCurvature kappa(fan.face_count(), -1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double scale : {1.0, 0.3, 0.1, 0.01, 0.001}) {
    const double margin = acuteness_margin(fan, kappa, EdgeLengths(fan.edge_count(), scale));
    CHECK(margin < previous);
    CHECK(margin > std::numbers::pi / 6);
    previous = margin;
  }
  CHECK(previous == Approx(std::numbers::pi / 6).epsilon(1e-6));
}

TEST_CASE("max_length") {
  CHECK(max_length(EdgeLengths(std::vector<double>{1.0, 2.0, 3.0})) == 3.0);
  CHECK(max_length(EdgeLengths(5, 0.25)) == 0.25);
  const ModelSurface m = octagon_fixture(1);
  ConformalFactor u(m.mesh.vertex_count());
  for (int v = 0; v < m.mesh.vertex_count(); ++v) u[v] = 0.01 * (v % 7) - 0.03;
  CHECK(max_length(scale_lengths(m.mesh, u, m.lengths)) <= std::exp(0.03) * max_length(m.lengths));
}

TEST_CASE("thread count does not change results") {
  const ModelSurface m = octagon_fixture(3);
  const FaceCurvature kappa(m.mesh.face_count(), -1.3);
  ConformalFactor u(m.mesh.vertex_count());
  for (int v = 0; v < m.mesh.vertex_count(); ++v) u[v] = 0.001 * ((v * 37) % 11);
  set_thread_count(1);
  const VertexCurvature serial = discrete_curvature(m.mesh, kappa, u, m.lengths);
  set_thread_count(4);
  const VertexCurvature threaded = discrete_curvature(m.mesh, kappa, u, m.lengths);
  set_thread_count(1);
  CHECK(serial == threaded);
}

TEST_CASE("geometry input checks") {
  const ModelSurface m = gen_octagon_genus2();
  CHECK_NOTHROW(check_geometry_inputs(m.mesh, FaceCurvature(8, -1.0), m.lengths));
  CHECK_THROWS_AS(check_geometry_inputs(m.mesh, FaceCurvature(8, 0.0), m.lengths), TopologyError);
  CHECK_THROWS_AS(check_geometry_inputs(m.mesh, FaceCurvature(7, -1.0), m.lengths), TopologyError);
  CHECK_THROWS_AS(check_geometry_inputs(m.mesh, FaceCurvature(8, -1.0), EdgeLengths(12, -1.0)), TopologyError);
}
