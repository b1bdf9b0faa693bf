#include "doctest.h"

#include "oracles.hpp"

#include "dcpm/errors.hpp"
#include "dcpm/graph_calculus.hpp"
#include "dcpm/model_surfaces.hpp"

#include <random>

using namespace dcpm;
using doctest::Approx;

namespace {

Graph path2() { return Graph{2, {{0, 1}}}; }
Graph cycle4() { return Graph{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}}; }

VertexField random_vertex_field(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  VertexField f(n);
  for (auto& x : f.values) x = U(rng);
  return f;
}

EdgeWeight random_weight(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.1, 2.0);
  EdgeWeight w(m);
  for (auto& x : w.values) x = U(rng);
  return w;
}

} // namespace

TEST_CASE("gradient") {
  CHECK(gradient(path2(), EdgeWeight(1, 1.0), VertexField(std::vector<double>{0.0, 1.0})).values[0] == 1.0);
  const Graph g = cycle4();
  for (double v : gradient(g, EdgeWeight(4, 2.5), VertexField(4, 3.0)).values) CHECK(v == 0.0);

  std::mt19937_64 rng(1);
  const Graph sk = octagon_fixture(1).mesh.skeleton();
  const VertexField f = random_vertex_field(sk.vertex_count, rng);
  const EdgeWeight eta = random_weight(sk.edge_count(), rng);
  const Flow x = gradient(sk, eta, f);
  for (int e = 0; e < sk.edge_count(); ++e) {
    const Edge& ed = sk.edges[e];
    if (ed.a == ed.b) {
      CHECK(x.along(sk, e, ed.a) == 0.0);
      continue;
    }
    CHECK(x.along(sk, e, ed.a) == eta[e] * (f[ed.b] - f[ed.a]));
    CHECK(x.along(sk, e, ed.b) == -x.along(sk, e, ed.a));
  }
}

TEST_CASE("divergence") {
  SUBCASE("circulation on a triangle") {
    const Graph tri{3, {{0, 1}, {1, 2}, {2, 0}}};
    for (double v : divergence(tri, Flow(std::vector<double>{1.0, 1.0, 1.0})).values) CHECK(v == 0.0);
  }
  SUBCASE("star graph") {
    const Graph star{5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}};
    const VertexField d = divergence(star, Flow(std::vector<double>(4, 1.0)));
    CHECK(d[0] == 4.0);
    for (int v = 1; v < 5; ++v) CHECK(d[v] == -1.0);
  }
  SUBCASE("sums to zero") {
    std::mt19937_64 rng(2);
    const Graph sk = octagon_fixture(2).mesh.skeleton();
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      Flow x(sk.edges.size());
      for (auto& v : x.values) v = U(rng);
      double total = 0.0;
      for (double v : divergence(sk, x).values) total += v;
      CHECK(std::abs(total) <= 1e-13);
    }
  }
}

TEST_CASE("laplacian_apply and laplacian_matrix") {
  CHECK(laplacian_apply(path2(), EdgeWeight(1, 1.0), VertexField(std::vector<double>{0.0, 1.0})).values ==
        std::vector<double>{1.0, -1.0});
  for (double v : laplacian_apply(cycle4(), EdgeWeight(4, 0.7), VertexField(4, -2.0)).values) CHECK(v == 0.0);

  const Eigen::MatrixXd L2 = Eigen::MatrixXd(laplacian_matrix(path2(), EdgeWeight(1, 1.0)));
  CHECK(L2(0, 0) == -1.0);
  CHECK(L2(0, 1) == 1.0);
  CHECK(L2(1, 0) == 1.0);
  CHECK(L2(1, 1) == -1.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 11;
    Graph g = oracle::random_connected_graph(n, 0.4, rng);
    g.edges.push_back({0, 0});            // loops contribute nothing
    g.edges.push_back(g.edges.front());   // a parallel edge
    const EdgeWeight eta = random_weight(g.edge_count(), rng);
    const VertexField f = random_vertex_field(n, rng);
    const auto Ls = laplacian_matrix(g, eta);
    const Eigen::MatrixXd L = Eigen::MatrixXd(Ls);

    CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // Diagonal is minus the off-diagonal row sum, accumulated in column order.
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) off += L(i, j);
      CHECK(L(i, i) == -off);
    }
    const Eigen::VectorXd Lf = Ls * f.vec();
    const VertexField applied = laplacian_apply(g, eta, f);
    for (int i = 0; i < n; ++i) CHECK(Lf[i] == Approx(applied[i]).epsilon(1e-13).scale(1.0));
    CHECK(oracle::largest_eigenvalue(L) <= 1e-12);

    // Dirichlet form: f . Delta f = -sum eta (f_j - f_i)^2.
    double form = 0.0, energy = 0.0;
    for (int i = 0; i < n; ++i) form += f[i] * applied[i];
    for (int e = 0; e < g.edge_count(); ++e) {
      const double d = f[g.edges[e].b] - f[g.edges[e].a];
      energy += eta[e] * d * d;
    }
    CHECK(form == Approx(-energy).epsilon(1e-12).scale(1.0));
    CHECK(form <= 1e-12);
  }
}

TEST_CASE("perimeter_area on the unit 4-cycle") {
  const Graph g = cycle4();
  const EdgeLengths l(4, 1.0);
  auto empty = perimeter_area(g, l, {false, false, false, false});
  CHECK(empty.perimeter == 0.0);
  CHECK(empty.area == 0.0);
  CHECK(empty.total_area == 4.0);
  auto single = perimeter_area(g, l, {true, false, false, false});
  CHECK(single.perimeter == 2.0);
  CHECK(single.area == 0.0);
  auto pair = perimeter_area(g, l, {true, true, false, false});
  CHECK(pair.perimeter == 2.0);
  CHECK(pair.area == 1.0);
  CHECK(pair.total_area == 4.0);
}

TEST_CASE("isoperimetric_constant") {
  // Adjacent pair: min{1, 3}/4. Three vertices: area 2, min{2, 2}/4 = 0.5 dominates.
  CHECK(isoperimetric_constant(cycle4(), EdgeLengths(4, 1.0)) == 0.5);
  CHECK(isoperimetric_constant(path2(), EdgeLengths(1, 1.0)) == 0.0);
  CHECK_THROWS_AS(isoperimetric_constant(Graph{3, {{0, 1}}}, EdgeLengths(1, 1.0)), Error);
  Graph big{25, {}};
  for (int v = 1; v < 25; ++v) big.edges.push_back({v - 1, v});
  CHECK_THROWS_AS(isoperimetric_constant(big, EdgeLengths(24, 1.0)), Error);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 6;
    const Graph g = oracle::random_connected_graph(n, 0.3, rng);
    EdgeLengths l(g.edge_count());
    for (auto& x : l.values) x = U(rng);
    const double c = isoperimetric_constant(g, l);
    CHECK(c == Approx(oracle::isoperimetric_bruteforce(g, l)).epsilon(1e-13));

    // Relabeling vertices leaves the constant unchanged.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Graph relabeled{n, {}};
    for (const Edge& e : g.edges) relabeled.edges.push_back({perm[e.a], perm[e.b]});
    CHECK(isoperimetric_constant(relabeled, l) == Approx(c).epsilon(1e-13));
  }
}

TEST_CASE("elliptic_estimate_check") {
  const ModelSurface m = octagon_fixture(1);
  const Graph g = m.mesh.skeleton();
  const int n = g.vertex_count;
  const double c1 = isoperimetric_constant(g, m.lengths);

  SUBCASE("zero data") {
    EllipticEstimateInput in{m.lengths, EdgeWeight(g.edge_count(), 1.0), Flow(g.edges.size()),
                             VertexField(n, 0.0), VertexField(n, 1.0), c1, 1.0, 1.0, 1.0};
    const auto r = elliptic_estimate_check(g, in);
    CHECK(r.violations.empty());
    CHECK(r.h_norm == 0.0);
    CHECK(r.w_norm == 0.0);
    CHECK(r.ratio1 == 0.0);
    CHECK(r.ratio2 == 0.0);
    CHECK(r.pass);
  }
  SUBCASE("flow above the C2 bound is reported") {
    Flow x(g.edges.size());
    x.values[3] = 2.0 * m.lengths[3] * m.lengths[3];
    EllipticEstimateInput in{m.lengths, EdgeWeight(g.edge_count(), 1.0), x, std::nullopt, std::nullopt, c1, 1.0, 1.0, 0.0};
    const auto r = elliptic_estimate_check(g, in);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].find("edge 3") != std::string::npos);
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.has_part2);
  }
  SUBCASE("eta below C3 and zero D are reported") {
    EllipticEstimateInput in{m.lengths, EdgeWeight(g.edge_count(), 0.5), Flow(g.edges.size()),
                             VertexField(n, 0.0), VertexField(n, 0.0), c1, 1.0, 1.0, 1.0};
    const auto r = elliptic_estimate_check(g, in);
    CHECK(r.violations.size() == static_cast<std::size_t>(g.edge_count()) + 1);
    CHECK_FALSE(r.pass);
  }
  SUBCASE("random admissible flow reports norm over bound") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Flow x(g.edges.size());
    for (int e = 0; e < g.edge_count(); ++e) x.values[e] = U(rng) * m.lengths[e] * m.lengths[e];
    const EdgeWeight eta = random_weight(g.edge_count(), rng);
    EllipticEstimateInput in{m.lengths, eta, x, std::nullopt, std::nullopt, c1, 1.0, 0.1, 0.0};
    const auto r = elliptic_estimate_check(g, in);
    CHECK(r.violations.empty());
    CHECK(r.h_norm > 0.0);
    CHECK(r.ratio1 == Approx(r.h_norm / r.bound1));
  }
}
