#include "dcpm/graph_calculus.hpp"

#include "dcpm/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace dcpm {

double Flow::along(const Graph& g, int e, int from) const {
  const Edge& ed = g.edges[e];
  if (ed.a == ed.b) return 0.0;
  return from == ed.a ? values[e] : -values[e];
}

Flow gradient(const Graph& g, const EdgeWeight& eta, const VertexField& f) {
  Flow x(g.edges.size());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges[e];
    x.values[e] = ed.a == ed.b ? 0.0 : eta[e] * (f[ed.b] - f[ed.a]);
  }
  return x;
}

VertexField divergence(const Graph& g, const Flow& x) {
  VertexField div(g.vertex_count, 0.0);
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.a == ed.b) continue;
    div[ed.a] += x.values[e];
    div[ed.b] -= x.values[e];
  }
  return div;
}

VertexField laplacian_apply(const Graph& g, const EdgeWeight& eta, const VertexField& f) {
  return divergence(g, gradient(g, eta, f));
}

Eigen::SparseMatrix<double> laplacian_matrix(const Graph& g, const EdgeWeight& eta) {
  // Off-diagonals per row in ascending column order; the diagonal is minus
  // their sum in that same order.
  std::vector<std::map<int, double>> rows(g.vertex_count);
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.a == ed.b) continue;
    rows[ed.a][ed.b] += eta[e];
    rows[ed.b][ed.a] += eta[e];
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < g.vertex_count; ++i) {
    double off = 0.0;
    for (const auto& [j, w] : rows[i]) {
      triplets.emplace_back(i, j, w);
      off += w;
    }
    triplets.emplace_back(i, i, -off);
  }
  Eigen::SparseMatrix<double> L(g.vertex_count, g.vertex_count);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

PerimeterArea perimeter_area(const Graph& g, const EdgeLengths& l, const std::vector<bool>& in_subset) {
  PerimeterArea r;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges[e];
    const bool ia = in_subset[ed.a], ib = in_subset[ed.b];
    r.total_area += l[e] * l[e];
    if (ia && ib) r.area += l[e] * l[e];
    else if (ia != ib) r.perimeter += l[e];
  }
  return r;
}

double isoperimetric_constant(const Graph& g, const EdgeLengths& l) {
  const int n = g.vertex_count;
  if (n > kMaxIsoperimetricVertices)
    throw Error(fmt::format("isoperimetric enumeration limited to {} vertices, graph has {}",
                            kMaxIsoperimetricVertices, n));
  if (!g.is_connected()) throw Error("isoperimetric constant needs a connected graph");
  if (n < 2) return 0.0;

  struct MaskedEdge {
    std::uint32_t a, b;
    double len, sq;
  };
  std::vector<MaskedEdge> edges;
  double total = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    edges.push_back({1u << g.edges[e].a, 1u << g.edges[e].b, l[e], l[e] * l[e]});
    total += l[e] * l[e];
  }

  // Area is not complement-symmetric (boundary edges count toward |V|_l only), so every
  // proper subset is visited.
  const std::uint32_t full = (1u << n) - 1;
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    double perimeter = 0.0, area = 0.0;
    for (const MaskedEdge& e : edges) {
      const bool ia = mask & e.a, ib = mask & e.b;
      if (ia && ib) area += e.sq;
      else if (ia != ib) perimeter += e.len;
    }
    best = std::max(best, std::min(area, total - area) / (perimeter * perimeter));
  }
  return best;
}

namespace {

double safe_ratio(double value, double bound) {
  if (bound > 0.0) return value / bound;
  return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

} // namespace

EllipticEstimateReport elliptic_estimate_check(const Graph& g, const EllipticEstimateInput& in) {
  EllipticEstimateReport r;
  const int n = g.vertex_count;
  if (static_cast<int>(in.l.size()) != g.edge_count() || static_cast<int>(in.eta.size()) != g.edge_count() ||
      static_cast<int>(in.x.size()) != g.edge_count())
    throw TopologyError("edge field sizes do not match the graph");

  double total_area = 0.0;
  for (double v : in.l.values) total_area += v * v;
  r.scale = max_abs(in.l.view()) * std::sqrt(total_area);

  if (!(in.c3 > 0.0)) r.violations.push_back("C3 must be positive");
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!(in.eta[e] >= in.c3)) r.violations.push_back(fmt::format("edge {}: eta = {:.17g} < C3", e, in.eta[e]));
    const double cap = in.c2 * in.l[e] * in.l[e];
    if (std::abs(in.x.values[e]) > cap)
      r.violations.push_back(fmt::format("edge {}: |x| = {:.17g} exceeds C2 l^2 = {:.17g}", e, std::abs(in.x.values[e]), cap));
  }

  const Eigen::MatrixXd L = Eigen::MatrixXd(laplacian_matrix(g, in.eta));
  const VertexField div = divergence(g, in.x);
  const double growth = std::sqrt(in.c1 + 1.0) / in.c3;

  // Part 1: mean-zero solution of Delta h = div x via (-Delta + 11^T / n) h = -div x.
  Eigen::MatrixXd A = -L + Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::LLT<Eigen::MatrixXd> llt1(A);
  if (llt1.info() != Eigen::Success) throw LinearSolveError("Laplacian system is singular");
  Eigen::VectorXd h = llt1.solve(-div.vec());
  h.array() -= h.mean();
  r.h_norm = h.lpNorm<Eigen::Infinity>();
  r.bound1 = 4.0 * in.c2 * growth * r.scale;
  r.ratio1 = safe_ratio(r.h_norm, r.bound1);

  if (in.y && in.diag) {
    r.has_part2 = true;
    const VertexField& y = *in.y;
    const VertexField& D = *in.diag;
    if (static_cast<int>(y.size()) != n || static_cast<int>(D.size()) != n)
      throw TopologyError("vertex field sizes do not match the graph");
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      if (D[i] < 0.0) r.violations.push_back(fmt::format("vertex {}: D = {:.17g} is negative", i, D[i]));
      if (D[i] != 0.0) nonzero = true;
      const double cap = in.c4 * D[i] * r.scale;
      if (std::abs(y[i]) > cap)
        r.violations.push_back(fmt::format("vertex {}: |y| = {:.17g} exceeds C4 D |l| |V|^1/2 = {:.17g}", i, std::abs(y[i]), cap));
    }
    if (!nonzero) r.violations.push_back("D is zero");

    Eigen::MatrixXd B = -L;
    B.diagonal() += D.vec();
    Eigen::LLT<Eigen::MatrixXd> llt2(B);
    if (llt2.info() != Eigen::Success) throw LinearSolveError("D - Delta is singular");
    Eigen::VectorXd w = llt2.solve(div.vec() + y.vec());
    r.w_norm = w.lpNorm<Eigen::Infinity>();
    r.bound2 = (in.c4 + 8.0 * in.c2 * growth) * r.scale;
    r.ratio2 = safe_ratio(r.w_norm, r.bound2);
  }

  r.pass = r.violations.empty() && r.ratio1 <= 1.0 && (!r.has_part2 || r.ratio2 <= 1.0);
  return r;
}

} // namespace dcpm
