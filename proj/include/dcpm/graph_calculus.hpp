#pragma once

#include "dcpm/fields.hpp"
#include "dcpm/graph.hpp"

#include <Eigen/SparseCore>

#include <optional>
#include <string>
#include <vector>

namespace dcpm {

/// Antisymmetric edge function. values[e] is x along the stored direction
/// edges[e].a -> edges[e].b; reading the other way negates it. Loops carry 0.
class Flow {
public:
  Flow() = default;
  explicit Flow(std::size_t edge_count) : values(edge_count, 0.0) {}
  explicit Flow(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  /// x_{from, other end} on edge e.
  double along(const Graph& g, int e, int from) const;

  std::vector<double> values;
};

/// (grad f)_{ij} = eta_ij (f_j - f_i).
Flow gradient(const Graph& g, const EdgeWeight& eta, const VertexField& f);

/// div(x)_i = sum_{j ~ i} x_ij, accumulated in edge order.
VertexField divergence(const Graph& g, const Flow& x);

/// (Delta f)_i = sum_{j ~ i} eta_ij (f_j - f_i).
VertexField laplacian_apply(const Graph& g, const EdgeWeight& eta, const VertexField& f);

/// Matrix of Delta_eta: off-diagonal eta_ij summed over parallel edges, diagonal
/// minus the row's off-diagonal sum. Loops contribute nothing.
Eigen::SparseMatrix<double> laplacian_matrix(const Graph& g, const EdgeWeight& eta);

struct PerimeterArea {
  double perimeter = 0.0;  // sum of l over edges leaving the subset
  double area = 0.0;       // sum of l^2 over edges inside the subset
  double total_area = 0.0; // sum of l^2 over all edges
};

/// in_subset has one flag per vertex.
PerimeterArea perimeter_area(const Graph& g, const EdgeLengths& l, const std::vector<bool>& in_subset);

inline constexpr int kMaxIsoperimetricVertices = 24;

/// Smallest C with min(|V0|, |V|-|V0|) <= C |dV0|^2 for every proper nonempty
/// V0, by exhaustive enumeration. Throws Error for more than
/// kMaxIsoperimetricVertices vertices or a disconnected graph.
double isoperimetric_constant(const Graph& g, const EdgeLengths& l);

struct EllipticEstimateInput {
  EdgeLengths l;
  EdgeWeight eta;
  Flow x;
  std::optional<VertexField> y;
  std::optional<VertexField> diag; // D
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

struct EllipticEstimateReport {
  double scale = 0.0;        // |l| * |V|_l^{1/2}
  double h_norm = 0.0;       // |Delta^{-1} div x|, mean-zero representative
  double bound1 = 0.0;       // 4 C2 sqrt(C1+1) / C3 * scale
  double ratio1 = 0.0;
  bool has_part2 = false;
  double w_norm = 0.0;       // |(D - Delta)^{-1}(div x + y)|
  double bound2 = 0.0;       // (C4 + 8 C2 sqrt(C1+1) / C3) * scale
  double ratio2 = 0.0;
  std::vector<std::string> violations; // precondition failures
  bool pass = false;                   // no violations and both ratios <= 1
};

/// Numerically checks the divergence estimate for a weighted Laplacian.
/// Part 2 runs when both y and diag are given. Precondition failures are
/// reported, not thrown; a singular system throws LinearSolveError.
EllipticEstimateReport elliptic_estimate_check(const Graph& g, const EllipticEstimateInput& in);

} // namespace dcpm
