#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dcpm {

/// Dense real values indexed by mesh element id. The tag keeps edge, face and
/// vertex quantities from being mixed up at call sites.
template <class Tag>
struct Field {
  std::vector<double> values;

  Field() = default;
  explicit Field(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit Field(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const { return values; }

  Eigen::Map<Eigen::VectorXd> vec() { return {values.data(), static_cast<Eigen::Index>(values.size())}; }
  Eigen::Map<const Eigen::VectorXd> vec() const {
    return {values.data(), static_cast<Eigen::Index>(values.size())};
  }

  static Field from(const Eigen::VectorXd& v) { return Field(std::vector<double>(v.data(), v.data() + v.size())); }

  friend bool operator==(const Field&, const Field&) = default;
};

struct EdgeTag;
struct FaceTag;
struct VertexTag;
struct WeightTag;

/// l: strictly positive length per edge.
using EdgeLengths = Field<EdgeTag>;
/// kappa: strictly negative background curvature per face.
using FaceCurvature = Field<FaceTag>;
/// Generic real function on vertices.
using VertexField = Field<VertexTag>;
/// u: log scale factor per vertex.
using ConformalFactor = VertexField;
/// K: angle defect per vertex.
using VertexCurvature = VertexField;
/// eta: symmetric weight per undirected edge.
using EdgeWeight = Field<WeightTag>;

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

} // namespace dcpm
