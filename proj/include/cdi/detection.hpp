#ifndef CDI_DETECTION_HPP
#define CDI_DETECTION_HPP

#include <functional>
#include <span>
#include <vector>

#include "cdi/field.hpp"
#include "cdi/gaussian.hpp"

namespace cdi {

// Marked points with optional cluster labels.
struct PointCloud {
  std::vector<Vec> points;
  std::vector<int> labels;  // empty, or one label per point

  std::size_t size() const { return points.size(); }
};

// Scalar criterion marking the coherent structure: points with a positive
// value are selected.
using TestingFunction = std::function<double(const Vec&)>;

// Returns exactly the points with t(x) > 0, in input order. Throws
// EmptySelection when nothing is marked.
PointCloud select_points(std::span<const Vec> grid_points, const TestingFunction& t);

// Same selection rule on precomputed testing values.
PointCloud select_points(std::span<const Vec> grid_points, std::span<const double> values);

// Returns the ceil(fraction * N) points with the largest values; ties are
// broken by input order.
PointCloud select_top_fraction(std::span<const Vec> points, std::span<const double> values,
                               double fraction);

// Maximum-likelihood Gaussian of the marked positions: arithmetic mean and
// 1/N-normalized covariance.
Gaussian mle_fit(const PointCloud& cloud);

// Pointwise shock indicator combining a compression sensor, a normalized
// pressure gradient and the velocity magnitude:
//   phi = (-div u)^+ / sqrt(div^2 + |curl|^2 + a^2) * |grad p| / (p + eps) * |u|.
double ducros_indicator(const Vec& velocity, double div_u, double curl_magnitude,
                        double sound_speed, double pressure, const Vec& grad_p, double eps);

// Nodal indicator values over a 2D snapshot whose components are
// (u1, u2, p, a). Derivatives use central finite differences.
std::vector<double> ducros_field_values(const StructuredField& f, double eps);

// Partitions a cloud by a user rule, preserving order within each cluster.
// Clusters are emitted in ascending label order.
std::vector<PointCloud> split_clusters(const PointCloud& cloud,
                                       const std::function<int(const Vec&)>& rule);

// Testing-function values of the forward-difference criterion
//   |f(x1 + h, x2) - f(x1, x2)| / h - threshold
// with h the grid spacing along x1 and a backward difference at the right
// boundary. Values are returned per node in node order.
std::vector<double> forward_diff_values(const StructuredField& f, int component,
                                        double threshold);

// All node coordinates of a structured grid, in node order (x2 fastest).
std::vector<Vec> grid_nodes(const StructuredField& f);

}  // namespace cdi

#endif
