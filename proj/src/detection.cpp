#include "cdi/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cdi {

PointCloud select_points(std::span<const Vec> grid_points, const TestingFunction& t) {
  if (grid_points.empty()) throw EmptySelection("select_points: empty grid");
  PointCloud cloud;
  for (const Vec& x : grid_points) {
    const double v = t(x);
    if (!std::isfinite(v)) throw InvalidField("select_points: non-finite testing value");
    if (v > 0.0) cloud.points.push_back(x);
  }
  if (cloud.points.empty())
    throw EmptySelection("select_points: testing function marked no points");
  return cloud;
}

PointCloud select_points(std::span<const Vec> grid_points, std::span<const double> values) {
  if (grid_points.empty() || grid_points.size() != values.size())
    throw InvalidField("select_points: empty or mismatched inputs");
  PointCloud cloud;
  for (std::size_t i = 0; i < grid_points.size(); ++i) {
    if (!std::isfinite(values[i])) throw InvalidField("select_points: non-finite testing value");
    if (values[i] > 0.0) cloud.points.push_back(grid_points[i]);
  }
  if (cloud.points.empty())
    throw EmptySelection("select_points: testing function marked no points");
  return cloud;
}

PointCloud select_top_fraction(std::span<const Vec> points, std::span<const double> values,
                               double fraction) {
  if (points.empty() || points.size() != values.size())
    throw InvalidField("select_top_fraction: empty or mismatched inputs");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw InvalidFraction("select_top_fraction: fraction must lie in (0,1]");
  const std::size_t n = points.size();
  const std::size_t count =
      std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());  // keep input order in the output
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t idx : order) cloud.points.push_back(points[idx]);
  return cloud;
}

Gaussian mle_fit(const PointCloud& cloud) {
  if (cloud.points.empty()) throw EmptySelection("mle_fit: empty cloud");
  const int n = cloud.points.front().size();
  const std::size_t count = cloud.points.size();
  if (count < static_cast<std::size_t>(n) + 1)
    throw NotPositiveDefinite("mle_fit: need at least n+1 points");

  Vec mean(n);
  for (const Vec& p : cloud.points) {
    if (p.size() != n) throw DimensionError("mle_fit: mixed point dimensions");
    mean += p;
  }
  mean *= 1.0 / static_cast<double>(count);

  SymMat cov(n);
  for (const Vec& p : cloud.points) {
    const Vec d = p - mean;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) cov(i, j) += d[i] * d[j];
  }
  cov = (1.0 / static_cast<double>(count)) * cov;

  Gaussian g{mean, cov};
  try {
    validate(g);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite("mle_fit: degenerate cloud (collinear or coincident points)");
  }
  return g;
}

double ducros_indicator(const Vec& velocity, double div_u, double curl_magnitude,
                        double sound_speed, double pressure, const Vec& grad_p, double eps) {
  if (!velocity.finite() || !grad_p.finite() || !std::isfinite(div_u) ||
      !std::isfinite(curl_magnitude) || !std::isfinite(sound_speed) ||
      !std::isfinite(pressure) || !std::isfinite(eps))
    throw InvalidField("ducros_indicator: non-finite input");
  if (!(pressure + eps > 0.0)) throw InvalidField("ducros_indicator: p + eps must be positive");
  if (!(sound_speed > 0.0)) throw InvalidField("ducros_indicator: sound speed must be positive");

  const double compression = std::max(-div_u, 0.0);
  const double denom = std::sqrt(div_u * div_u + curl_magnitude * curl_magnitude +
                                 sound_speed * sound_speed);
  return compression / denom * (grad_p.norm() / (pressure + eps)) * velocity.norm();
}

std::vector<double> ducros_field_values(const StructuredField& f, double eps) {
  if (f.dim() != 2 || f.components() < 4)
    throw InvalidField("ducros_field_values: expected a 2D snapshot with (u1,u2,p,a) components");
  const StructuredField du1 = gradient_fd(f, 0);
  const StructuredField du2 = gradient_fd(f, 1);
  const StructuredField dp = gradient_fd(f, 2);
  std::vector<double> out(f.node_count());
  std::size_t k = 0;
  for (int i = 0; i < f.n1(); ++i)
    for (int j = 0; j < f.n2(); ++j) {
      const Vec u{f.value(i, j, 0), f.value(i, j, 1)};
      const double div = du1.value(i, j, 0) + du2.value(i, j, 1);
      const double curl = du2.value(i, j, 0) - du1.value(i, j, 1);
      const Vec gp{dp.value(i, j, 0), dp.value(i, j, 1)};
      out[k++] = ducros_indicator(u, div, std::abs(curl), f.value(i, j, 3), f.value(i, j, 2),
                                  gp, eps);
    }
  return out;
}

std::vector<PointCloud> split_clusters(const PointCloud& cloud,
                                       const std::function<int(const Vec&)>& rule) {
  std::map<int, PointCloud> buckets;
  for (const Vec& p : cloud.points) {
    const int label = rule(p);
    PointCloud& c = buckets[label];
    c.points.push_back(p);
    c.labels.push_back(label);
  }
  std::vector<PointCloud> out;
  out.reserve(buckets.size());
  for (auto& [label, c] : buckets) out.push_back(std::move(c));
  return out;
}

std::vector<double> forward_diff_values(const StructuredField& f, int component,
                                        double threshold) {
  const double h = f.spacing1();
  std::vector<double> out(f.node_count());
  std::size_t k = 0;
  for (int i = 0; i < f.n1(); ++i)
    for (int j = 0; j < f.n2(); ++j) {
      double diff;
      if (i < f.n1() - 1)
        diff = f.value(i + 1, j, component) - f.value(i, j, component);
      else
        diff = f.value(i, j, component) - f.value(i - 1, j, component);
      out[k++] = std::abs(diff) / h - threshold;
    }
  return out;
}

std::vector<Vec> grid_nodes(const StructuredField& f) {
  std::vector<Vec> nodes;
  nodes.reserve(f.node_count());
  for (int i = 0; i < f.n1(); ++i)
    for (int j = 0; j < f.n2(); ++j) nodes.push_back(f.node_coords(i, j));
  return nodes;
}

}  // namespace cdi
