#include "cdi/gaussian.hpp"

#include <cmath>

namespace cdi {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_same_dim(const Gaussian& a, const Gaussian& b) {
  if (a.dim() != b.dim())
    throw DimensionError("gaussian: dimension mismatch between models");
}

void check_s_range(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw InvalidParameter("gaussian: path parameter s must lie in [0,1]");
}

}  // namespace

double Gaussian::density(const Vec& x) const {
  if (x.size() != dim()) throw DimensionError("Gaussian::density: dimension mismatch");
  const SymMat prec = cov.inverse();
  const Vec d = x - mean;
  const double quad = d.dot(prec.mul(d));
  const double norm = std::pow(kTwoPi, -0.5 * dim()) / std::sqrt(cov.det());
  return norm * std::exp(-0.5 * quad);
}

void validate(const Gaussian& g) {
  if (!g.mean.finite()) throw InvalidMatrix("Gaussian: non-finite mean");
  if (g.cov.size() != g.dim()) throw DimensionError("Gaussian: mean/cov dimension mismatch");
  if (!g.cov.finite()) throw InvalidMatrix("Gaussian: non-finite covariance");
  EigResult e = sym_eig(g.cov);
  const double floor = spd_floor(g.cov);
  for (int i = 0; i < g.dim(); ++i)
    if (e.values[i] <= floor)
      throw NotPositiveDefinite("Gaussian: covariance not positive definite");
}

bool approx_equal(const Gaussian& a, const Gaussian& b, double rel_tol) {
  if (a.dim() != b.dim()) return false;
  auto close = [rel_tol](double x, double y) {
    return std::abs(x - y) <= rel_tol * std::max({std::abs(x), std::abs(y), 1.0});
  };
  for (int i = 0; i < a.dim(); ++i)
    if (!close(a.mean[i], b.mean[i])) return false;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j)
      if (!close(a.cov(i, j), b.cov(i, j))) return false;
  return true;
}

AffineTransportMap ot_map(const Gaussian& g0, const Gaussian& g1) {
  require_same_dim(g0, g1);
  validate(g0);
  validate(g1);
  const SymMat root0 = spd_sqrt(g0.cov);
  const SymMat inv_root0 = spd_inv_sqrt(g0.cov);
  const Mat inner = to_mat(root0).mul(to_mat(g1.cov)).mul(to_mat(root0));
  const SymMat mid = spd_sqrt(to_sym(inner));
  const Mat a = to_mat(inv_root0).mul(to_mat(mid)).mul(to_mat(inv_root0));
  return AffineTransportMap{to_sym(a), g0.mean, g1.mean};
}

Vec eval_forward(const AffineTransportMap& map, double s, const Vec& x) {
  check_s_range(s);
  if (x.size() != map.dim()) throw DimensionError("eval_forward: dimension mismatch");
  const Vec full = map.target_mean + map.matrix.mul(x - map.source_mean);
  return (1.0 - s) * x + s * full;
}

Vec eval_inverse(const AffineTransportMap& map, double s, const Vec& x) {
  check_s_range(s);
  if (x.size() != map.dim()) throw DimensionError("eval_inverse: dimension mismatch");
  // T(s, x) = M_s x + s (mu_1 - A mu_0), with M_s = (1-s) I + s A.
  SymMat ms = s * map.matrix;
  for (int i = 0; i < map.dim(); ++i) ms(i, i) += 1.0 - s;
  const Vec shift = map.target_mean - map.matrix.mul(map.source_mean);
  return ms.inverse().mul(x - s * shift);
}

double forward_jacobian_det(const AffineTransportMap& map, double s) {
  check_s_range(s);
  SymMat ms = s * map.matrix;
  for (int i = 0; i < map.dim(); ++i) ms(i, i) += 1.0 - s;
  return ms.det();
}

Gaussian displacement_gaussian(const Gaussian& g0, const Gaussian& g1, double s) {
  check_s_range(s);
  const AffineTransportMap map = ot_map(g0, g1);
  SymMat ms = s * map.matrix;
  for (int i = 0; i < map.dim(); ++i) ms(i, i) += 1.0 - s;
  const Mat cov = to_mat(ms).mul(to_mat(g0.cov)).mul(to_mat(ms));
  return Gaussian{(1.0 - s) * g0.mean + s * g1.mean, to_sym(cov)};
}

double wasserstein2(const Gaussian& g0, const Gaussian& g1) {
  require_same_dim(g0, g1);
  validate(g0);
  validate(g1);
  const SymMat root0 = spd_sqrt(g0.cov);
  const Mat inner = to_mat(root0).mul(to_mat(g1.cov)).mul(to_mat(root0));
  const SymMat mid = spd_sqrt(to_sym(inner));
  const Vec dm = g1.mean - g0.mean;
  double w2 = dm.dot(dm) + g0.cov.trace() + g1.cov.trace() - 2.0 * mid.trace();
  if (w2 < 0.0) w2 = 0.0;  // roundoff for nearly identical models
  return std::sqrt(w2);
}

}  // namespace cdi
