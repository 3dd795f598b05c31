#ifndef CDI_GAUSSIAN_HPP
#define CDI_GAUSSIAN_HPP

#include "cdi/linalg.hpp"

namespace cdi {

// Multivariate normal model of a coherent structure: mean in physical
// space, SPD covariance in units of length^2.
struct Gaussian {
  Vec mean;
  SymMat cov;

  int dim() const { return mean.size(); }
  // Density value at x.
  double density(const Vec& x) const;
};

// Validates the Gaussian invariants (finite mean, SPD covariance).
void validate(const Gaussian& g);

// Componentwise-relative equality used to decide "same model".
bool approx_equal(const Gaussian& a, const Gaussian& b, double rel_tol = 1e-12);

// Optimal map between two Gaussians, T(x) = target_mean + A (x - source_mean),
// together with its interpolation in the path parameter s:
//   T(s, x) = (1 - s) x + s T(x).
// A is SPD: the map is the gradient of a convex quadratic potential.
struct AffineTransportMap {
  SymMat matrix;    // A
  Vec source_mean;  // mu_0
  Vec target_mean;  // mu_1

  int dim() const { return source_mean.size(); }
};

// Closed-form optimal transport map from g0 to g1:
//   A = Sigma0^{-1/2} (Sigma0^{1/2} Sigma1 Sigma0^{1/2})^{1/2} Sigma0^{-1/2}.
AffineTransportMap ot_map(const Gaussian& g0, const Gaussian& g1);

// Evaluates T(s, x). s = 0 is the identity, s = 1 the full map.
Vec eval_forward(const AffineTransportMap& map, double s, const Vec& x);

// Closed-form inverse of T(s, .): solves ((1-s) I + s A) y = x - s(mu_1 - A mu_0).
Vec eval_inverse(const AffineTransportMap& map, double s, const Vec& x);

// Determinant of the Jacobian (1-s) I + s A of the forward map; the inverse
// map has Jacobian determinant 1/det.
double forward_jacobian_det(const AffineTransportMap& map, double s);

// Parameters of the displacement interpolant between g0 and g1:
//   mu_s = (1-s) mu_0 + s mu_1,  Sigma_s = M_s Sigma0 M_s with M_s = (1-s)I + sA.
Gaussian displacement_gaussian(const Gaussian& g0, const Gaussian& g1, double s);

// 2-Wasserstein distance between Gaussians.
double wasserstein2(const Gaussian& g0, const Gaussian& g1);

}  // namespace cdi

#endif
