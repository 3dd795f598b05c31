#ifndef CDI_REGISTRATION_HPP
#define CDI_REGISTRATION_HPP

#include <memory>
#include <span>
#include <vector>

#include "cdi/field.hpp"
#include "cdi/gaussian.hpp"

namespace cdi {

// Parameterizations of the four patch edges over [0,1]. bottom/top run
// along increasing xi at eta = 0/1, left/right along increasing eta at
// xi = 0/1. Curves must agree at the corners.
struct PatchBoundary {
  std::function<Vec(double)> bottom, top, left, right;

  static PatchBoundary rectangle(double x1lo, double x1hi, double x2lo, double x2hi);
  static PatchBoundary quadrilateral(const Vec& p00, const Vec& p10, const Vec& p11,
                                     const Vec& p01);
};

// Transfinite (Gordon-Hall) map from the unit square onto the quadrilateral
// patch bounded by four curves, with a Newton-based inverse.
class GordonHallPatch {
public:
  explicit GordonHallPatch(PatchBoundary boundary);

  Vec forward(const Vec& ref) const;
  Mat jacobian(const Vec& ref) const;  // finite-difference Jacobian
  double jacobian_det(const Vec& ref) const;
  // Inverse by damped Newton with multi-start; throws InversionFailed.
  Vec inverse(const Vec& phys) const;
  bool contains(const Vec& phys, double tol = 1e-9) const;

  bool is_affine() const { return affine_; }
  double diameter() const { return diameter_; }

private:
  PatchBoundary b_;
  Vec c00_, c10_, c01_, c11_;
  bool affine_ = false;
  double diameter_ = 1;
};

// Space of boundary-conforming polynomial displacements on the patch:
// tensorized polynomials of degree <= J per axis whose normal component
// vanishes on the reference-square boundary. The H2-seminorm Gram matrix
// is precomputed by Gauss-Legendre quadrature.
class MapSpace {
public:
  MapSpace(int degree, GordonHallPatch patch);

  int degree() const { return degree_; }
  int size() const { return size_; }
  const GordonHallPatch& patch() const { return patch_; }

  // Displacement basis in reference coordinates.
  Vec basis(int m, const Vec& ref) const;
  // Gradient of basis m: grad(i, k) = d phi_i / d ref_k.
  Mat basis_grad(int m, const Vec& ref) const;

  const std::vector<double>& h2_gram() const { return gram_; }
  double gram(int m, int k) const { return gram_[static_cast<std::size_t>(m) * size_ + k]; }

  // Reference-square Gauss-Legendre quadrature used for the Gram matrix
  // and the bijectivity constraint.
  const std::vector<Vec>& quad_points() const { return quad_points_; }
  const std::vector<double>& quad_weights() const { return quad_weights_; }

  // Reference displacement at coefficients a.
  Vec displacement(std::span<const double> a, const Vec& ref) const;
  Mat displacement_grad(std::span<const double> a, const Vec& ref) const;

private:
  struct BasisIndex {
    int component, i, j;
  };
  BasisIndex index(int m) const;

  int degree_;
  int size_;
  GordonHallPatch patch_;
  std::vector<Vec> quad_points_;
  std::vector<double> quad_weights_;
  std::vector<double> gram_;
};

// H2-seminorm penalty a^T G a.
double h2_penalty(const MapSpace& space, std::span<const double> coeffs);

// Fitted boundary-conforming map N(x, s a), bijectivity certificate
// included.
struct RegistrationMap {
  std::shared_ptr<const MapSpace> space;
  std::vector<double> coeffs;

  double pre_fit_rms = 0;   // marker mismatch of the identity map
  double mismatch_rms = 0;  // marker mismatch at the fitted coefficients
  std::vector<double> certificate_s;        // sampled path parameters
  std::vector<double> certificate_min_det;  // min Jacobian det per sample
  bool certified = false;                   // min over samples >= delta_min
  bool stagnation_warning = false;
  std::vector<std::vector<double>> objective_log;  // per continuation stage
};

// Evaluates N(x, s * coeffs). Throws OutOfPatch outside the patch.
Vec eval_map(const RegistrationMap& r, double s, const Vec& x);

// Jacobian determinant of N(., s * coeffs) at reference point.
double map_jacobian_det(const RegistrationMap& r, double s, const Vec& ref);

struct Marker {
  Vec source, target;
  int cluster = 0;
};

struct FitOptions {
  double lambda = -1.0;  // < 0 selects 1e-3 * N_markers / diameter^2
  double delta_min = 0.1;
  int max_iterations = 500;  // per continuation stage
  double grad_tol = 1e-8;
};

// Penalized least-squares fit of the marker displacements subject to
// det grad N >= delta_min at the quadrature points (log-barrier with
// decreasing weight, then a feasible polish pass).
RegistrationMap fit_registration(std::shared_ptr<const MapSpace> space,
                                 std::span<const Marker> markers, const FitOptions& opts = {});

// Brute-force assignment between two equally sized Gaussian mixtures
// minimizing the total pairwise W2 distance; ties resolve to the
// lexicographically smallest permutation. models1[perm[k]] pairs with
// models0[k].
std::vector<int> match_mixtures(std::span<const Gaussian> models0,
                                std::span<const Gaussian> models1);

// Boundary-aware convex displacement interpolation
//   (1-s) U0(N(x, s a_10)) + s U1(N(x, (1-s) a_01)).
Vec ba_cdi_eval(const Field& u0, const Field& u1, const RegistrationMap& r01,
                const RegistrationMap& r10, double s, const Vec& x);

}  // namespace cdi

#endif
