#ifndef CDI_INTERPOLATION_HPP
#define CDI_INTERPOLATION_HPP

#include <utility>
#include <vector>

#include "cdi/field.hpp"
#include "cdi/gaussian.hpp"

namespace cdi {

// Interpolation operator between two snapshots: the snapshots themselves
// plus the Gaussian-model transport maps in both directions. map10 is the
// optimal map with the roles of the models swapped (not a numerical
// inverse of map01).
struct CdiOperator {
  Field u0, u1;
  AffineTransportMap map01;  // g[U0] -> g[U1]
  AffineTransportMap map10;  // g[U1] -> g[U0]
};

CdiOperator make_cdi_operator(Field u0, Field u1, const Gaussian& g0, const Gaussian& g1);

// Convex displacement interpolation,
//   U(s, x) = (1-s) U0(W(s, x)) + s U1(T(1-s, x)),
// with W(s, x) = (1-s) x + s R(x), R the full reverse map, and
// T(s, x) = (1-s) x + s T(x). Endpoints return the snapshots exactly.
Vec cdi_eval(const CdiOperator& op, double s, const Vec& x);

// Plain convex blend (1-s) U0(x) + s U1(x).
Vec convex_eval(const Field& u0, const Field& u1, double s, const Vec& x);

// Displacement (geodesic) interpolant of U0 treated as a density:
//   U(s, x) = U0(R(s, x)) det(grad R(s, x)),
// where R(s, .) is the closed-form inverse of the s-path of map01. Exact
// for self-similar densities whose optimal map the Gaussian models
// reproduce.
Vec mccann_eval(const CdiOperator& op, double s, const Vec& x);

// Lagrangian interpolation: linear blending of the mapped snapshots,
//   U(s, x) = ((1-s) U0 + s U1 o T(1, .)) o R(s, x).
// Not symmetric under swapping the snapshots.
Vec lagrangian_eval(const CdiOperator& op, double s, const Vec& x);

enum class InterpolantKind { Blend, Mccann, Lagrangian };

Vec interp_eval(const CdiOperator& op, double s, const Vec& x, InterpolantKind kind);

struct Projection {
  double s_star = 0;
  double err = 0;  // relative L2 error at s_star
};

// L2 projection onto the one-parameter interpolant family: coarse scan over
// 101 equispaced values of s followed by golden-section refinement.
Projection project_s(const CdiOperator& op, const Field& target, const EvalDomain& domain,
                     InterpolantKind kind = InterpolantKind::Blend);

Projection project_s_convex(const Field& u0, const Field& u1, const Field& target,
                            const EvalDomain& domain);

// Monotone piecewise-linear rescaling on [0,1] with fixed endpoints.
struct Rescaling {
  std::vector<double> t;  // strictly increasing, first 0, last 1
  std::vector<double> s;  // strictly increasing, first 0, last 1
  double operator()(double tq) const;
};

// Projects each snapshot onto the interpolant family and fits the monotone
// piecewise-linear rescaling through the (t_k, s_k) data. Snapshot
// parameters must be given in [0,1] in increasing order; a non-monotone
// projected sequence raises NonMonotoneRescaling with the offending
// indices.
Rescaling learn_rescaling(const CdiOperator& op,
                          const std::vector<std::pair<double, Field>>& snapshots,
                          const EvalDomain& domain,
                          InterpolantKind kind = InterpolantKind::Blend);

}  // namespace cdi

#endif
