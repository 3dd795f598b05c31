#include "cdi/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cdi {

namespace {

constexpr double kCurveFdStep = 1e-6;

// Legendre P_k(t) with first and second derivatives, by upward recurrence.
struct Poly123 {
  double v, d1, d2;
};

Poly123 legendre(int k, double t) {
  double p0 = 1.0, p1 = t;
  double q0 = 0.0, q1 = 1.0;  // first derivatives
  double r0 = 0.0, r1 = 0.0;  // second derivatives
  if (k == 0) return {p0, q0, r0};
  for (int i = 1; i < k; ++i) {
    const double p2 = ((2 * i + 1) * t * p1 - i * p0) / (i + 1);
    const double q2 = q0 + (2 * i + 1) * p1;
    const double r2 = r0 + (2 * i + 1) * q1;
    p0 = p1; p1 = p2;
    q0 = q1; q1 = q2;
    r0 = r1; r1 = r2;
  }
  return {p1, q1, r1};
}

// Shifted Legendre on [0,1].
Poly123 shifted_legendre(int k, double x) {
  Poly123 p = legendre(k, 2.0 * x - 1.0);
  return {p.v, 2.0 * p.d1, 4.0 * p.d2};
}

// Bubble-weighted shifted Legendre: x(1-x) L_k(x), vanishing at 0 and 1.
Poly123 bubble(int k, double x) {
  const Poly123 l = shifted_legendre(k, x);
  const double g = x * (1.0 - x), g1 = 1.0 - 2.0 * x, g2 = -2.0;
  return {g * l.v, g1 * l.v + g * l.d1, g2 * l.v + 2.0 * g1 * l.d1 + g * l.d2};
}

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(3.1415926535897932 * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const Poly123 p = legendre(n, t);
      const double dt = p.v / p.d1;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    const Poly123 p = legendre(n, t);
    nodes[n - 1 - i] = 0.5 * (t + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - t * t) * p.d1 * p.d1);
  }
}

double det2(const Mat& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

Mat inv2(const Mat& m) {
  const double d = det2(m);
  if (d == 0.0) throw SingularMap("registration: singular 2x2 Jacobian");
  Mat r(2);
  r(0, 0) = m(1, 1) / d;
  r(1, 1) = m(0, 0) / d;
  r(0, 1) = -m(0, 1) / d;
  r(1, 0) = -m(1, 0) / d;
  return r;
}

}  // namespace

PatchBoundary PatchBoundary::rectangle(double x1lo, double x1hi, double x2lo, double x2hi) {
  PatchBoundary b;
  b.bottom = [=](double s) { return Vec{x1lo + s * (x1hi - x1lo), x2lo}; };
  b.top = [=](double s) { return Vec{x1lo + s * (x1hi - x1lo), x2hi}; };
  b.left = [=](double s) { return Vec{x1lo, x2lo + s * (x2hi - x2lo)}; };
  b.right = [=](double s) { return Vec{x1hi, x2lo + s * (x2hi - x2lo)}; };
  return b;
}

PatchBoundary PatchBoundary::quadrilateral(const Vec& p00, const Vec& p10, const Vec& p11,
                                           const Vec& p01) {
  PatchBoundary b;
  b.bottom = [=](double s) { return (1.0 - s) * p00 + s * p10; };
  b.top = [=](double s) { return (1.0 - s) * p01 + s * p11; };
  b.left = [=](double s) { return (1.0 - s) * p00 + s * p01; };
  b.right = [=](double s) { return (1.0 - s) * p10 + s * p11; };
  return b;
}

GordonHallPatch::GordonHallPatch(PatchBoundary boundary) : b_(std::move(boundary)) {
  c00_ = b_.bottom(0.0);
  c10_ = b_.bottom(1.0);
  c01_ = b_.top(0.0);
  c11_ = b_.top(1.0);
  const double scale = std::max({(c10_ - c00_).norm(), (c01_ - c00_).norm(),
                                 (c11_ - c00_).norm(), 1e-12});
  auto close = [&](const Vec& a, const Vec& b) { return (a - b).norm() <= 1e-10 * scale; };
  if (!close(b_.left(0.0), c00_) || !close(b_.right(0.0), c10_) ||
      !close(b_.left(1.0), c01_) || !close(b_.right(1.0), c11_))
    throw InvalidPatch("GordonHallPatch: boundary curves disagree at the corners");

  diameter_ = std::max({(c10_ - c00_).norm(), (c01_ - c00_).norm(), (c11_ - c00_).norm(),
                        (c11_ - c10_).norm(), (c11_ - c01_).norm(), (c10_ - c01_).norm()});

  // Affine detection: straight edges and a parallelogram corner relation.
  auto straight = [&](const std::function<Vec(double)>& c) {
    const Vec mid = c(0.5), q1 = c(0.25), q3 = c(0.75);
    const Vec lin_mid = 0.5 * (c(0.0) + c(1.0));
    const Vec lin_q1 = 0.75 * c(0.0) + 0.25 * c(1.0);
    const Vec lin_q3 = 0.25 * c(0.0) + 0.75 * c(1.0);
    return close(mid, lin_mid) && close(q1, lin_q1) && close(q3, lin_q3);
  };
  affine_ = straight(b_.bottom) && straight(b_.top) && straight(b_.left) &&
            straight(b_.right) && close(c11_ - c10_ - c01_ + c00_, Vec{0.0, 0.0});

  // Injectivity check on a coarse sample grid.
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const Vec ref{i / 20.0, j / 20.0};
      if (!(jacobian_det(ref) > 0.0))
        throw InvalidPatch("GordonHallPatch: non-positive Jacobian on the sample grid");
    }
}

Vec GordonHallPatch::forward(const Vec& ref) const {
  const double xi = ref[0], eta = ref[1];
  const Vec edge = (1.0 - eta) * b_.bottom(xi) + eta * b_.top(xi) + (1.0 - xi) * b_.left(eta) +
                   xi * b_.right(eta);
  const Vec corner = (1.0 - xi) * (1.0 - eta) * c00_ + xi * (1.0 - eta) * c10_ +
                     (1.0 - xi) * eta * c01_ + xi * eta * c11_;
  return edge - corner;
}

Mat GordonHallPatch::jacobian(const Vec& ref) const {
  Mat j(2);
  for (int k = 0; k < 2; ++k) {
    Vec lo = ref, hi = ref;
    lo[k] -= kCurveFdStep;
    hi[k] += kCurveFdStep;
    const Vec d = forward(hi) - forward(lo);
    j(0, k) = d[0] / (2.0 * kCurveFdStep);
    j(1, k) = d[1] / (2.0 * kCurveFdStep);
  }
  return j;
}

double GordonHallPatch::jacobian_det(const Vec& ref) const { return det2(jacobian(ref)); }

Vec GordonHallPatch::inverse(const Vec& phys) const {
  if (affine_) {
    Mat j(2);
    j.set_col(0, c10_ - c00_);
    j.set_col(1, c01_ - c00_);
    return inv2(j).mul(phys - c00_);
  }
  const double tol = 1e-13 * std::max(1.0, diameter_);
  auto newton = [&](Vec ref) -> std::pair<bool, Vec> {
    for (int it = 0; it < 80; ++it) {
      const Vec r = phys - forward(ref);
      if (r.norm() <= tol) return {true, ref};
      Vec step = inv2(jacobian(ref)).mul(r);
      const double max_step = 0.5;
      if (step.norm() > max_step) step *= max_step / step.norm();
      ref += step;
      if (!(ref[0] > -2.0 && ref[0] < 3.0 && ref[1] > -2.0 && ref[1] < 3.0)) break;
    }
    return {false, ref};
  };
  auto [ok, ref] = newton(Vec{0.5, 0.5});
  if (ok) return ref;
  for (int i = 0; i <= 4 && !ok; ++i)
    for (int j = 0; j <= 4 && !ok; ++j) {
      std::tie(ok, ref) = newton(Vec{i / 4.0, j / 4.0});
    }
  if (!ok) throw InversionFailed("GordonHallPatch: Newton inversion failed");
  return ref;
}

bool GordonHallPatch::contains(const Vec& phys, double tol) const {
  try {
    const Vec ref = inverse(phys);
    return ref[0] >= -tol && ref[0] <= 1.0 + tol && ref[1] >= -tol && ref[1] <= 1.0 + tol;
  } catch (const InversionFailed&) {
    return false;
  }
}

MapSpace::MapSpace(int degree, GordonHallPatch patch)
    : degree_(degree), patch_(std::move(patch)) {
  if (degree_ < 2)
    throw InvalidParameter("MapSpace: degree must be at least 2 for a nontrivial space");
  size_ = 2 * (degree_ - 1) * (degree_ + 1);

  const int nq = 2 * degree_ + 2;
  std::vector<double> nodes, weights;
  gauss_legendre_01(nq, nodes, weights);
  quad_points_.reserve(static_cast<std::size_t>(nq) * nq);
  quad_weights_.reserve(static_cast<std::size_t>(nq) * nq);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) {
      quad_points_.push_back(Vec{nodes[i], nodes[j]});
      quad_weights_.push_back(weights[i] * weights[j]);
    }

  // Second derivatives of every basis function at the quadrature points.
  const std::size_t nqp = quad_points_.size();
  std::vector<double> dxx(size_ * nqp), dxy(size_ * nqp), dyy(size_ * nqp);
  for (int m = 0; m < size_; ++m) {
    const BasisIndex b = index(m);
    for (std::size_t q = 0; q < nqp; ++q) {
      const double xi = quad_points_[q][0], eta = quad_points_[q][1];
      Poly123 fx, fy;
      if (b.component == 0) {
        fx = bubble(b.i, xi);
        fy = shifted_legendre(b.j, eta);
      } else {
        fx = shifted_legendre(b.i, xi);
        fy = bubble(b.j, eta);
      }
      dxx[m * nqp + q] = fx.d2 * fy.v;
      dxy[m * nqp + q] = fx.d1 * fy.d1;
      dyy[m * nqp + q] = fx.v * fy.d2;
    }
  }
  gram_.assign(static_cast<std::size_t>(size_) * size_, 0.0);
  for (int m = 0; m < size_; ++m) {
    const int cm = index(m).component;
    for (int k = m; k < size_; ++k) {
      if (index(k).component != cm) continue;  // components never mix
      double acc = 0;
      for (std::size_t q = 0; q < nqp; ++q)
        acc += quad_weights_[q] * (dxx[m * nqp + q] * dxx[k * nqp + q] +
                                   2.0 * dxy[m * nqp + q] * dxy[k * nqp + q] +
                                   dyy[m * nqp + q] * dyy[k * nqp + q]);
      gram_[static_cast<std::size_t>(m) * size_ + k] = acc;
      gram_[static_cast<std::size_t>(k) * size_ + m] = acc;
    }
  }
}

MapSpace::BasisIndex MapSpace::index(int m) const {
  const int per_component = (degree_ - 1) * (degree_ + 1);
  BasisIndex b;
  b.component = m / per_component;
  const int r = m % per_component;
  b.i = r / (degree_ + 1);
  b.j = r % (degree_ + 1);
  if (b.component == 1) std::swap(b.i, b.j);  // bubble index moves to eta
  return b;
}

Vec MapSpace::basis(int m, const Vec& ref) const {
  const BasisIndex b = index(m);
  Vec v{0.0, 0.0};
  if (b.component == 0)
    v[0] = bubble(b.i, ref[0]).v * shifted_legendre(b.j, ref[1]).v;
  else
    v[1] = shifted_legendre(b.i, ref[0]).v * bubble(b.j, ref[1]).v;
  return v;
}

Mat MapSpace::basis_grad(int m, const Vec& ref) const {
  const BasisIndex b = index(m);
  Mat g(2);
  if (b.component == 0) {
    const Poly123 fx = bubble(b.i, ref[0]);
    const Poly123 fy = shifted_legendre(b.j, ref[1]);
    g(0, 0) = fx.d1 * fy.v;
    g(0, 1) = fx.v * fy.d1;
  } else {
    const Poly123 fx = shifted_legendre(b.i, ref[0]);
    const Poly123 fy = bubble(b.j, ref[1]);
    g(1, 0) = fx.d1 * fy.v;
    g(1, 1) = fx.v * fy.d1;
  }
  return g;
}

Vec MapSpace::displacement(std::span<const double> a, const Vec& ref) const {
  Vec v{0.0, 0.0};
  for (int m = 0; m < size_; ++m) {
    if (a[m] == 0.0) continue;
    v += a[m] * basis(m, ref);
  }
  return v;
}

Mat MapSpace::displacement_grad(std::span<const double> a, const Vec& ref) const {
  Mat g(2);
  for (int m = 0; m < size_; ++m) {
    if (a[m] == 0.0) continue;
    const Mat bg = basis_grad(m, ref);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) g(i, k) += a[m] * bg(i, k);
  }
  return g;
}

double h2_penalty(const MapSpace& space, std::span<const double> coeffs) {
  if (static_cast<int>(coeffs.size()) != space.size())
    throw DimensionError("h2_penalty: coefficient size mismatch");
  double acc = 0;
  for (int m = 0; m < space.size(); ++m) {
    if (coeffs[m] == 0.0) continue;
    for (int k = 0; k < space.size(); ++k) acc += coeffs[m] * space.gram(m, k) * coeffs[k];
  }
  return acc;
}

namespace {

// Jacobian determinant of N(., a) at a reference quadrature point:
//   det J_Psi(Phi_a(ref)) det grad Phi_a(ref) / det J_Psi(ref).
double map_det_at(const MapSpace& space, std::span<const double> a, const Vec& ref,
                  const Mat& disp_grad) {
  Mat phi_grad = disp_grad;
  phi_grad(0, 0) += 1.0;
  phi_grad(1, 1) += 1.0;
  const double det_phi = det2(phi_grad);
  if (space.patch().is_affine()) return det_phi;
  const Vec moved = ref + space.displacement(a, ref);
  return space.patch().jacobian_det(moved) * det_phi / space.patch().jacobian_det(ref);
}

struct Objective {
  const MapSpace& space;
  std::span<const Marker> markers;
  std::vector<Vec> marker_ref;                // Psi^{-1}(y_j)
  std::vector<std::vector<Vec>> marker_basis;  // phi_m(ref_j)
  double lambda;
  double delta_min;
  double barrier_weight = 0;
  bool use_barrier = true;  // false: barrier off, feasibility enforced as a filter

  // Returns +inf when infeasible.
  double value_and_grad(const std::vector<double>& a, std::vector<double>* grad) const {
    const int m_count = space.size();
    if (grad) grad->assign(m_count, 0.0);
    double f = 0;

    // marker mismatch
    for (std::size_t j = 0; j < markers.size(); ++j) {
      const Vec ref = marker_ref[j];
      Vec moved = ref;
      for (int m = 0; m < m_count; ++m) moved += a[m] * marker_basis[j][m];
      const Vec image = space.patch().forward(moved);
      const Vec r = image - markers[j].target;
      f += r.dot(r);
      if (grad) {
        const Mat jac = space.patch().jacobian(moved);
        for (int m = 0; m < m_count; ++m) {
          const Vec jb = jac.mul(marker_basis[j][m]);
          (*grad)[m] += 2.0 * r.dot(jb);
        }
      }
    }

    // H2 penalty
    if (lambda > 0.0) {
      for (int m = 0; m < m_count; ++m) {
        double gm = 0;
        for (int k = 0; k < m_count; ++k) gm += space.gram(m, k) * a[k];
        f += lambda * a[m] * gm;
        if (grad) (*grad)[m] += 2.0 * lambda * gm;
      }
    }

    // bijectivity: log-barrier or feasibility filter on quadrature dets
    const auto& qp = space.quad_points();
    for (std::size_t q = 0; q < qp.size(); ++q) {
      const Mat dgrad = space.displacement_grad(a, qp[q]);
      const double det = map_det_at(space, a, qp[q], dgrad);
      const double margin = det - delta_min;
      if (margin <= 0.0) return std::numeric_limits<double>::infinity();
      if (!use_barrier || barrier_weight == 0.0) continue;
      f -= barrier_weight * std::log(margin);
      if (grad) {
        Mat phi_grad = dgrad;
        phi_grad(0, 0) += 1.0;
        phi_grad(1, 1) += 1.0;
        const Mat phi_inv = inv2(phi_grad);
        const double det_phi = det2(phi_grad);
        double ratio = 1.0;
        Vec dlogpsi{0.0, 0.0};
        if (!space.patch().is_affine()) {
          const Vec moved = qp[q] + space.displacement(a, qp[q]);
          const double det_psi_moved = space.patch().jacobian_det(moved);
          ratio = det_psi_moved / space.patch().jacobian_det(qp[q]);
          // spatial gradient of det J_Psi at the moved point
          for (int k = 0; k < 2; ++k) {
            Vec lo = moved, hi = moved;
            lo[k] -= kCurveFdStep;
            hi[k] += kCurveFdStep;
            dlogpsi[k] = (space.patch().jacobian_det(hi) - space.patch().jacobian_det(lo)) /
                         (2.0 * kCurveFdStep * det_psi_moved);
          }
        }
        for (int m = 0; m < m_count; ++m) {
          const Mat bg = space.basis_grad(m, qp[q]);
          // d det(Phi)/da_m = det(Phi) tr(Phi^{-1} grad phi_m)
          double tr = 0;
          for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) tr += phi_inv(k, i) * bg(i, k);
          double ddet = ratio * det_phi * tr;
          if (!space.patch().is_affine()) {
            const Vec bm = space.basis(m, qp[q]);
            ddet += ratio * det_phi * dlogpsi.dot(bm);
          }
          (*grad)[m] -= barrier_weight * ddet / margin;
        }
      }
    }
    return f;
  }
};

// Dense BFGS with Armijo backtracking. Appends accepted objective values to
// the log. Returns false when the line search stagnates before reaching the
// gradient tolerance.
bool bfgs_minimize(const Objective& obj, std::vector<double>& a, int max_iters, double grad_tol,
                   std::vector<double>& log) {
  const int n = static_cast<int>(a.size());
  std::vector<double> h(static_cast<std::size_t>(n) * n, 0.0);  // inverse Hessian approx
  for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i) * n + i] = 1.0;

  std::vector<double> grad(n), grad_new(n), p(n), a_new(n), s(n), y(n), hy(n);
  double f = obj.value_and_grad(a, &grad);
  log.push_back(f);
  for (int it = 0; it < max_iters; ++it) {
    double gnorm = 0;
    for (double g : grad) gnorm += g * g;
    if (std::sqrt(gnorm) <= grad_tol) return true;

    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int j = 0; j < n; ++j) acc += h[static_cast<std::size_t>(i) * n + j] * grad[j];
      p[i] = -acc;
    }
    double slope = 0;
    for (int i = 0; i < n; ++i) slope += p[i] * grad[i];
    if (slope >= 0.0) {  // reset to steepest descent
      slope = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) h[static_cast<std::size_t>(i) * n + j] = (i == j) ? 1.0 : 0.0;
        p[i] = -grad[i];
        slope -= grad[i] * grad[i];
      }
    }

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < n; ++i) a_new[i] = a[i] + alpha * p[i];
      const double f_new = obj.value_and_grad(a_new, nullptr);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return false;

    const double f_new = obj.value_and_grad(a_new, &grad_new);
    log.push_back(f_new);
    double sy = 0;
    for (int i = 0; i < n; ++i) {
      s[i] = a_new[i] - a[i];
      y[i] = grad_new[i] - grad[i];
      sy += s[i] * y[i];
    }
    a = a_new;
    f = f_new;
    grad = grad_new;
    if (sy > 1e-14) {
      // BFGS inverse update
      const double rho = 1.0 / sy;
      for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int j = 0; j < n; ++j) acc += h[static_cast<std::size_t>(i) * n + j] * y[j];
        hy[i] = acc;
      }
      double yhy = 0;
      for (int i = 0; i < n; ++i) yhy += y[i] * hy[i];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          h[static_cast<std::size_t>(i) * n + j] +=
              (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
  }
  double gnorm = 0;
  for (double g : grad) gnorm += g * g;
  return std::sqrt(gnorm) <= grad_tol;
}

}  // namespace

RegistrationMap fit_registration(std::shared_ptr<const MapSpace> space,
                                 std::span<const Marker> markers, const FitOptions& opts) {
  if (!space) throw InvalidParameter("fit_registration: null map space");
  if (markers.empty()) throw InvalidParameter("fit_registration: need at least one marker");

  Objective obj{*space, markers, {}, {}, 0.0, opts.delta_min};
  obj.marker_ref.reserve(markers.size());
  obj.marker_basis.reserve(markers.size());
  for (const Marker& mk : markers) {
    Vec ref;
    try {
      ref = space->patch().inverse(mk.source);
    } catch (const InversionFailed&) {
      throw OutOfPatch("fit_registration: marker outside the patch");
    }
    if (ref[0] < -1e-9 || ref[0] > 1.0 + 1e-9 || ref[1] < -1e-9 || ref[1] > 1.0 + 1e-9)
      throw OutOfPatch("fit_registration: marker outside the patch");
    ref[0] = std::clamp(ref[0], 0.0, 1.0);
    ref[1] = std::clamp(ref[1], 0.0, 1.0);
    obj.marker_ref.push_back(ref);
    std::vector<Vec> basis_vals(space->size());
    for (int m = 0; m < space->size(); ++m) basis_vals[m] = space->basis(m, ref);
    obj.marker_basis.push_back(std::move(basis_vals));
  }

  const double diam = space->patch().diameter();
  obj.lambda = opts.lambda >= 0.0
                   ? opts.lambda
                   : 1e-3 * static_cast<double>(markers.size()) / (diam * diam);

  RegistrationMap result;
  result.space = space;
  result.coeffs.assign(space->size(), 0.0);

  double mis0 = 0;
  for (const Marker& mk : markers) {
    const Vec d = mk.target - mk.source;
    mis0 += d.dot(d);
  }
  result.pre_fit_rms = std::sqrt(mis0 / static_cast<double>(markers.size()));

  // Barrier continuation followed by a zero-barrier feasible polish.
  const double w0 = 1e-2 * std::max(1.0, mis0);
  bool converged = true;
  for (int stage = 0; stage <= 5; ++stage) {
    obj.use_barrier = stage < 5;
    obj.barrier_weight = stage < 5 ? w0 * std::pow(10.0, -stage) : 0.0;
    result.objective_log.emplace_back();
    converged = bfgs_minimize(obj, result.coeffs, opts.max_iterations, opts.grad_tol,
                              result.objective_log.back());
  }
  result.stagnation_warning = !converged;

  // Final mismatch.
  double mis = 0;
  for (std::size_t j = 0; j < markers.size(); ++j) {
    Vec moved = obj.marker_ref[j];
    for (int m = 0; m < space->size(); ++m) moved += result.coeffs[m] * obj.marker_basis[j][m];
    const Vec r = space->patch().forward(moved) - markers[j].target;
    mis += r.dot(r);
  }
  result.mismatch_rms = std::sqrt(mis / static_cast<double>(markers.size()));

  // Bijectivity certificate over a sampled path and a validation grid.
  const int n_s = 11, n_grid = 33;
  std::vector<double> scaled(space->size());
  result.certificate_s.resize(n_s);
  result.certificate_min_det.resize(n_s);
  bool certified = true;
  for (int k = 0; k < n_s; ++k) {
    const double s = k / static_cast<double>(n_s - 1);
    for (int m = 0; m < space->size(); ++m) scaled[m] = s * result.coeffs[m];
    double min_det = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_grid; ++i)
      for (int j = 0; j < n_grid; ++j) {
        const Vec ref{i / (n_grid - 1.0), j / (n_grid - 1.0)};
        const Mat dgrad = space->displacement_grad(scaled, ref);
        min_det = std::min(min_det, map_det_at(*space, scaled, ref, dgrad));
      }
    result.certificate_s[k] = s;
    result.certificate_min_det[k] = min_det;
    certified = certified && min_det >= opts.delta_min;
  }
  result.certified = certified;
  return result;
}

Vec eval_map(const RegistrationMap& r, double s, const Vec& x) {
  if (!(s >= 0.0 && s <= 1.0))
    throw InvalidParameter("eval_map: path parameter s must lie in [0,1]");
  Vec ref;
  try {
    ref = r.space->patch().inverse(x);
  } catch (const InversionFailed&) {
    throw OutOfPatch("eval_map: point outside the patch");
  }
  if (ref[0] < -1e-9 || ref[0] > 1.0 + 1e-9 || ref[1] < -1e-9 || ref[1] > 1.0 + 1e-9)
    throw OutOfPatch("eval_map: point outside the patch");
  if (s == 0.0) return x;
  Vec moved = ref;
  for (int m = 0; m < r.space->size(); ++m) {
    if (r.coeffs[m] == 0.0) continue;
    moved += (s * r.coeffs[m]) * r.space->basis(m, ref);
  }
  return r.space->patch().forward(moved);
}

double map_jacobian_det(const RegistrationMap& r, double s, const Vec& ref) {
  std::vector<double> scaled(r.coeffs.size());
  for (std::size_t m = 0; m < r.coeffs.size(); ++m) scaled[m] = s * r.coeffs[m];
  const Mat dgrad = r.space->displacement_grad(scaled, ref);
  return map_det_at(*r.space, scaled, ref, dgrad);
}

std::vector<int> match_mixtures(std::span<const Gaussian> models0,
                                std::span<const Gaussian> models1) {
  if (models0.size() != models1.size())
    throw DimensionError("match_mixtures: mixtures have different sizes");
  const int n = static_cast<int>(models0.size());
  if (n == 0) return {};
  if (n > 8) throw InvalidParameter("match_mixtures: brute force limited to 8 components");

  std::vector<double> w2(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w2[static_cast<std::size_t>(i) * n + j] = wasserstein2(models0[i], models1[j]);

  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0;
    for (int i = 0; i < n; ++i) cost += w2[static_cast<std::size_t>(i) * n + perm[i]];
    if (cost < best_cost) {  // strict: lexicographically first among ties
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Vec ba_cdi_eval(const Field& u0, const Field& u1, const RegistrationMap& r01,
                const RegistrationMap& r10, double s, const Vec& x) {
  if (!(s >= 0.0 && s <= 1.0))
    throw InvalidParameter("ba_cdi_eval: path parameter s must lie in [0,1]");
  if (s == 0.0) return u0(x);
  if (s == 1.0) return u1(x);
  Vec out = u0(eval_map(r10, s, x));
  const Vec v1 = u1(eval_map(r01, 1.0 - s, x));
  for (int c = 0; c < out.size(); ++c) out[c] = (1.0 - s) * out[c] + s * v1[c];
  return out;
}

}  // namespace cdi
