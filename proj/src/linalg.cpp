#include "cdi/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cdi {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

Vec& Vec::operator+=(const Vec& o) {
  require_same_dim(n_, o.n_, "Vec+");
  for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  require_same_dim(n_, o.n_, "Vec-");
  for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
  return *this;
}

Vec& Vec::operator*=(double a) {
  for (int i = 0; i < n_; ++i) v_[i] *= a;
  return *this;
}

double Vec::dot(const Vec& o) const {
  require_same_dim(n_, o.n_, "Vec::dot");
  double s = 0;
  for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
  return s;
}

double Vec::norm() const { return std::sqrt(dot(*this)); }

bool Vec::finite() const {
  for (int i = 0; i < n_; ++i)
    if (!std::isfinite(v_[i])) return false;
  return true;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double a, Vec v) { return v *= a; }

SymMat SymMat::identity(int n) {
  SymMat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SymMat SymMat::diag(std::initializer_list<double> d) {
  SymMat m(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

double SymMat::trace() const {
  double s = 0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

double SymMat::det() const {
  const SymMat& m = *this;
  switch (n_) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
    default:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) -
             m(0, 1) * (m(0, 1) * m(2, 2) - m(1, 2) * m(0, 2)) +
             m(0, 2) * (m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2));
  }
}

SymMat SymMat::inverse() const {
  const SymMat& m = *this;
  const double d = det();
  if (d == 0.0 || !std::isfinite(d))
    throw SingularMap("SymMat::inverse: singular matrix");
  SymMat r(n_);
  switch (n_) {
    case 1:
      r(0, 0) = 1.0 / d;
      break;
    case 2:
      r(0, 0) = m(1, 1) / d;
      r(1, 1) = m(0, 0) / d;
      r(0, 1) = -m(0, 1) / d;
      break;
    default:
      r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) / d;
      r(0, 1) = (m(0, 2) * m(1, 2) - m(0, 1) * m(2, 2)) / d;
      r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
      r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(0, 2)) / d;
      r(1, 2) = (m(0, 1) * m(0, 2) - m(0, 0) * m(1, 2)) / d;
      r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1)) / d;
  }
  return r;
}

Vec SymMat::mul(const Vec& x) const {
  require_same_dim(n_, x.size(), "SymMat::mul");
  Vec y(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

bool SymMat::finite() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j)
      if (!std::isfinite((*this)(i, j))) return false;
  return true;
}

double SymMat::frobenius() const {
  double s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

SymMat operator+(SymMat a, const SymMat& b) {
  require_same_dim(a.size(), b.size(), "SymMat+");
  for (int i = 0; i < a.size(); ++i)
    for (int j = i; j < a.size(); ++j) a(i, j) += b(i, j);
  return a;
}

SymMat operator-(SymMat a, const SymMat& b) {
  require_same_dim(a.size(), b.size(), "SymMat-");
  for (int i = 0; i < a.size(); ++i)
    for (int j = i; j < a.size(); ++j) a(i, j) -= b(i, j);
  return a;
}

SymMat operator*(double a, SymMat m) {
  for (int i = 0; i < m.size(); ++i)
    for (int j = i; j < m.size(); ++j) m(i, j) *= a;
  return m;
}

Mat Mat::identity(int n) {
  Mat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Mat::col(int j) const {
  Vec v(n_);
  for (int i = 0; i < n_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Mat::set_col(int j, const Vec& v) {
  for (int i = 0; i < n_; ++i) (*this)(i, j) = v[i];
}

Vec Mat::mul(const Vec& x) const {
  Vec y(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Mat Mat::mul(const Mat& o) const {
  Mat r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double s = 0;
      for (int k = 0; k < n_; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat Mat::transpose() const {
  Mat r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Mat to_mat(const SymMat& s) {
  Mat m(s.size());
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j) m(i, j) = s(i, j);
  return m;
}

SymMat to_sym(const Mat& m) {
  SymMat s(m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = i; j < m.size(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

namespace {

// Eigen-pair of a 2x2 symmetric matrix, ascending.
EigResult eig2(const SymMat& m) {
  EigResult r;
  r.values = Vec(2);
  r.vectors = Mat(2);
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double half_tr = 0.5 * (a + c);
  const double gap = std::hypot(0.5 * (a - c), b);
  const double l0 = half_tr - gap;
  const double l1 = half_tr + gap;
  r.values[0] = l0;
  r.values[1] = l1;
  if (gap == 0.0 || std::abs(b) <= 1e-300 * std::max(std::abs(a), std::abs(c))) {
    if (a <= c) {
      r.vectors = Mat::identity(2);
    } else {
      r.vectors(0, 0) = 0.0;
      r.vectors(1, 0) = 1.0;
      r.vectors(0, 1) = 1.0;
      r.vectors(1, 1) = 0.0;
    }
    return r;
  }
  // Eigenvector for the larger eigenvalue, then its orthogonal complement.
  double vx, vy;
  if (a - l1 < c - l1) {
    vx = b;
    vy = l1 - a;
  } else {
    vx = l1 - c;
    vy = b;
  }
  const double nrm = std::hypot(vx, vy);
  vx /= nrm;
  vy /= nrm;
  r.vectors(0, 1) = vx;
  r.vectors(1, 1) = vy;
  r.vectors(0, 0) = -vy;
  r.vectors(1, 0) = vx;
  return r;
}

Vec cross3(const Vec& a, const Vec& b) {
  Vec c(3);
  c[0] = a[1] * b[2] - a[2] * b[1];
  c[1] = a[2] * b[0] - a[0] * b[2];
  c[2] = a[0] * b[1] - a[1] * b[0];
  return c;
}

// Eigenvalues of a 3x3 symmetric matrix via the trigonometric solution of
// the characteristic polynomial, ascending.
void eigvals3(const SymMat& m, double out[3]) {
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  const double q = m.trace() / 3.0;
  if (p1 == 0.0) {
    out[0] = m(0, 0);
    out[1] = m(1, 1);
    out[2] = m(2, 2);
    std::sort(out, out + 3);
    return;
  }
  const double d0 = m(0, 0) - q, d1 = m(1, 1) - q, d2 = m(2, 2) - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  // B = (A - qI)/p, r = det(B)/2 clamped into [-1,1]
  SymMat b(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
  double rdet = 0.5 * b.det();
  rdet = std::clamp(rdet, -1.0, 1.0);
  const double phi = std::acos(rdet) / 3.0;
  const double two_pi_3 = 2.0943951023931953;
  const double e2 = q + 2.0 * p * std::cos(phi);
  const double e0 = q + 2.0 * p * std::cos(phi + two_pi_3);
  const double e1 = 3.0 * q - e0 - e2;
  out[0] = e0;
  out[1] = e1;
  out[2] = e2;
}

// Unit eigenvector of (m - lambda I) via the largest cross product of rows.
Vec eigvec3(const SymMat& m, double lambda) {
  Vec rows[3];
  for (int i = 0; i < 3; ++i) {
    rows[i] = Vec(3);
    for (int j = 0; j < 3; ++j) rows[i][j] = m(i, j) - (i == j ? lambda : 0.0);
  }
  Vec c01 = cross3(rows[0], rows[1]);
  Vec c02 = cross3(rows[0], rows[2]);
  Vec c12 = cross3(rows[1], rows[2]);
  double n01 = c01.norm(), n02 = c02.norm(), n12 = c12.norm();
  Vec best = c01;
  double nbest = n01;
  if (n02 > nbest) { best = c02; nbest = n02; }
  if (n12 > nbest) { best = c12; nbest = n12; }
  if (nbest == 0.0) return Vec(3);  // degenerate; caller handles
  return (1.0 / nbest) * best;
}

EigResult eig3(const SymMat& m) {
  EigResult r;
  r.values = Vec(3);
  r.vectors = Mat(3);
  double ev[3];
  eigvals3(m, ev);
  for (int i = 0; i < 3; ++i) r.values[i] = ev[i];

  const double scale = std::max({std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2]), 1e-300});
  if ((ev[2] - ev[0]) <= 1e-14 * scale) {
    r.vectors = Mat::identity(3);
    return r;
  }

  // Deflate with the best-separated extreme eigenvalue, then solve the
  // remaining 2x2 problem in its orthogonal complement.
  const bool low_separated = (ev[1] - ev[0]) >= (ev[2] - ev[1]);
  const int k = low_separated ? 0 : 2;
  Vec v = eigvec3(m, ev[k]);
  if (v.norm() == 0.0) {
    // fully degenerate pair; any unit vector works
    v = Vec{1, 0, 0};
  }
  // Orthonormal complement {w0, w1} of v.
  Vec t = std::abs(v[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
  Vec w0 = cross3(v, t);
  w0 *= 1.0 / w0.norm();
  Vec w1 = cross3(v, w0);

  // Project onto span{w0, w1}: B = W^T A W (2x2 symmetric).
  Vec aw0 = m.mul(w0), aw1 = m.mul(w1);
  SymMat bsub(2);
  bsub(0, 0) = w0.dot(aw0);
  bsub(0, 1) = w0.dot(aw1);
  bsub(1, 1) = w1.dot(aw1);
  EigResult sub = eig2(bsub);

  Vec u0 = sub.vectors(0, 0) * w0 + sub.vectors(1, 0) * w1;
  Vec u1 = sub.vectors(0, 1) * w0 + sub.vectors(1, 1) * w1;

  if (low_separated) {
    r.vectors.set_col(0, v);
    r.vectors.set_col(1, u0);
    r.vectors.set_col(2, u1);
    r.values[1] = sub.values[0];
    r.values[2] = sub.values[1];
  } else {
    r.vectors.set_col(0, u0);
    r.vectors.set_col(1, u1);
    r.vectors.set_col(2, v);
    r.values[0] = sub.values[0];
    r.values[1] = sub.values[1];
  }
  return r;
}

}  // namespace

EigResult sym_eig(const SymMat& a) {
  if (!a.finite()) throw InvalidMatrix("sym_eig: non-finite entries");
  switch (a.size()) {
    case 1: {
      EigResult r;
      r.values = Vec(1);
      r.values[0] = a(0, 0);
      r.vectors = Mat::identity(1);
      return r;
    }
    case 2:
      return eig2(a);
    default:
      return eig3(a);
  }
}

double spd_floor(const SymMat& a) {
  return 1e-12 * std::max(1.0, a.trace() / a.size());
}

namespace {

SymMat spd_function(const SymMat& a, double (*f)(double), const char* what) {
  if (!a.finite()) throw InvalidMatrix(std::string(what) + ": non-finite entries");
  EigResult e = sym_eig(a);
  const double floor = spd_floor(a);
  for (int i = 0; i < a.size(); ++i)
    if (e.values[i] <= floor)
      throw NotPositiveDefinite(std::string(what) + ": eigenvalue below positivity floor");
  SymMat r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = i; j < a.size(); ++j) {
      double s = 0;
      for (int k = 0; k < a.size(); ++k)
        s += e.vectors(i, k) * f(e.values[k]) * e.vectors(j, k);
      r(i, j) = s;
    }
  return r;
}

double sqrt_fn(double x) { return std::sqrt(x); }
double inv_sqrt_fn(double x) { return 1.0 / std::sqrt(x); }

}  // namespace

SymMat spd_sqrt(const SymMat& a) { return spd_function(a, sqrt_fn, "spd_sqrt"); }

SymMat spd_inv_sqrt(const SymMat& a) { return spd_function(a, inv_sqrt_fn, "spd_inv_sqrt"); }

}  // namespace cdi
