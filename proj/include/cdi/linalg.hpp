#ifndef CDI_LINALG_HPP
#define CDI_LINALG_HPP

#include <array>
#include <cstddef>
#include <initializer_list>

#include "cdi/errors.hpp"

namespace cdi {

// Small dense vector holding spatial coordinates (dimension <= 3) or field
// component values (up to 6 components).
class Vec {
public:
  Vec() : n_(0), v_{} {}
  explicit Vec(int n, double fill = 0.0) : n_(n), v_{} {
    check_dim(n);
    for (int i = 0; i < n; ++i) v_[i] = fill;
  }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())), v_{} {
    check_dim(n_);
    int i = 0;
    for (double x : xs) v_[i++] = x;
  }

  int size() const { return n_; }
  double& operator[](int i) { return v_[i]; }
  double operator[](int i) const { return v_[i]; }

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double a);

  double dot(const Vec& o) const;
  double norm() const;
  bool finite() const;

private:
  static void check_dim(int n) {
    if (n < 0 || n > 6) throw DimensionError("Vec: size must be in [0,6]");
  }
  int n_;
  std::array<double, 6> v_;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double a, Vec v);

// Symmetric matrix of dimension 1..3, stored as the upper triangle.
class SymMat {
public:
  SymMat() : n_(0), a_{} {}
  explicit SymMat(int n) : n_(n), a_{} { check_dim(n); }

  static SymMat identity(int n);
  static SymMat diag(std::initializer_list<double> d);

  int size() const { return n_; }

  double& operator()(int i, int j) { return a_[tri_index(i, j)]; }
  double operator()(int i, int j) const { return a_[tri_index(i, j)]; }

  double trace() const;
  double det() const;
  SymMat inverse() const;        // via adjugate; throws SingularMap on zero determinant
  Vec mul(const Vec& x) const;
  bool finite() const;

  // Frobenius norm and distance, used throughout the tests.
  double frobenius() const;

private:
  static void check_dim(int n) {
    if (n < 1 || n > 3) throw DimensionError("SymMat: dimension must be in [1,3]");
  }
  int tri_index(int i, int j) const {
    if (i > j) { int t = i; i = j; j = t; }
    // upper triangle, row-major: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2)
    static constexpr int off[3] = {0, 3, 5};
    return off[i] + (j - i);
  }
  int n_;
  std::array<double, 6> a_;
};

SymMat operator+(SymMat a, const SymMat& b);
SymMat operator-(SymMat a, const SymMat& b);
SymMat operator*(double a, SymMat m);

// General (possibly non-symmetric) small dense matrix used for
// eigenvector columns and intermediate products.
class Mat {
public:
  Mat() : n_(0), a_{} {}
  explicit Mat(int n) : n_(n), a_{} {}
  static Mat identity(int n);

  int size() const { return n_; }
  double& operator()(int i, int j) { return a_[i * 3 + j]; }
  double operator()(int i, int j) const { return a_[i * 3 + j]; }

  Vec col(int j) const;
  void set_col(int j, const Vec& v);
  Vec mul(const Vec& x) const;
  Mat mul(const Mat& o) const;
  Mat transpose() const;

private:
  int n_;
  std::array<double, 9> a_;
};

Mat to_mat(const SymMat& s);
// Symmetrizes a numerically almost-symmetric product.
SymMat to_sym(const Mat& m);

struct EigResult {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns, vectors.col(i) pairs with values[i]
};

// Closed-form symmetric eigendecomposition for n <= 3 (direct formulas for
// n = 1, 2; trigonometric characteristic-polynomial solution plus deflation
// for n = 3). Reconstruction V diag(l) V^T matches the input to ~1e-12
// relative for well-conditioned matrices.
EigResult sym_eig(const SymMat& a);

// Scale-relative positive-definiteness floor.
double spd_floor(const SymMat& a);

// Principal matrix square root of an SPD matrix.
SymMat spd_sqrt(const SymMat& a);

// Inverse principal square root of an SPD matrix.
SymMat spd_inv_sqrt(const SymMat& a);

}  // namespace cdi

#endif
