#include <doctest.h>

#include "cdi/linalg.hpp"
#include "test_util.hpp"

using namespace cdi;

namespace {

SymMat reconstruct(const EigResult& e, int n) {
  Mat d(n);
  for (int i = 0; i < n; ++i) d(i, i) = e.values[i];
  return to_sym(e.vectors.mul(d).mul(e.vectors.transpose()));
}

double orthonormality_defect(const Mat& v, int n) {
  const Mat g = v.transpose().mul(v);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST_CASE("sym_eig identity and diagonal cases") {
  const EigResult id = sym_eig(SymMat::identity(2));
  CHECK(id.values[0] == doctest::Approx(1.0));
  CHECK(id.values[1] == doctest::Approx(1.0));

  const EigResult dg = sym_eig(SymMat::diag({4.0, 9.0}));
  CHECK(dg.values[0] == doctest::Approx(4.0));
  CHECK(dg.values[1] == doctest::Approx(9.0));
  CHECK(std::abs(dg.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(dg.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig 2x2 with off-diagonal coupling") {
  // [[2,1],[1,2]]: characteristic polynomial (2-l)^2 - 1, roots 1 and 3
  // with eigenvectors (1,-1)/sqrt(2) and (1,1)/sqrt(2).
  SymMat m(2);
  m(0, 0) = 2; m(0, 1) = 1; m(1, 1) = 2;
  const EigResult e = sym_eig(m);
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-14));
  const double inv_sqrt2 = 0.7071067811865475244;
  CHECK(std::abs(e.vectors(0, 0) * e.vectors(1, 0)) ==
        doctest::Approx(inv_sqrt2 * inv_sqrt2));  // components (1,-1)/sqrt(2) up to sign
  CHECK(e.vectors(0, 0) * e.vectors(1, 0) < 0.0);
  CHECK(e.vectors(0, 1) * e.vectors(1, 1) > 0.0);
}

TEST_CASE("sym_eig rejects non-finite input") {
  SymMat m(2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sym_eig(m), InvalidMatrix);
}

TEST_CASE("sym_eig reconstruction property on random SPD inputs") {
  test::Rng rng(42);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const SymMat a = test::random_spd(rng, n, 0.05, 20.0);
      const EigResult e = sym_eig(a);
      CHECK(test::rel_frobenius(reconstruct(e, n), a) <= 1e-12);
      CHECK(orthonormality_defect(e.vectors, n) <= 1e-12);
      for (int i = 0; i + 1 < n; ++i) CHECK(e.values[i] <= e.values[i + 1]);
      for (int i = 0; i < n; ++i) CHECK(e.values[i] > 0.0);  // SPD input
    }
  }
}

TEST_CASE("sym_eig handles repeated eigenvalues") {
  SymMat m(3);
  m(0, 0) = 2; m(1, 1) = 2; m(2, 2) = 5;
  const EigResult e = sym_eig(m);
  CHECK(test::rel_frobenius(reconstruct(e, 3), m) <= 1e-12);
  CHECK(orthonormality_defect(e.vectors, 3) <= 1e-12);

  // fully isotropic
  const EigResult iso = sym_eig(3.0 * SymMat::identity(3));
  CHECK(test::rel_frobenius(reconstruct(iso, 3), 3.0 * SymMat::identity(3)) <= 1e-14);
}

TEST_CASE("spd_sqrt closed-form cases") {
  const SymMat r = spd_sqrt(SymMat::identity(2));
  CHECK(test::rel_frobenius(r, SymMat::identity(2)) <= 1e-15);

  const SymMat d = spd_sqrt(SymMat::diag({4.0, 9.0}));
  CHECK(d(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("spd_sqrt multiplication oracle on random SPD matrices") {
  test::Rng rng(7);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const SymMat a = test::random_spd(rng, n);
      const SymMat b = spd_sqrt(a);
      const SymMat bb = to_sym(to_mat(b).mul(to_mat(b)));
      CHECK(test::rel_frobenius(bb, a) <= 1e-10);
      // commutes with a
      const Mat ab = to_mat(a).mul(to_mat(b));
      const Mat ba = to_mat(b).mul(to_mat(a));
      double defect = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) defect = std::max(defect, std::abs(ab(i, j) - ba(i, j)));
      CHECK(defect <= 1e-10 * a.frobenius());
    }
  }
}

TEST_CASE("spd_inv_sqrt inverse-product oracle") {
  const SymMat one = spd_inv_sqrt(SymMat::identity(3));
  CHECK(test::rel_frobenius(one, SymMat::identity(3)) <= 1e-15);

  const SymMat d = spd_inv_sqrt(SymMat::diag({4.0}));
  CHECK(d(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

  test::Rng rng(11);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const SymMat a = test::random_spd(rng, n);
      const SymMat b = spd_inv_sqrt(a);
      const Mat prod = to_mat(b).mul(to_mat(b)).mul(to_mat(a));
      const Mat ab = to_mat(a).mul(to_mat(b));
      const Mat ba = to_mat(b).mul(to_mat(a));
      double defect = 0, commute = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          defect = std::max(defect, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
          commute = std::max(commute, std::abs(ab(i, j) - ba(i, j)));
        }
      CHECK(defect <= 1e-10);
      CHECK(commute <= 1e-10 * a.frobenius());
    }
  }
}

TEST_CASE("spd_sqrt rejects indefinite and near-singular matrices") {
  CHECK_THROWS_AS(spd_sqrt(SymMat::diag({1.0, -0.5})), NotPositiveDefinite);
  CHECK_THROWS_AS(spd_sqrt(SymMat::diag({1.0, 0.0})), NotPositiveDefinite);
  CHECK_THROWS_AS(spd_inv_sqrt(SymMat::diag({-1.0})), NotPositiveDefinite);
  // scale-relative floor: small but well-conditioned matrices pass
  CHECK_NOTHROW(spd_sqrt(SymMat::diag({1e-8, 2e-8})));
}

TEST_CASE("SymMat inverse and determinant") {
  test::Rng rng(3);
  for (int n = 1; n <= 3; ++n) {
    const SymMat a = test::random_spd(rng, n);
    const SymMat inv = a.inverse();
    const Mat prod = to_mat(a).mul(to_mat(inv));
    double defect = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        defect = std::max(defect, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(defect <= 1e-12);
    const EigResult e = sym_eig(a);
    double det_oracle = 1;
    for (int i = 0; i < n; ++i) det_oracle *= e.values[i];
    CHECK(a.det() == doctest::Approx(det_oracle).epsilon(1e-12));
  }
}
