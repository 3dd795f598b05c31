#include <doctest.h>

#include <cmath>

#include "cdi/gaussian.hpp"
#include "test_util.hpp"

using namespace cdi;

TEST_CASE("ot_map between identical models is the identity") {
  test::Rng rng(1);
  for (int n = 1; n <= 3; ++n) {
    const Gaussian g = test::random_gaussian(rng, n);
    const AffineTransportMap map = ot_map(g, g);
    CHECK(test::rel_frobenius(map.matrix, SymMat::identity(n)) <= 1e-12);
    const Vec x = g.mean + Vec(n, 0.7);
    CHECK((eval_forward(map, 1.0, x) - x).norm() <= 1e-12);
  }
}

TEST_CASE("ot_map 1D closed form") {
  // sigma0=1, sigma1=2, mu0=0, mu1=3: T(1, xi) = 3 + 2 xi
  const Gaussian g0{Vec{0.0}, SymMat::diag({1.0})};
  const Gaussian g1{Vec{3.0}, SymMat::diag({4.0})};
  const AffineTransportMap map = ot_map(g0, g1);
  CHECK(map.matrix(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  for (double xi : {-1.0, 0.0, 0.5, 2.0})
    CHECK(eval_forward(map, 1.0, Vec{xi})[0] == doctest::Approx(3.0 + 2.0 * xi).epsilon(1e-14));
}

TEST_CASE("ot_map errors") {
  const Gaussian g1{Vec{0.0}, SymMat::diag({1.0})};
  const Gaussian g2{Vec{0.0, 0.0}, SymMat::identity(2)};
  CHECK_THROWS_AS(ot_map(g1, g2), DimensionError);
  const Gaussian degenerate{Vec{0.0, 0.0}, SymMat::diag({1.0, 0.0})};
  CHECK_THROWS_AS(ot_map(degenerate, g2), NotPositiveDefinite);
}

TEST_CASE("eval_forward endpoint behavior and 1D hand value") {
  const Gaussian g0{Vec{0.0}, SymMat::diag({1.0})};
  const Gaussian g1{Vec{0.0}, SymMat::diag({4.0})};
  const AffineTransportMap map = ot_map(g0, g1);

  CHECK(eval_forward(map, 0.0, Vec{1.3})[0] == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(eval_forward(map, 1.0, map.source_mean)[0] ==
        doctest::Approx(map.target_mean[0]).epsilon(1e-15));
  // s = 0.5, x = 1: (1-s) x + s (2x) = 1.5
  CHECK(eval_forward(map, 0.5, Vec{1.0})[0] == doctest::Approx(1.5).epsilon(1e-14));

  test::Rng rng(5);
  const Gaussian a = test::random_gaussian(rng, 2);
  const Gaussian b = test::random_gaussian(rng, 2);
  const AffineTransportMap m2 = ot_map(a, b);
  CHECK((eval_forward(m2, 1.0, a.mean) - b.mean).norm() <= 1e-12);
}

TEST_CASE("eval_inverse closed form and round trip") {
  const Gaussian g0{Vec{0.0}, SymMat::diag({1.0})};
  const Gaussian g1{Vec{0.0}, SymMat::diag({4.0})};
  const AffineTransportMap map = ot_map(g0, g1);
  CHECK(eval_inverse(map, 1.0, Vec{2.0})[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval_inverse(map, 0.0, Vec{2.0})[0] == doctest::Approx(2.0).epsilon(1e-15));

  test::Rng rng(6);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 50; ++trial) {
      const Gaussian a = test::random_gaussian(rng, n);
      const Gaussian b = test::random_gaussian(rng, n);
      const AffineTransportMap m = ot_map(a, b);
      const double s = rng.uniform();
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(-3.0, 3.0);
      const Vec back = eval_forward(m, s, eval_inverse(m, s, x));
      CHECK((back - x).norm() <= 1e-10 * std::max(1.0, x.norm()));
    }
}

TEST_CASE("displacement_gaussian endpoints and 1D arithmetic mean of sigmas") {
  const Gaussian g0{Vec{0.5}, SymMat::diag({1.0})};
  const Gaussian g1{Vec{2.5}, SymMat::diag({9.0})};
  const Gaussian mid = displacement_gaussian(g0, g1, 0.5);
  CHECK(mid.cov(0, 0) == doctest::Approx(4.0).epsilon(1e-13));  // sigma_s = 2
  CHECK(mid.mean[0] == doctest::Approx(1.5).epsilon(1e-14));

  test::Rng rng(8);
  const Gaussian a = test::random_gaussian(rng, 2);
  const Gaussian b = test::random_gaussian(rng, 2);
  CHECK(approx_equal(displacement_gaussian(a, b, 0.0), a, 1e-12));
  CHECK(approx_equal(displacement_gaussian(a, b, 1.0), b, 1e-10));
}

TEST_CASE("displacement interpolant matches the Monte-Carlo pushforward") {
  test::Rng rng(2024);
  const Gaussian g0{Vec{-1.0, 0.5}, test::random_spd(rng, 2, 0.5, 3.0)};
  const Gaussian g1{Vec{2.0, -0.5}, test::random_spd(rng, 2, 0.5, 3.0)};
  const AffineTransportMap map = ot_map(g0, g1);
  const double s = 0.5;
  const Gaussian expect = displacement_gaussian(g0, g1, s);

  const int n_samples = 100000;
  const SymMat root0 = spd_sqrt(g0.cov);
  Vec mean(2);
  SymMat cov(2);
  std::vector<Vec> pushed(n_samples, Vec(2));
  for (int k = 0; k < n_samples; ++k) {
    const Vec z{rng.normal(), rng.normal()};
    const Vec x = g0.mean + root0.mul(z);
    pushed[k] = eval_forward(map, s, x);
    mean += pushed[k];
  }
  mean *= 1.0 / n_samples;
  for (const Vec& p : pushed) {
    const Vec d = p - mean;
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) cov(i, j) += d[i] * d[j];
  }
  cov = (1.0 / n_samples) * cov;

  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(expect.cov(i, i) / n_samples);
    CHECK(std::abs(mean[i] - expect.mean[i]) <= 4.0 * se);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j) {
      const double se = std::sqrt(
          (expect.cov(i, i) * expect.cov(j, j) + expect.cov(i, j) * expect.cov(i, j)) /
          n_samples);
      CHECK(std::abs(cov(i, j) - expect.cov(i, j)) <= 4.0 * se);
    }
}

TEST_CASE("wasserstein2 closed-form values") {
  const Gaussian g0{Vec{0.0, 0.0}, SymMat::identity(2)};
  const Gaussian g1{Vec{3.0, 4.0}, SymMat::identity(2)};
  CHECK(wasserstein2(g0, g0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wasserstein2(g0, g1) == doctest::Approx(5.0).epsilon(1e-13));  // ||m||_2

  const Gaussian a{Vec{1.0}, SymMat::diag({1.0})};
  const Gaussian b{Vec{1.0}, SymMat::diag({4.0})};
  CHECK(wasserstein2(a, b) == doctest::Approx(1.0).epsilon(1e-13));  // |sigma1 - sigma0|
}

TEST_CASE("wasserstein2 symmetry and geodesic property") {
  test::Rng rng(99);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 60; ++trial) {
      const Gaussian a = test::random_gaussian(rng, n);
      const Gaussian b = test::random_gaussian(rng, n);
      const double w = wasserstein2(a, b);
      CHECK(std::abs(w - wasserstein2(b, a)) <= 1e-12 * std::max(1.0, w));
      for (double s : {0.25, 0.5, 0.75}) {
        const Gaussian mid = displacement_gaussian(a, b, s);
        CHECK(std::abs(wasserstein2(a, mid) - s * w) <= 1e-10 * std::max(1.0, w));
      }
    }
}

TEST_CASE("transport matrix is SPD on random model pairs") {
  test::Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 3);
    const Gaussian a = test::random_gaussian(rng, n);
    const Gaussian b = test::random_gaussian(rng, n);
    const AffineTransportMap map = ot_map(a, b);
    const EigResult e = sym_eig(map.matrix);
    for (int i = 0; i < n; ++i) CHECK(e.values[i] > 0.0);
  }
}

TEST_CASE("gaussian density normalizes and peaks at the mean") {
  const Gaussian g{Vec{0.0}, SymMat::diag({2.0})};
  // (2 pi * 2)^{-1/2} at the mean
  CHECK(g.density(Vec{0.0}) == doctest::Approx(1.0 / std::sqrt(4.0 * std::acos(-1.0)))
                                   .epsilon(1e-13));
  CHECK(g.density(Vec{1.0}) < g.density(Vec{0.0}));
}
