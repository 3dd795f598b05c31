#include <doctest.h>

#include <cmath>

#include "cdi/benchmarks.hpp"
#include "cdi/detection.hpp"
#include "test_util.hpp"

using namespace cdi;

namespace {

std::vector<Vec> line_points(double lo, double hi, int n) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Vec{lo + (hi - lo) * i / (n - 1)});
  return pts;
}

}  // namespace

TEST_CASE("select_points keeps exactly the positive criterion points") {
  const std::vector<Vec> pts = line_points(0, 1, 11);
  const PointCloud all = select_points(pts, [](const Vec&) { return 1.0; });
  CHECK(all.size() == 11);
  CHECK_THROWS_AS(select_points(pts, [](const Vec&) { return -1.0; }), EmptySelection);

  const PointCloud right =
      select_points(pts, [](const Vec& x) { return x[0] - 0.55; });
  CHECK(right.size() == 5);
  CHECK(right.points.front()[0] == doctest::Approx(0.6));
}

TEST_CASE("select_points is idempotent for threshold criteria") {
  const std::vector<Vec> pts = line_points(-1, 1, 41);
  const TestingFunction t = [](const Vec& x) { return 0.3 - std::abs(x[0]); };
  const PointCloud once = select_points(pts, t);
  const PointCloud twice = select_points(once.points, t);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i)
    CHECK(once.points[i][0] == twice.points[i][0]);
}

TEST_CASE("select_points marks the expansion-fan region of the simple wave") {
  const SimpleWaveProblem p = tanh_fan_problem();
  const double t = 0.05;
  const std::vector<Vec> pts = line_points(-4, 10, 1401);
  // criterion |du/dx| - 1e-4 evaluated on the analytic solution
  const TestingFunction crit = [&](const Vec& x) {
    const double h = 1e-6;
    const double du = (simple_wave_solution(p, t, x[0] + h).u -
                       simple_wave_solution(p, t, x[0] - h).u) /
                      (2 * h);
    return std::abs(du) - 1e-4;
  };
  const PointCloud cloud = select_points(pts, crit);
  CHECK(cloud.size() > 100);
  for (const Vec& x : cloud.points) {
    CHECK(x[0] > -2.5);
    CHECK(x[0] < 1.5);
  }
}

TEST_CASE("select_top_fraction counting rules") {
  const std::vector<Vec> pts = line_points(0, 1, 3);
  const std::vector<double> vals = {3.0, 1.0, 2.0};
  const PointCloud all = select_top_fraction(pts, vals, 1.0);
  CHECK(all.size() == 3);

  const PointCloud top = select_top_fraction(pts, vals, 1.0 / 3.0);
  REQUIRE(top.size() == 1);
  CHECK(top.points[0][0] == pts[0][0]);  // the value-3 point

  // ceil rule: 200 values at fraction 0.005 -> exactly 1 point
  const std::vector<Vec> many = line_points(0, 1, 200);
  std::vector<double> vmany(200);
  for (int i = 0; i < 200; ++i) vmany[i] = std::sin(0.1 * i);
  CHECK(select_top_fraction(many, vmany, 0.005).size() == 1);

  CHECK_THROWS_AS(select_top_fraction(pts, vals, 0.0), InvalidFraction);
  CHECK_THROWS_AS(select_top_fraction(pts, vals, 1.2), InvalidFraction);
}

TEST_CASE("select_top_fraction size is always ceil(fraction N) and ties are stable") {
  test::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 500);
    const std::vector<Vec> pts = line_points(0, 1, std::max(n, 2));
    std::vector<double> vals(pts.size());
    for (auto& v : vals) v = rng.uniform();
    const double frac = rng.uniform(0.001, 1.0);
    const std::size_t expect = static_cast<std::size_t>(
        std::min<double>(pts.size(), std::ceil(frac * static_cast<double>(pts.size()))));
    CHECK(select_top_fraction(pts, vals, frac).size() == expect);
  }

  // duplicate values resolve by input order
  const std::vector<Vec> pts = line_points(0, 3, 4);
  const std::vector<double> vals = {5.0, 5.0, 5.0, 1.0};
  const PointCloud top2 = select_top_fraction(pts, vals, 0.5);
  REQUIRE(top2.size() == 2);
  CHECK(top2.points[0][0] == pts[0][0]);
  CHECK(top2.points[1][0] == pts[1][0]);
}

TEST_CASE("mle_fit closed-form cases") {
  PointCloud two;
  two.points = {Vec{-1.0}, Vec{1.0}};
  const Gaussian g1 = mle_fit(two);
  CHECK(g1.mean[0] == doctest::Approx(0.0));
  CHECK(g1.cov(0, 0) == doctest::Approx(1.0));  // 1/N normalization

  PointCloud corners;
  corners.points = {Vec{1, 1}, Vec{1, -1}, Vec{-1, 1}, Vec{-1, -1}};
  const Gaussian g2 = mle_fit(corners);
  CHECK(g2.mean.norm() == doctest::Approx(0.0));
  CHECK(test::rel_frobenius(g2.cov, SymMat::identity(2)) <= 1e-14);

  PointCloud tri;
  tri.points = {Vec{0, 0}, Vec{1, 0}, Vec{0, 1}};
  const Gaussian g3 = mle_fit(tri);
  CHECK(g3.mean[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(g3.mean[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(g3.cov(0, 0) == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
  CHECK(g3.cov(1, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
  CHECK(g3.cov(0, 1) == doctest::Approx(-1.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("mle_fit agrees with the brute-force two-pass oracle") {
  test::Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 2);
    const int count = 10 + static_cast<int>(rng.next() % 200);
    PointCloud cloud;
    for (int k = 0; k < count; ++k) {
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = rng.uniform(-5, 5);
      cloud.points.push_back(p);
    }
    const Gaussian g = mle_fit(cloud);

    Vec mean(n);
    for (const Vec& p : cloud.points) mean += p;
    mean *= 1.0 / count;
    SymMat cov(n);
    for (const Vec& p : cloud.points) {
      const Vec d = p - mean;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) cov(i, j) += d[i] * d[j] / count;
    }
    CHECK((g.mean - mean).norm() <= 1e-12 * std::max(1.0, mean.norm()));
    CHECK(test::rel_frobenius(g.cov, cov) <= 1e-12);
  }
}

TEST_CASE("mle_fit rejects degenerate clouds") {
  PointCloud collinear;
  collinear.points = {Vec{0, 0}, Vec{1, 1}, Vec{2, 2}, Vec{3, 3}};
  CHECK_THROWS_AS(mle_fit(collinear), NotPositiveDefinite);

  PointCloud few;
  few.points = {Vec{0, 0}, Vec{1, 0}};  // fewer than n+1
  CHECK_THROWS_AS(mle_fit(few), NotPositiveDefinite);

  PointCloud empty;
  CHECK_THROWS_AS(mle_fit(empty), EmptySelection);
}

TEST_CASE("ducros indicator hand values") {
  const Vec u{1.0, 0.0};
  const Vec gp{2.0, 0.0};
  // expansion: positive divergence kills the first factor
  CHECK(ducros_indicator(u, 1.0, 0.0, 1.0, 1.0, gp, 0.0) == doctest::Approx(0.0));
  // zero velocity kills the third factor
  CHECK(ducros_indicator(Vec{0.0, 0.0}, -1.0, 0.0, 1.0, 1.0, gp, 0.0) == doctest::Approx(0.0));
  // div u = -1, curl 0, a = 1, |grad p| = 2, p = 1, eps = 0, |u| = 1 -> sqrt(2)
  CHECK(ducros_indicator(u, -1.0, 0.0, 1.0, 1.0, gp, 0.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("ducros indicator is frame-rotation invariant") {
  test::Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec u{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec gp{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double div = rng.uniform(-2, 2), curl = rng.uniform(-1, 1);
    const double a = rng.uniform(0.5, 2), p = rng.uniform(0.5, 2);
    const double phi = ducros_indicator(u, div, curl, a, p, gp, 1e-4);
    const double angle = rng.uniform(0, 6.28);
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec ru{c * u[0] - s * u[1], s * u[0] + c * u[1]};
    const Vec rgp{c * gp[0] - s * gp[1], s * gp[0] + c * gp[1]};
    CHECK(ducros_indicator(ru, div, curl, a, p, rgp, 1e-4) ==
          doctest::Approx(phi).epsilon(1e-12));
  }
}

TEST_CASE("ducros indicator rejects invalid inputs") {
  const Vec u{1.0, 0.0};
  CHECK_THROWS_AS(ducros_indicator(u, std::nan(""), 0.0, 1.0, 1.0, u, 0.0), InvalidField);
  CHECK_THROWS_AS(ducros_indicator(u, -1.0, 0.0, -1.0, 1.0, u, 0.0), InvalidField);
  CHECK_THROWS_AS(ducros_indicator(u, -1.0, 0.0, 1.0, -2.0, u, 1.0), InvalidField);
}

TEST_CASE("ducros field values vanish in smooth expansion regions") {
  // components (u1, u2, p, a): uniform compression stripe in the middle
  const FieldFunction f{[](const Vec& x) {
                          const bool stripe = std::abs(x[0] - 0.5) < 0.15;
                          const double u1 = stripe ? 1.0 - 2.0 * (x[0] - 0.35) : 1.0;
                          const double p = stripe ? 1.0 + (x[0] - 0.35) : 1.0;
                          return Vec{u1, 0.0, p, 1.0};
                        },
                        2, 4};
  const StructuredField snap = StructuredField::sample_function(f, 0, 1, 0, 1, 41, 5);
  const std::vector<double> vals = ducros_field_values(snap, 1e-4);
  REQUIRE(vals.size() == snap.node_count());
  double inside = 0, outside = 0;
  std::size_t k = 0;
  for (int i = 0; i < snap.n1(); ++i)
    for (int j = 0; j < snap.n2(); ++j, ++k) {
      const double x1 = snap.node_coords(i, j)[0];
      if (std::abs(x1 - 0.5) < 0.1)
        inside = std::max(inside, vals[k]);
      else if (std::abs(x1 - 0.5) > 0.25)
        outside = std::max(outside, vals[k]);
    }
  CHECK(inside > 0.1);
  CHECK(outside == doctest::Approx(0.0));
}

TEST_CASE("split_clusters partitions by rule and preserves order") {
  PointCloud cloud;
  cloud.points = {Vec{0, 1}, Vec{0, -1}};
  const auto one = split_clusters(cloud, [](const Vec&) { return 7; });
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 2);

  const auto two = split_clusters(cloud, [](const Vec& x) { return x[1] >= 0 ? 1 : 0; });
  REQUIRE(two.size() == 2);
  CHECK(two[0].points[0][1] == -1.0);  // ascending label order
  CHECK(two[1].points[0][1] == 1.0);

  // airfoil-style synthetic cloud: 30 upper points, 20 lower points
  PointCloud wing;
  test::Rng rng(9);
  for (int i = 0; i < 30; ++i) wing.points.push_back(Vec{rng.uniform(0, 1), rng.uniform(0.05, 0.4)});
  for (int i = 0; i < 20; ++i)
    wing.points.push_back(Vec{rng.uniform(0, 1), rng.uniform(-0.4, -0.05)});
  const auto parts = split_clusters(wing, [](const Vec& x) { return x[1] >= 0 ? 1 : 0; });
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].size() == 20);
  CHECK(parts[1].size() == 30);
  // order preserved within each cluster
  for (std::size_t i = 1; i < parts[1].size(); ++i)
    CHECK(parts[1].labels[i] == parts[1].labels[i - 1]);
}
