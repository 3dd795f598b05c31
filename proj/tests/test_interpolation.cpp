#include <doctest.h>

#include <cmath>

#include "cdi/benchmarks.hpp"
#include "cdi/interpolation.hpp"
#include "test_util.hpp"

using namespace cdi;

namespace {

// operator between two analytic heat kernels with exact-moment models
CdiOperator heat_operator(double t0, double t1, int n) {
  auto field = [n](double t) {
    return FieldFunction{[t](const Vec& x) { return Vec{heat_kernel(t, x)}; }, n, 1};
  };
  const Gaussian g0{Vec(n, 0.0), heat_moment_variance(t0) * SymMat::identity(n)};
  const Gaussian g1{Vec(n, 0.0), heat_moment_variance(t1) * SymMat::identity(n)};
  return make_cdi_operator(Field(field(t0)), Field(field(t1)), g0, g1);
}

CdiOperator random_operator(cdi::test::Rng& rng) {
  const Gaussian g0 = test::random_gaussian(rng, 1, 1.0);
  const Gaussian g1 = test::random_gaussian(rng, 1, 1.0);
  auto bump0 = scalar_field_1d([m = g0.mean[0]](double x) { return std::exp(-(x - m) * (x - m)); });
  auto bump1 = scalar_field_1d(
      [m = g1.mean[0]](double x) { return 2.0 * std::exp(-0.5 * (x - m) * (x - m)); });
  return make_cdi_operator(Field(bump0), Field(bump1), g0, g1);
}

}  // namespace

TEST_CASE("interpolants hit the snapshots exactly at the endpoints") {
  test::Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const CdiOperator op = random_operator(rng);
    const Vec x{rng.uniform(-3, 3)};
    const double v0 = op.u0(x)[0], v1 = op.u1(x)[0];
    CHECK(cdi_eval(op, 0.0, x)[0] == v0);
    CHECK(cdi_eval(op, 1.0, x)[0] == v1);
    CHECK(lagrangian_eval(op, 0.0, x)[0] == v0);
    CHECK(mccann_eval(op, 0.0, x)[0] == v0);
    CHECK(std::abs(lagrangian_eval(op, 1.0, x)[0] - v1) <= 1e-12 * std::max(1.0, std::abs(v1)));
    CHECK(convex_eval(op.u0, op.u1, 0.0, x)[0] == v0);
    CHECK(convex_eval(op.u0, op.u1, 1.0, x)[0] == v1);
  }
}

TEST_CASE("convex blend of constants") {
  const Field a(scalar_field_1d([](double) { return 0.0; }));
  const Field b(scalar_field_1d([](double) { return 2.0; }));
  CHECK(convex_eval(a, b, 0.5, Vec{0.3})[0] == doctest::Approx(1.0));
}

TEST_CASE("swapping the snapshots mirrors the blend in s") {
  test::Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const CdiOperator op = random_operator(rng);
    const CdiOperator swapped{op.u1, op.u0, op.map10, op.map01};
    for (int k = 0; k < 10; ++k) {
      const double s = rng.uniform();
      const Vec x{rng.uniform(-3, 3)};
      const double a = cdi_eval(op, s, x)[0];
      const double b = cdi_eval(swapped, 1.0 - s, x)[0];
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("identical models reduce the blend to convex interpolation") {
  test::Rng rng(23);
  const Gaussian g = test::random_gaussian(rng, 1, 1.0);
  auto f0 = scalar_field_1d([](double x) { return std::sin(x); });
  auto f1 = scalar_field_1d([](double x) { return std::cos(2 * x); });
  const CdiOperator op = make_cdi_operator(Field(f0), Field(f1), g, g);
  for (int k = 0; k < 50; ++k) {
    const double s = rng.uniform();
    const Vec x{rng.uniform(-3, 3)};
    CHECK(cdi_eval(op, s, x)[0] ==
          doctest::Approx(convex_eval(op.u0, op.u1, s, x)[0]).epsilon(1e-12));
  }
}

TEST_CASE("displacement interpolant of heat kernels is the exact kernel") {
  const double t0 = 0.1, t1 = 0.4;
  test::Rng rng(24);
  for (int n : {1, 2}) {
    const CdiOperator op = heat_operator(t0, t1, n);
    for (int k = 0; k < 100; ++k) {
      const double t = rng.uniform(t0, t1);
      const double s = (std::sqrt(t) - std::sqrt(t0)) / (std::sqrt(t1) - std::sqrt(t0));
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(-2, 2);
      CHECK(mccann_eval(op, s, x)[0] == doctest::Approx(heat_kernel(t, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("displacement interpolant of ZKB profiles is the exact profile") {
  const double t0 = 1.0, t1 = 2.0;
  const int n = 1, m = 2;
  const double C = 1.0;
  const ZkbExponents e = zkb_exponents(n, m);
  auto field = [&](double t) {
    return FieldFunction{[t, n, m, C](const Vec& x) { return Vec{zkb_profile(t, x, n, m, C)}; },
                         n, 1};
  };
  const Gaussian g0{Vec{0.0}, SymMat::diag({zkb_moment_variance(t0, n, m, C)})};
  const Gaussian g1{Vec{0.0}, SymMat::diag({zkb_moment_variance(t1, n, m, C)})};
  const CdiOperator op = make_cdi_operator(Field(field(t0)), Field(field(t1)), g0, g1);

  test::Rng rng(25);
  for (int k = 0; k < 200; ++k) {
    const double t = rng.uniform(t0, t1);
    const double s =
        (std::pow(t, e.beta) - std::pow(t0, e.beta)) / (std::pow(t1, e.beta) - std::pow(t0, e.beta));
    const Vec x{rng.uniform(-5, 5)};
    CHECK(mccann_eval(op, s, x)[0] ==
          doctest::Approx(zkb_profile(t, x, n, m, C)).epsilon(1e-11));
  }
}

TEST_CASE("lagrangian interpolation differs from the convex displacement blend") {
  // distinct nonlinear interpolants that share only the endpoints
  test::Rng rng(26);
  const Gaussian g0{Vec{-1.0}, SymMat::diag({1.0})};
  const Gaussian g1{Vec{2.0}, SymMat::diag({4.0})};
  auto f0 = scalar_field_1d([](double x) { return std::exp(-x * x); });
  auto f1 = scalar_field_1d([](double x) { return 1.0 / (1.0 + (x - 2.0) * (x - 2.0)); });
  const CdiOperator op = make_cdi_operator(Field(f0), Field(f1), g0, g1);
  double max_diff = 0;
  for (int k = 0; k < 100; ++k) {
    const double s = rng.uniform(0.2, 0.8);
    const Vec x{rng.uniform(-2, 3)};
    max_diff = std::max(max_diff,
                        std::abs(lagrangian_eval(op, s, x)[0] - cdi_eval(op, s, x)[0]));
  }
  CHECK(max_diff > 1e-3);
}

TEST_CASE("lagrangian interpolation mirrors under exchange when the maps invert exactly") {
  // with the closed-form Gaussian pair the reverse map is the exact inverse,
  // and exchanging the snapshots reverses the path parameter
  test::Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const CdiOperator op = random_operator(rng);
    const CdiOperator swapped{op.u1, op.u0, op.map10, op.map01};
    for (int k = 0; k < 10; ++k) {
      const double s = rng.uniform();
      const Vec x{rng.uniform(-3, 3)};
      const double a = lagrangian_eval(op, s, x)[0];
      const double b = lagrangian_eval(swapped, 1.0 - s, x)[0];
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("project_s recovers the endpoints and never exceeds scanned errors") {
  const CdiOperator op = heat_operator(0.1, 0.4, 1);
  const EvalDomain dom = EvalDomain::line(-4, 4, 801);

  const Projection p0 = project_s(op, op.u0, dom);
  CHECK(p0.s_star == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p0.err <= 1e-12);
  const Projection p1 = project_s(op, op.u1, dom);
  CHECK(p1.s_star == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p1.err <= 1e-12);

  const Projection pc0 = project_s_convex(op.u0, op.u1, op.u0, dom);
  CHECK(pc0.s_star == doctest::Approx(0.0));
  const Projection pc1 = project_s_convex(op.u0, op.u1, op.u1, dom);
  CHECK(pc1.s_star == doctest::Approx(1.0));

  // optimality against the scan grid for an interior target
  const Field target(scalar_field_1d([](double x) { return heat_kernel(0.22, Vec{x}); }));
  const Projection p = project_s(op, target, dom);
  for (int i = 0; i <= 100; ++i) {
    const double s = i / 100.0;
    const FieldFunction probe{[&op, s](const Vec& x) { return cdi_eval(op, s, x); }, 1, 1};
    CHECK(p.err <= l2_error(Field(probe), target, dom).relative + 1e-15);
  }
}

TEST_CASE("rescaling learning reproduces the analytic self-similar rescalings") {
  SUBCASE("endpoints only give the identity") {
    const CdiOperator op = heat_operator(0.1, 0.4, 1);
    const EvalDomain dom = EvalDomain::line(-4, 4, 401);
    auto snapshots = std::vector<std::pair<double, Field>>{{0.0, op.u0}, {1.0, op.u1}};
    const Rescaling r = learn_rescaling(op, snapshots, dom);
    CHECK(r(0.37) == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(r(0.0) == 0.0);
    CHECK(r(1.0) == 1.0);
  }

  SUBCASE("heat-kernel interior node matches the square-root rescaling") {
    const double t0 = 0.1, t1 = 0.4;
    const CdiOperator op = heat_operator(t0, t1, 1);
    const EvalDomain dom = EvalDomain::line(-5, 5, 1001);
    const double t_mid = 0.5 * (t0 + t1);
    const Field mid(scalar_field_1d([t_mid](double x) { return heat_kernel(t_mid, Vec{x}); }));
    auto snapshots = std::vector<std::pair<double, Field>>{{0.5, mid}};
    const Rescaling r = learn_rescaling(op, snapshots, dom, InterpolantKind::Mccann);
    const double expect = (std::sqrt(t_mid) - std::sqrt(t0)) / (std::sqrt(t1) - std::sqrt(t0));
    CHECK(r(0.5) == doctest::Approx(expect).epsilon(1e-3));
  }

  SUBCASE("zkb interior node matches the power-law rescaling") {
    const double t0 = 1.0, t1 = 2.0;
    const int n = 1, m = 2;
    const double C = 1.0;
    const ZkbExponents e = zkb_exponents(n, m);
    auto field = [&](double t) {
      return Field(FieldFunction{
          [t, n, m, C](const Vec& x) { return Vec{zkb_profile(t, x, n, m, C)}; }, n, 1});
    };
    const Gaussian g0{Vec{0.0}, SymMat::diag({zkb_moment_variance(t0, n, m, C)})};
    const Gaussian g1{Vec{0.0}, SymMat::diag({zkb_moment_variance(t1, n, m, C)})};
    const CdiOperator op = make_cdi_operator(field(t0), field(t1), g0, g1);
    const EvalDomain dom = EvalDomain::line(-5, 5, 1001);
    const double t_mid = 1.5;
    auto snapshots = std::vector<std::pair<double, Field>>{
        {(t_mid - t0) / (t1 - t0), field(t_mid)}};
    const Rescaling r = learn_rescaling(op, snapshots, dom, InterpolantKind::Mccann);
    const double expect = (std::pow(t_mid, e.beta) - std::pow(t0, e.beta)) /
                          (std::pow(t1, e.beta) - std::pow(t0, e.beta));
    CHECK(r(0.5) == doctest::Approx(expect).epsilon(1e-3));
  }
}

TEST_CASE("non-monotone projected parameters are reported with their indices") {
  const double t0 = 0.1, t1 = 0.4;
  const CdiOperator op = heat_operator(t0, t1, 1);
  const EvalDomain dom = EvalDomain::line(-4, 4, 401);
  const Field late(scalar_field_1d([](double x) { return heat_kernel(0.35, Vec{x}); }));
  const Field early(scalar_field_1d([](double x) { return heat_kernel(0.15, Vec{x}); }));
  auto snapshots = std::vector<std::pair<double, Field>>{{0.3, late}, {0.7, early}};
  try {
    learn_rescaling(op, snapshots, dom, InterpolantKind::Mccann);
    FAIL("expected NonMonotoneRescaling");
  } catch (const NonMonotoneRescaling& e) {
    REQUIRE(e.offending.size() == 1);
    CHECK(e.offending[0] == 1);
  }
}

TEST_CASE("sod value transport with the linear rescaling is exact at mid time") {
  const RiemannState state = sod_state();
  const double t0 = 0.1, t1 = 0.3, t_mid = 0.2;
  auto rho = [&state](double t) {
    return Field(FieldFunction{
        [&state, t](const Vec& x) { return Vec{sod_exact(state, t, x[0]).rho}; }, 1, 1});
  };
  AffineTransportMap fwd{SymMat::diag({t1 / t0}), Vec{0.0}, Vec{0.0}};
  AffineTransportMap rev{SymMat::diag({t0 / t1}), Vec{0.0}, Vec{0.0}};
  const CdiOperator op{rho(t0), rho(t1), fwd, rev};
  const SodSolution sol = sod_structure(state);
  const double s = (t_mid - t0) / (t1 - t0);
  for (int i = 0; i <= 500; ++i) {
    const double x = -0.7 + 1.4 * i / 500.0;
    const double eta = x / t_mid;
    // skip points within one grid step of the three wave locations
    const bool near_wave = std::abs(eta - sol.head_l) < 0.02 ||
                           std::abs(eta - sol.tail_l) < 0.02 ||
                           std::abs(eta - sol.u_star) < 0.02 ||
                           std::abs(eta - sol.head_r) < 0.02;
    if (near_wave) continue;
    const double exact = sod_exact(state, t_mid, x).rho;
    CHECK(lagrangian_eval(op, s, Vec{x})[0] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("convex blend of sod densities forms spurious intermediate plateaus") {
  const RiemannState state = sod_state();
  const SodSolution sol = sod_structure(state);
  const double t0 = 0.1, t1 = 0.3, t_mid = 0.2;
  const Field rho0(FieldFunction{
      [&state, t0](const Vec& x) { return Vec{sod_exact(state, t0, x[0]).rho}; }, 1, 1});
  const Field rho1(FieldFunction{
      [&state, t1](const Vec& x) { return Vec{sod_exact(state, t1, x[0]).rho}; }, 1, 1});

  // between the mid-time and late-time shock positions the exact density is
  // still undisturbed, but the blend averages in the late star state
  const double S = sol.head_r;
  const double x = 0.5 * (S * t_mid + S * t1);
  const double blend = convex_eval(rho0, rho1, 0.5, Vec{x})[0];
  const double exact = sod_exact(state, t_mid, x).rho;
  CHECK(blend == doctest::Approx(0.5 * (state.rho_r + sol.rho_star_r)).epsilon(1e-12));
  CHECK(exact == doctest::Approx(state.rho_r).epsilon(1e-12));
  CHECK(std::abs(blend - exact) > 0.05);

  // while the transported density stays exact there
  AffineTransportMap fwd{SymMat::diag({t1 / t0}), Vec{0.0}, Vec{0.0}};
  AffineTransportMap rev{SymMat::diag({t0 / t1}), Vec{0.0}, Vec{0.0}};
  const CdiOperator op{rho0, rho1, fwd, rev};
  CHECK(lagrangian_eval(op, 0.5, Vec{x})[0] == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("path parameter range is validated") {
  const CdiOperator op = heat_operator(0.1, 0.4, 1);
  CHECK_THROWS_AS(cdi_eval(op, -0.1, Vec{0.0}), InvalidParameter);
  CHECK_THROWS_AS(cdi_eval(op, 1.1, Vec{0.0}), InvalidParameter);
  CHECK_THROWS_AS(mccann_eval(op, 2.0, Vec{0.0}), InvalidParameter);
}
