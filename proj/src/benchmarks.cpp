#include "cdi/benchmarks.hpp"

#include <cmath>

namespace cdi {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

double heat_kernel(double t, const Vec& x) {
  if (!(t > 0.0)) throw InvalidTime("heat_kernel: time must be positive");
  const int n = x.size();
  return std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-x.dot(x) / (4.0 * t));
}

ZkbExponents zkb_exponents(int n, int m) {
  if (m <= 1) throw InvalidExponent("zkb: exponent m must be an integer > 1");
  if (n < 1) throw DimensionError("zkb: dimension must be >= 1");
  ZkbExponents e;
  e.alpha = static_cast<double>(n) / (n * (m - 1) + 2);
  e.beta = e.alpha / n;
  e.k = (m - 1) * e.alpha / (2.0 * m * n);
  return e;
}

double zkb_profile(double t, const Vec& x, int n, int m, double C) {
  if (!(t > 0.0)) throw InvalidTime("zkb_profile: time must be positive");
  if (!(C > 0.0)) throw InvalidParameter("zkb_profile: C must be positive");
  if (x.size() != n) throw DimensionError("zkb_profile: dimension mismatch");
  const ZkbExponents e = zkb_exponents(n, m);
  const double arg = C - e.k * x.dot(x) * std::pow(t, -2.0 * e.beta);
  if (arg <= 0.0) return 0.0;
  return std::pow(t, -e.alpha) * std::pow(arg, 1.0 / (m - 1));
}

double zkb_support_radius(double t, int n, int m, double C) {
  const ZkbExponents e = zkb_exponents(n, m);
  return std::sqrt(C / e.k) * std::pow(t, e.beta);
}

double zkb_moment_variance(double t, int n, int m, double C) {
  // Per-axis variance of the normalized profile. With p = 1/(m-1) the
  // Dirichlet integrals reduce to C / (k (n + 2p + 2)) at t = 1, scaled by
  // the self-similar stretching t^{2 beta}.
  const ZkbExponents e = zkb_exponents(n, m);
  const double p = 1.0 / (m - 1);
  return C / (e.k * (n + 2.0 * p + 2.0)) * std::pow(t, 2.0 * e.beta);
}

SimpleWaveProblem tanh_fan_problem() {
  SimpleWaveProblem p;
  p.a0 = [](double x) { return 2.0 + std::tanh((x + 1.0) / 0.2); };
  p.riemann_constant = 1.0;
  p.gamma = 1.4;
  return p;
}

double simple_wave_foot(const SimpleWaveProblem& p, double t, double x) {
  if (!(t >= 0.0)) throw InvalidTime("simple_wave: time must be nonnegative");
  auto residual = [&](double xi) { return xi + p.characteristic_speed(xi) * t - x; };

  // Bracket the root by geometric expansion around x.
  double step = std::max(1.0, std::abs(p.characteristic_speed(x)) * t);
  double lo = x, hi = x;
  double rlo = residual(lo), rhi = residual(hi);
  int tries = 0;
  while (rlo > 0.0 && tries < 60) {
    lo -= step;
    step *= 2.0;
    rlo = residual(lo);
    ++tries;
  }
  step = std::max(1.0, std::abs(p.characteristic_speed(x)) * t);
  tries = 0;
  while (rhi < 0.0 && tries < 60) {
    hi += step;
    step *= 2.0;
    rhi = residual(hi);
    ++tries;
  }
  if (rlo > 0.0 || rhi < 0.0)
    throw CharacteristicsCrossed("simple_wave: failed to bracket the characteristic foot");

  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double xi = 0.5 * (lo + hi);

  // Non-crossing check: d X+ / d xi > 0 near the foot.
  const double h = 1e-7 * std::max(1.0, std::abs(xi));
  const double slope =
      1.0 + (p.characteristic_speed(xi + h) - p.characteristic_speed(xi - h)) / (2.0 * h) * t;
  if (!(slope > 0.0))
    throw CharacteristicsCrossed("simple_wave: characteristics cross at the queried time");
  return xi;
}

SimpleWaveState simple_wave_solution(const SimpleWaveProblem& p, double t, double x) {
  const double xi = simple_wave_foot(p, t, x);
  return SimpleWaveState{p.initial_velocity(xi), p.a0(xi)};
}

RiemannState sod_state() { return RiemannState{1.0, 0.0, 1.0, 0.125, 0.0, 0.1, 1.4}; }

namespace {

struct SideQuantities {
  double rho, u, p, a;
};

// Pressure function of one side and its derivative (shock branch for
// p > p_side, rarefaction branch otherwise).
void pressure_function(const SideQuantities& q, double gamma, double p, double& f, double& df) {
  if (p > q.p) {
    const double A = 2.0 / ((gamma + 1.0) * q.rho);
    const double B = (gamma - 1.0) / (gamma + 1.0) * q.p;
    const double root = std::sqrt(A / (B + p));
    f = (p - q.p) * root;
    df = root * (1.0 - 0.5 * (p - q.p) / (B + p));
  } else {
    const double z = (gamma - 1.0) / (2.0 * gamma);
    f = 2.0 * q.a / (gamma - 1.0) * (std::pow(p / q.p, z) - 1.0);
    df = std::pow(p / q.p, -(gamma + 1.0) / (2.0 * gamma)) / (q.rho * q.a);
  }
}

void validate_state(const RiemannState& s) {
  if (!(s.rho_l > 0.0 && s.rho_r > 0.0 && s.p_l > 0.0 && s.p_r > 0.0))
    throw InvalidParameter("riemann: densities and pressures must be positive");
  if (!(s.gamma > 1.0)) throw InvalidParameter("riemann: gamma must exceed 1");
}

}  // namespace

SodSolution sod_structure(const RiemannState& s) {
  validate_state(s);
  const double gamma = s.gamma;
  const SideQuantities L{s.rho_l, s.u_l, s.p_l, std::sqrt(gamma * s.p_l / s.rho_l)};
  const SideQuantities R{s.rho_r, s.u_r, s.p_r, std::sqrt(gamma * s.p_r / s.rho_r)};
  const double du = R.u - L.u;

  if (2.0 * (L.a + R.a) / (gamma - 1.0) <= du)
    throw VacuumError("riemann: initial data generate vacuum");

  // Two-rarefaction initial guess.
  const double z = (gamma - 1.0) / (2.0 * gamma);
  double p = std::pow((L.a + R.a - 0.5 * (gamma - 1.0) * du) /
                          (L.a / std::pow(L.p, z) + R.a / std::pow(R.p, z)),
                      1.0 / z);
  if (!(p > 0.0)) p = 0.5 * (L.p + R.p);

  auto total = [&](double pp, double& f, double& df) {
    double fl, dfl, fr, dfr;
    pressure_function(L, gamma, pp, fl, dfl);
    pressure_function(R, gamma, pp, fr, dfr);
    f = fl + fr + du;
    df = dfl + dfr;
  };

  int iters = 0;
  bool converged = false;
  bool left_positivity = false;
  for (; iters < 100; ++iters) {
    double f, df;
    total(p, f, df);
    const double pnext = p - f / df;
    if (!(pnext > 0.0)) {
      left_positivity = true;
      break;
    }
    const double change = std::abs(pnext - p) / (0.5 * (pnext + p));
    p = pnext;
    if (change < 1e-15) {
      converged = true;
      ++iters;
      break;
    }
  }
  if (!converged && !left_positivity)
    throw NoConvergence("riemann: star-state Newton iteration did not converge in 100 steps");
  if (!converged) {
    // Newton stepped out of the positive pressures; bisect instead.
    double lo = 1e-12 * std::min(L.p, R.p), hi = std::max({L.p, R.p, p}) * 10.0;
    double f, df;
    total(hi, f, df);
    int guard = 0;
    while (f < 0.0 && guard++ < 60) {
      hi *= 10.0;
      total(hi, f, df);
    }
    total(lo, f, df);
    if (f > 0.0) throw NoConvergence("riemann: cannot bracket star pressure");
    for (int it = 0; it < 400 && (hi - lo) > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      total(mid, f, df);
      if (f <= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    p = 0.5 * (lo + hi);
  }

  SodSolution sol;
  sol.p_star = p;
  double fl, dfl, fr, dfr;
  pressure_function(L, gamma, p, fl, dfl);
  pressure_function(R, gamma, p, fr, dfr);
  sol.u_star = 0.5 * (L.u + R.u) + 0.5 * (fr - fl);
  sol.newton_iterations = iters;

  const double beta = (gamma - 1.0) / (gamma + 1.0);
  sol.left_is_shock = p > L.p;
  sol.right_is_shock = p > R.p;

  if (sol.left_is_shock) {
    sol.rho_star_l = L.rho * (p / L.p + beta) / (beta * p / L.p + 1.0);
    const double S = L.u - L.a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * p / L.p +
                                           (gamma - 1.0) / (2.0 * gamma));
    sol.head_l = sol.tail_l = S;
  } else {
    sol.rho_star_l = L.rho * std::pow(p / L.p, 1.0 / gamma);
    const double a_star = L.a * std::pow(p / L.p, z);
    sol.head_l = L.u - L.a;
    sol.tail_l = sol.u_star - a_star;
  }

  if (sol.right_is_shock) {
    sol.rho_star_r = R.rho * (p / R.p + beta) / (beta * p / R.p + 1.0);
    const double S = R.u + R.a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * p / R.p +
                                           (gamma - 1.0) / (2.0 * gamma));
    sol.head_r = sol.tail_r = S;
  } else {
    sol.rho_star_r = R.rho * std::pow(p / R.p, 1.0 / gamma);
    const double a_star = R.a * std::pow(p / R.p, z);
    sol.head_r = R.u + R.a;
    sol.tail_r = sol.u_star + a_star;
  }
  return sol;
}

PrimitiveState sod_exact(const RiemannState& s, double t, double x) {
  if (!(t > 0.0)) throw InvalidTime("sod_exact: time must be positive");
  const SodSolution sol = sod_structure(s);
  const double gamma = s.gamma;
  const double eta = x / t;
  const double a_l = std::sqrt(gamma * s.p_l / s.rho_l);
  const double a_r = std::sqrt(gamma * s.p_r / s.rho_r);

  if (eta <= sol.u_star) {
    if (sol.left_is_shock) {
      if (eta <= sol.head_l) return {s.rho_l, s.u_l, s.p_l};
      return {sol.rho_star_l, sol.u_star, sol.p_star};
    }
    if (eta <= sol.head_l) return {s.rho_l, s.u_l, s.p_l};
    if (eta >= sol.tail_l) return {sol.rho_star_l, sol.u_star, sol.p_star};
    // inside the left fan
    const double u = 2.0 / (gamma + 1.0) * (a_l + 0.5 * (gamma - 1.0) * s.u_l + eta);
    const double a = 2.0 / (gamma + 1.0) * (a_l + 0.5 * (gamma - 1.0) * (s.u_l - eta));
    const double rho = s.rho_l * std::pow(a / a_l, 2.0 / (gamma - 1.0));
    const double p = s.p_l * std::pow(a / a_l, 2.0 * gamma / (gamma - 1.0));
    return {rho, u, p};
  }

  if (sol.right_is_shock) {
    if (eta >= sol.head_r) return {s.rho_r, s.u_r, s.p_r};
    return {sol.rho_star_r, sol.u_star, sol.p_star};
  }
  if (eta >= sol.head_r) return {s.rho_r, s.u_r, s.p_r};
  if (eta <= sol.tail_r) return {sol.rho_star_r, sol.u_star, sol.p_star};
  const double u = 2.0 / (gamma + 1.0) * (-a_r + 0.5 * (gamma - 1.0) * s.u_r + eta);
  const double a = 2.0 / (gamma + 1.0) * (a_r - 0.5 * (gamma - 1.0) * (s.u_r - eta));
  const double rho = s.rho_r * std::pow(a / a_r, 2.0 / (gamma - 1.0));
  const double p = s.p_r * std::pow(a / a_r, 2.0 * gamma / (gamma - 1.0));
  return {rho, u, p};
}

namespace {

void validate_wedge(const WedgeProblem& p) {
  if (!(p.mach_upstream > 1.0))
    throw InvalidParameter("wedge: upstream Mach number must exceed 1");
  if (!(p.delta > 0.0 && p.delta < 0.5 * kPi))
    throw InvalidParameter("wedge: wedge angle must lie in (0, pi/2)");
  if (!(p.gamma > 1.0)) throw InvalidParameter("wedge: gamma must exceed 1");
}

// Deflection angle produced by a shock at angle theta.
double deflection(double mach, double gamma, double theta) {
  const double msin2 = mach * mach * std::sin(theta) * std::sin(theta);
  const double num = 2.0 * (msin2 - 1.0) / std::tan(theta);
  const double den = mach * mach * (gamma + std::cos(2.0 * theta)) + 2.0;
  return std::atan(num / den);
}

// Shock angle maximizing the deflection, by golden-section search.
double max_deflection_angle(double mach, double gamma) {
  const double inv_phi = 0.6180339887498948482;
  double lo = std::asin(1.0 / mach) + 1e-12, hi = 0.5 * kPi - 1e-12;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = deflection(mach, gamma, a), fb = deflection(mach, gamma, b);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = deflection(mach, gamma, b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = deflection(mach, gamma, a);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double wedge_detachment_angle(double mach_upstream, double gamma) {
  return deflection(mach_upstream, gamma, max_deflection_angle(mach_upstream, gamma));
}

ObliqueShock wedge_shock_angle(const WedgeProblem& p) {
  validate_wedge(p);
  const double mach = p.mach_upstream;
  const double theta_max = max_deflection_angle(mach, p.gamma);
  if (p.delta >= deflection(mach, p.gamma, theta_max))
    throw DetachedShock("wedge: wedge angle above the detachment limit");

  // Weak-branch root of delta(theta) = delta on (Mach angle, theta_max).
  double lo = std::asin(1.0 / mach) + 1e-9, hi = theta_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (deflection(mach, p.gamma, mid) < p.delta)
      lo = mid;
    else
      hi = mid;
  }
  ObliqueShock r;
  r.theta = 0.5 * (lo + hi);
  const double msin2 = mach * mach * std::sin(r.theta) * std::sin(r.theta);
  const double md_sin2 = ((p.gamma - 1.0) * msin2 + 2.0) / (2.0 * p.gamma * msin2 - (p.gamma - 1.0));
  r.mach_downstream = std::sqrt(md_sin2) / std::abs(std::sin(r.theta - p.delta));
  return r;
}

FieldFunction wedge_mach_field(const WedgeProblem& p) {
  const ObliqueShock shock = wedge_shock_angle(p);
  const double tan_theta = std::tan(shock.theta);
  const double mu = p.mach_upstream, md = shock.mach_downstream;
  return scalar_field_2d([tan_theta, mu, md](double x1, double x2) {
    if (x1 < 0.0 || x2 > x1 * tan_theta) return mu;
    return md;
  });
}

Vec wedge_map_lambda(const Vec& x, double delta) {
  if (x.size() != 2) throw DimensionError("wedge_map_lambda: expected a 2D point");
  if (x[0] < 0.0) return x;
  const double td = std::tan(delta);
  if (1.0 - x[0] * td <= 0.0)
    throw MapSingular("wedge_map_lambda: 1 - x1 tan(delta) not positive");
  return Vec{x[0], x[0] * td + (1.0 - x[0] * td) * x[1]};
}

Vec wedge_map_theta(const Vec& x, double delta) {
  if (x.size() != 2) throw DimensionError("wedge_map_theta: expected a 2D point");
  if (x[0] < 0.0) return x;
  const double td = std::tan(delta);
  const double den = 1.0 - x[0] * td;
  if (den <= 0.0) throw MapSingular("wedge_map_theta: 1 - x1 tan(delta) not positive");
  return Vec{x[0], (x[1] - x[0] * td) / den};
}

Vec wedge_map_phi(const Vec& x, double delta, double delta_bar) {
  return wedge_map_lambda(wedge_map_theta(x, delta_bar), delta);
}

}  // namespace cdi
