#ifndef CDI_BENCHMARKS_HPP
#define CDI_BENCHMARKS_HPP

#include <functional>

#include "cdi/field.hpp"
#include "cdi/linalg.hpp"

namespace cdi {

// ---------------------------------------------------------------------------
// Heat kernel and porous-medium (ZKB) self-similar profiles.

// K(t, x) = (4 pi t)^{-n/2} exp(-|x|^2 / (4t)), n = x.size().
double heat_kernel(double t, const Vec& x);

// Per-axis variance of the normalized heat kernel at time t: 2t.
inline double heat_moment_variance(double t) { return 2.0 * t; }

struct ZkbExponents {
  double alpha, beta, k;
};
ZkbExponents zkb_exponents(int n, int m);

// Compact-support profile B(t, x) = t^-alpha ((C - k |x|^2 t^-2beta)^+)^{1/(m-1)}.
double zkb_profile(double t, const Vec& x, int n, int m, double C);

// Support radius and per-axis variance of the normalized profile.
double zkb_support_radius(double t, int n, int m, double C);
double zkb_moment_variance(double t, int n, int m, double C);

// ---------------------------------------------------------------------------
// Isentropic simple wave.

// Simple-wave flow: the left-going Riemann invariant 2a/(gamma-1) - u is
// constant (= riemann_constant), so the state is carried unchanged along
// straight right-going characteristics x = xi + (u0 + a0)(xi) t.
struct SimpleWaveProblem {
  std::function<double(double)> a0;  // initial sound speed, positive and smooth
  double riemann_constant = 1.0;     // c = 2 a/(gamma-1) - u
  double gamma = 1.4;

  double initial_velocity(double xi) const {
    return 2.0 * a0(xi) / (gamma - 1.0) - riemann_constant;
  }
  double characteristic_speed(double xi) const { return initial_velocity(xi) + a0(xi); }
};

// Reference expansion-fan setup: a0(x) = 2 + tanh((x+1)/0.2), c = 1,
// gamma = 7/5. A smooth rightward-traveling fan.
SimpleWaveProblem tanh_fan_problem();

struct SimpleWaveState {
  double u, a;
};

// Foot xi = Y+(t, x) of the right-going characteristic through (t, x),
// found by bracketing plus bisection. Throws CharacteristicsCrossed when no
// monotone bracket exists.
double simple_wave_foot(const SimpleWaveProblem& p, double t, double x);

// State at (t, x): the initial state at the characteristic foot.
SimpleWaveState simple_wave_solution(const SimpleWaveProblem& p, double t, double x);

// ---------------------------------------------------------------------------
// Riemann problem (exact solver).

struct RiemannState {
  double rho_l, u_l, p_l;
  double rho_r, u_r, p_r;
  double gamma = 1.4;
};

// Standard Sod data (1, 0, 1) | (0.125, 0, 0.1), gamma = 1.4.
RiemannState sod_state();

// Star region and wave structure of the exact solution.
struct SodSolution {
  double p_star, u_star;
  double rho_star_l, rho_star_r;
  bool left_is_shock, right_is_shock;
  double head_l, tail_l;  // left wave speeds (head == tail for a shock)
  double head_r, tail_r;
  int newton_iterations;
};

SodSolution sod_structure(const RiemannState& s);

struct PrimitiveState {
  double rho, u, p;
};

// Exact solution at (t, x), self-similar in x/t.
PrimitiveState sod_exact(const RiemannState& s, double t, double x);

// ---------------------------------------------------------------------------
// Supersonic wedge.

struct WedgeProblem {
  double mach_upstream;  // > 1
  double delta;          // wedge angle, radians
  double gamma = 1.4;
};

struct ObliqueShock {
  double theta;            // shock angle (weak branch), radians
  double mach_downstream;  // M^d
};

// Weak-branch solution of the theta-beta-M relation; throws DetachedShock
// above the detachment angle.
ObliqueShock wedge_shock_angle(const WedgeProblem& p);

// Maximum attached wedge angle for the given upstream Mach number.
double wedge_detachment_angle(double mach_upstream, double gamma);

// Piecewise-constant Mach field on all of R^2: upstream above the shock
// line x2 = x1 tan(theta) and for x1 < 0, downstream below.
FieldFunction wedge_mach_field(const WedgeProblem& p);

// Geometry maps between the reference strip and the physical wedge domain.
// lambda maps reference to physical, theta is its inverse, and
// phi(., delta, delta_bar) = lambda(theta(., delta_bar), delta) remaps the
// flow domain of delta_bar onto the one of delta.
Vec wedge_map_lambda(const Vec& x, double delta);
Vec wedge_map_theta(const Vec& x, double delta);
Vec wedge_map_phi(const Vec& x, double delta, double delta_bar);

}  // namespace cdi

#endif
