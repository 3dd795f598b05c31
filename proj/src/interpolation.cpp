#include "cdi/interpolation.hpp"

#include <algorithm>
#include <cmath>

namespace cdi {

CdiOperator make_cdi_operator(Field u0, Field u1, const Gaussian& g0, const Gaussian& g1) {
  if (u0.components() != u1.components())
    throw DimensionError("make_cdi_operator: snapshots have different component counts");
  if (u0.dim() != g0.dim() || u1.dim() != g1.dim())
    throw DimensionError("make_cdi_operator: model dimension does not match the fields");
  CdiOperator op{std::move(u0), std::move(u1), ot_map(g0, g1), ot_map(g1, g0)};
  return op;
}

namespace {

void check_s_range(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw InvalidParameter("interpolation: path parameter s must lie in [0,1]");
}

}  // namespace

Vec cdi_eval(const CdiOperator& op, double s, const Vec& x) {
  check_s_range(s);
  if (s == 0.0) return op.u0(x);
  if (s == 1.0) return op.u1(x);
  const Vec w = (1.0 - s) * x + s * eval_forward(op.map10, 1.0, x);
  const Vec t = eval_forward(op.map01, 1.0 - s, x);
  Vec out = op.u0(w);
  const Vec v1 = op.u1(t);
  for (int c = 0; c < out.size(); ++c) out[c] = (1.0 - s) * out[c] + s * v1[c];
  return out;
}

Vec convex_eval(const Field& u0, const Field& u1, double s, const Vec& x) {
  check_s_range(s);
  if (s == 0.0) return u0(x);
  if (s == 1.0) return u1(x);
  Vec out = u0(x);
  const Vec v1 = u1(x);
  for (int c = 0; c < out.size(); ++c) out[c] = (1.0 - s) * out[c] + s * v1[c];
  return out;
}

Vec mccann_eval(const CdiOperator& op, double s, const Vec& x) {
  check_s_range(s);
  if (s == 0.0) return op.u0(x);
  const Vec y = eval_inverse(op.map01, s, x);
  const double jac = forward_jacobian_det(op.map01, s);
  Vec out = op.u0(y);
  for (int c = 0; c < out.size(); ++c) out[c] /= jac;
  return out;
}

Vec lagrangian_eval(const CdiOperator& op, double s, const Vec& x) {
  check_s_range(s);
  if (s == 0.0) return op.u0(x);
  const Vec y = eval_inverse(op.map01, s, x);
  Vec out = op.u0(y);
  if (s == 1.0) {
    return op.u1(eval_forward(op.map01, 1.0, y));
  }
  const Vec v1 = op.u1(eval_forward(op.map01, 1.0, y));
  for (int c = 0; c < out.size(); ++c) out[c] = (1.0 - s) * out[c] + s * v1[c];
  return out;
}

Vec interp_eval(const CdiOperator& op, double s, const Vec& x, InterpolantKind kind) {
  switch (kind) {
    case InterpolantKind::Blend:
      return cdi_eval(op, s, x);
    case InterpolantKind::Mccann:
      return mccann_eval(op, s, x);
    default:
      return lagrangian_eval(op, s, x);
  }
}

namespace {

// Minimizes err(s) over [0,1]: 101-point scan, then golden-section
// refinement of the best bracket down to |ds| <= 1e-4. Returns the best
// probed point, so the result never exceeds any scanned value.
template <typename ErrFn>
Projection scan_then_golden(const ErrFn& err) {
  Projection best;
  best.s_star = 0.0;
  best.err = err(0.0);
  for (int i = 1; i <= 100; ++i) {
    const double s = i / 100.0;
    const double e = err(s);
    if (e < best.err) {
      best.s_star = s;
      best.err = e;
    }
  }
  double lo = std::max(0.0, best.s_star - 0.01);
  double hi = std::min(1.0, best.s_star + 0.01);
  const double inv_phi = 0.6180339887498948482;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = err(a), fb = err(b);
  while (hi - lo > 1e-4) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = err(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = err(b);
    }
    if (fa < best.err) {
      best.s_star = a;
      best.err = fa;
    }
    if (fb < best.err) {
      best.s_star = b;
      best.err = fb;
    }
  }
  return best;
}

}  // namespace

Projection project_s(const CdiOperator& op, const Field& target, const EvalDomain& domain,
                     InterpolantKind kind) {
  auto err = [&](double s) {
    FieldFunction interp{[&op, s, kind](const Vec& x) { return interp_eval(op, s, x, kind); },
                         op.u0.dim(), op.u0.components()};
    return l2_error(Field(interp), target, domain).relative;
  };
  return scan_then_golden(err);
}

Projection project_s_convex(const Field& u0, const Field& u1, const Field& target,
                            const EvalDomain& domain) {
  auto err = [&](double s) {
    FieldFunction interp{[&u0, &u1, s](const Vec& x) { return convex_eval(u0, u1, s, x); },
                         u0.dim(), u0.components()};
    return l2_error(Field(interp), target, domain).relative;
  };
  return scan_then_golden(err);
}

double Rescaling::operator()(double tq) const {
  if (tq <= t.front()) return s.front();
  if (tq >= t.back()) return s.back();
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  const double w = (tq - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - w) * s[k - 1] + w * s[k];
}

Rescaling learn_rescaling(const CdiOperator& op,
                          const std::vector<std::pair<double, Field>>& snapshots,
                          const EvalDomain& domain, InterpolantKind kind) {
  Rescaling r;
  r.t = {0.0};
  r.s = {0.0};
  std::vector<std::size_t> interior_index;
  std::size_t index = 0;
  double prev_t = -1.0;
  for (const auto& [tk, field] : snapshots) {
    if (tk < 0.0 || tk > 1.0)
      throw InvalidParameter("learn_rescaling: snapshot parameters must lie in [0,1]");
    if (tk <= prev_t)
      throw InvalidParameter("learn_rescaling: snapshot parameters must be increasing");
    prev_t = tk;
    if (tk == 0.0 || tk == 1.0) {
      ++index;
      continue;  // endpoints are pinned exactly
    }
    r.t.push_back(tk);
    r.s.push_back(project_s(op, field, domain, kind).s_star);
    interior_index.push_back(index);
    ++index;
  }
  r.t.push_back(1.0);
  r.s.push_back(1.0);

  std::vector<std::size_t> offending;
  for (std::size_t k = 0; k + 1 < r.s.size(); ++k) {
    if (!(r.s[k] < r.s[k + 1])) {
      // attribute the violation to the interior snapshot involved
      const std::size_t bad = std::min(k, interior_index.size() - 1);
      offending.push_back(interior_index.empty() ? 0 : interior_index[bad]);
    }
  }
  if (!offending.empty())
    throw NonMonotoneRescaling("learn_rescaling: projected parameters are not increasing",
                               offending);
  return r;
}

}  // namespace cdi
