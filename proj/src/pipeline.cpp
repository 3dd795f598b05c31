#include "cdi/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdi {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

bool same_grid(const StructuredField& a, const StructuredField& b) {
  return a.n1() == b.n1() && a.n2() == b.n2() && a.components() == b.components() &&
         a.x1lo() == b.x1lo() && a.x1hi() == b.x1hi() && a.x2lo() == b.x2lo() &&
         a.x2hi() == b.x2hi();
}

// Interpolant snapshots at s = 0 and s = 1 are the inputs themselves;
// copying keeps them bit-identical. Returns empty for interior s.
std::vector<double> endpoint_values(const StructuredField& u0, const StructuredField& u1,
                                    double s) {
  if (s == 0.0) return u0.raw_values();
  if (s == 1.0 && same_grid(u0, u1)) return u1.raw_values();
  return {};
}

std::vector<Vec> masked_nodes(const StructuredField& f, const std::vector<std::uint8_t>& mask,
                              std::vector<double>* masked_values,
                              const std::vector<double>& values) {
  std::vector<Vec> nodes;
  std::size_t k = 0;
  for (int i = 0; i < f.n1(); ++i)
    for (int j = 0; j < f.n2(); ++j, ++k) {
      if (!mask.empty() && mask[k] == 0) continue;
      nodes.push_back(f.node_coords(i, j));
      masked_values->push_back(values[k]);
    }
  return nodes;
}

}  // namespace

PointCloud detect_structure(const StructuredField& f, const DetectorConfig& cfg) {
  return detect_structure(f, cfg, {});
}

PointCloud detect_structure(const StructuredField& f, const DetectorConfig& cfg,
                            const std::vector<std::uint8_t>& mask) {
  std::vector<double> values;
  switch (cfg.kind) {
    case DetectorKind::ThresholdGradient:
      values = forward_diff_values(f, cfg.component, cfg.threshold);
      break;
    case DetectorKind::DucrosTopFraction:
      values = ducros_field_values(f, cfg.ducros_eps);
      break;
  }
  std::vector<double> kept_values;
  kept_values.reserve(values.size());
  const std::vector<Vec> nodes = masked_nodes(f, mask, &kept_values, values);
  if (cfg.kind == DetectorKind::DucrosTopFraction)
    return select_top_fraction(nodes, kept_values, cfg.top_fraction);
  return select_points(std::span<const Vec>(nodes), std::span<const double>(kept_values));
}

std::string to_csv(const BenchTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, c ? ",%.17g" : "%.17g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const BenchTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("write_csv: cannot open " + path);
  out << to_csv(table);
  if (!out) throw FormatError("write_csv: write failure for " + path);
}

// ---------------------------------------------------------------------------
// Heat / ZKB density benchmarks: displacement interpolation of the snapshot
// density through the exact-moment Gaussian models, with the self-similar
// parameter rescaling.

namespace {

BenchTable density_bench(int n, double t0, double t1, int n_times, int grid_1d, int grid_2d,
                         const std::function<double(double, const Vec&)>& exact,
                         const std::function<double(double)>& moment_variance,
                         const std::function<double(double)>& rescale, double half_width,
                         const std::string& name) {
  if (!(t1 > t0) || !(t0 > 0.0)) throw InvalidTime(name + ": need t1 > t0 > 0");
  if (n != 1 && n != 2) throw DimensionError(name + ": dimension must be 1 or 2");

  auto gaussian_at = [&](double t) {
    Gaussian g;
    g.mean = Vec(n, 0.0);
    g.cov = moment_variance(t) * SymMat::identity(n);
    return g;
  };
  auto field_at = [&](double t) {
    return FieldFunction{[&exact, t](const Vec& x) { return Vec{exact(t, x)}; }, n, 1};
  };

  const CdiOperator op = make_cdi_operator(Field(field_at(t0)), Field(field_at(t1)),
                                           gaussian_at(t0), gaussian_at(t1));
  const EvalDomain dom = n == 1 ? EvalDomain::line(-half_width, half_width, grid_1d)
                                : EvalDomain::box(-half_width, half_width, -half_width,
                                                  half_width, grid_2d, grid_2d);

  BenchTable table;
  table.name = name;
  table.columns = {"t", "rescaled_s", "rel_L2_cdi", "rel_L2_convex"};
  for (int k = 1; k <= n_times; ++k) {
    const double t = t0 + (t1 - t0) * k / (n_times + 1);
    const double s = rescale(t);
    const Field target(field_at(t));
    const FieldFunction disp{[&op, s](const Vec& x) { return mccann_eval(op, s, x); }, n, 1};
    const FieldFunction blend{
        [&op, s](const Vec& x) { return convex_eval(op.u0, op.u1, s, x); }, n, 1};
    table.rows.push_back({t, s, l2_error(Field(disp), target, dom).relative,
                          l2_error(Field(blend), target, dom).relative});
  }
  return table;
}

}  // namespace

BenchTable bench_heat(const HeatBenchConfig& cfg) {
  const double root0 = std::sqrt(cfg.t0), root1 = std::sqrt(cfg.t1);
  return density_bench(
      cfg.n, cfg.t0, cfg.t1, cfg.n_times, cfg.grid_1d, cfg.grid_2d,
      [](double t, const Vec& x) { return heat_kernel(t, x); },
      [](double t) { return heat_moment_variance(t); },
      [root0, root1](double t) { return (std::sqrt(t) - root0) / (root1 - root0); },
      6.0 * std::sqrt(2.0 * cfg.t1), "bench_heat");
}

BenchTable bench_zkb(const ZkbBenchConfig& cfg) {
  const ZkbExponents e = zkb_exponents(cfg.n, cfg.m);
  const double p0 = std::pow(cfg.t0, e.beta), p1 = std::pow(cfg.t1, e.beta);
  const int n = cfg.n, m = cfg.m;
  const double C = cfg.C;
  return density_bench(
      cfg.n, cfg.t0, cfg.t1, cfg.n_times, cfg.grid_1d, cfg.grid_2d,
      [n, m, C](double t, const Vec& x) { return zkb_profile(t, x, n, m, C); },
      [n, m, C](double t) { return zkb_moment_variance(t, n, m, C); },
      [p0, p1, e](double t) { return (std::pow(t, e.beta) - p0) / (p1 - p0); },
      1.2 * zkb_support_radius(cfg.t1, cfg.n, cfg.m, cfg.C), "bench_zkb");
}

// ---------------------------------------------------------------------------
// Simple wave study.

BenchTable bench_simplewave(const SimpleWaveBenchConfig& cfg) {
  if (!(cfg.t1 > cfg.t0) || !(cfg.t0 >= 0.0))
    throw InvalidTime("bench_simplewave: need t1 > t0 >= 0");
  const SimpleWaveProblem problem = tanh_fan_problem();

  auto velocity_snapshot = [&](double t) {
    const FieldFunction u{[&problem, t](const Vec& x) {
                            return Vec{simple_wave_solution(problem, t, x[0]).u};
                          },
                          1, 1};
    return StructuredField::sample_function(u, cfg.grid_lo, cfg.grid_hi, cfg.grid_n);
  };

  const StructuredField snap0 = velocity_snapshot(cfg.t0);
  const StructuredField snap1 = velocity_snapshot(cfg.t1);

  DetectorConfig det;
  det.kind = DetectorKind::ThresholdGradient;
  det.threshold = cfg.threshold;
  const Gaussian g0 = mle_fit(detect_structure(snap0, det));
  const Gaussian g1 = mle_fit(detect_structure(snap1, det));

  const CdiOperator op = make_cdi_operator(Field(snap0), Field(snap1), g0, g1);
  const EvalDomain window = EvalDomain::line(cfg.window_lo, cfg.window_hi, cfg.window_n);

  BenchTable table;
  table.name = "bench_simplewave";
  table.columns = {"alpha", "s_cdi", "s_convex", "err_cdi", "err_convex"};
  for (double alpha : cfg.alphas) {
    const double t = (1.0 - alpha) * cfg.t0 + alpha * cfg.t1;
    StructuredField target_grid = StructuredField::sample_function(
        FieldFunction{[&problem, t](const Vec& x) {
                        return Vec{simple_wave_solution(problem, t, x[0]).u};
                      },
                      1, 1},
        cfg.window_lo, cfg.window_hi, cfg.window_n);
    const Field target(std::move(target_grid));
    if (cfg.project) {
      const Projection pc = project_s(op, target, window);
      const Projection pl = project_s_convex(op.u0, op.u1, target, window);
      table.rows.push_back({alpha, pc.s_star, pl.s_star, pc.err, pl.err});
    } else {
      const FieldFunction cdi{[&op, alpha](const Vec& x) { return cdi_eval(op, alpha, x); }, 1, 1};
      const FieldFunction co{
          [&op, alpha](const Vec& x) { return convex_eval(op.u0, op.u1, alpha, x); }, 1, 1};
      table.rows.push_back({alpha, alpha, alpha, l2_error(Field(cdi), target, window).relative,
                            l2_error(Field(co), target, window).relative});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Sod study: self-similar value transport under the linear-in-time scaling.

BenchTable bench_sod(const SodBenchConfig& cfg) {
  if (!(cfg.t1 > cfg.t0) || !(cfg.t0 > 0.0)) throw InvalidTime("bench_sod: need t1 > t0 > 0");
  const RiemannState state = cfg.state;
  const double t0 = cfg.t0, t1 = cfg.t1;
  const double t_mid = 0.5 * (t0 + t1);

  auto rho_at = [&state](double t) {
    return FieldFunction{
        [&state, t](const Vec& x) { return Vec{sod_exact(state, t, x[0]).rho}; }, 1, 1};
  };

  // Self-similar transport map xi -> (t1/t0) xi.
  AffineTransportMap map;
  map.matrix = SymMat::diag({t1 / t0});
  map.source_mean = Vec{0.0};
  map.target_mean = Vec{0.0};
  CdiOperator op{Field(rho_at(t0)), Field(rho_at(t1)), map,
                 AffineTransportMap{SymMat::diag({t0 / t1}), Vec{0.0}, Vec{0.0}}};

  const double s_mid = (t_mid - t0) / (t1 - t0);
  BenchTable table;
  table.name = "bench_sod";
  table.columns = {"x", "rho_t0", "rho_t1", "rho_exact_mid", "rho_interp_mid"};
  for (int i = 0; i < cfg.grid_n; ++i) {
    const double x = cfg.x_lo + (cfg.x_hi - cfg.x_lo) * i / (cfg.grid_n - 1);
    const Vec xv{x};
    table.rows.push_back({x, sod_exact(state, t0, x).rho, sod_exact(state, t1, x).rho,
                          sod_exact(state, t_mid, x).rho, lagrangian_eval(op, s_mid, xv)[0]});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Wedge study.

StructuredField wedge_snapshot(double mach, double delta_rad, double gamma, int n1, int n2) {
  const WedgeProblem p{mach, delta_rad, gamma};
  return StructuredField::sample_function(wedge_mach_field(p), -0.5, 1.0, 0.0, 1.0, n1, n2);
}

StructuredField wedge_snapshot_mapped(double mach, double delta_rad, double delta_bar_rad,
                                      double gamma, int n1, int n2) {
  const WedgeProblem p{mach, delta_rad, gamma};
  const FieldFunction mach_field = wedge_mach_field(p);
  const FieldFunction mapped{[mach_field, delta_rad, delta_bar_rad](const Vec& x) {
                               return mach_field.evaluator(
                                   wedge_map_phi(x, delta_rad, delta_bar_rad));
                             },
                             2, 1};
  return StructuredField::sample_function(mapped, -0.5, 1.0, 0.0, 1.0, n1, n2);
}

std::vector<std::uint8_t> wedge_flow_mask(double delta_rad, int n1, int n2) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n1) * n2, 1);
  const double tan_delta = std::tan(delta_rad);
  std::size_t k = 0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j, ++k) {
      const double x1 = -0.5 + 1.5 * i / (n1 - 1);
      const double x2 = static_cast<double>(j) / (n2 - 1);
      if (x1 > 0.0 && x2 < x1 * tan_delta) mask[k] = 0;
    }
  return mask;
}

BenchTable bench_wedge(const WedgeBenchConfig& cfg) {
  const double d0 = cfg.delta0_deg * kDegToRad;
  const double d1 = cfg.delta1_deg * kDegToRad;
  const double dbar = 0.5 * (d0 + d1);
  const bool mapped = cfg.mode == WedgeMode::Registration;

  auto snapshot_at = [&](double mach, double delta) {
    return mapped ? wedge_snapshot_mapped(mach, delta, dbar, cfg.gamma, cfg.n1, cfg.n2)
                  : wedge_snapshot(mach, delta, cfg.gamma, cfg.n1, cfg.n2);
  };

  const StructuredField snap0 = snapshot_at(cfg.mach0, d0);
  const StructuredField snap1 = snapshot_at(cfg.mach1, d1);
  const std::vector<std::uint8_t> mask =
      mapped ? wedge_flow_mask(dbar, cfg.n1, cfg.n2) : std::vector<std::uint8_t>{};

  DetectorConfig det;
  det.kind = DetectorKind::ThresholdGradient;
  det.threshold = 1.0;
  const Gaussian g0 = mle_fit(detect_structure(snap0, det, mask));
  const Gaussian g1 = mle_fit(detect_structure(snap1, det, mask));

  const CdiOperator op = make_cdi_operator(Field(snap0), Field(snap1), g0, g1);
  EvalDomain dom = EvalDomain::from_field(snap0);
  dom.mask = mask;

  BenchTable table;
  table.name = "bench_wedge";
  table.columns = {"alpha", "s_cdi", "s_convex", "err_cdi", "err_convex"};
  for (double alpha : cfg.alphas) {
    const double mach = (1.0 - alpha) * cfg.mach0 + alpha * cfg.mach1;
    const double delta = (1.0 - alpha) * d0 + alpha * d1;
    const Field target(snapshot_at(mach, delta));
    if (cfg.project) {
      const Projection pc = project_s(op, target, dom);
      const Projection pl = project_s_convex(op.u0, op.u1, target, dom);
      table.rows.push_back({alpha, pc.s_star, pl.s_star, pc.err, pl.err});
    } else {
      const FieldFunction cdi{[&op, alpha](const Vec& x) { return cdi_eval(op, alpha, x); }, 2, 1};
      const FieldFunction co{
          [&op, alpha](const Vec& x) { return convex_eval(op.u0, op.u1, alpha, x); }, 2, 1};
      table.rows.push_back({alpha, alpha, alpha, l2_error(Field(cdi), target, dom).relative,
                            l2_error(Field(co), target, dom).relative});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Generic snapshot pipeline.

InterpResult run_interp(const StructuredField& u0, const StructuredField& u1,
                        const InterpConfig& cfg) {
  if (u0.components() != u1.components())
    throw DimensionError("run_interp: snapshots have different component counts");
  InterpResult result;
  result.g0 = mle_fit(detect_structure(u0, cfg.detector));
  result.g1 = mle_fit(detect_structure(u1, cfg.detector));
  result.w2 = wasserstein2(result.g0, result.g1);
  result.map01 = ot_map(result.g0, result.g1);
  result.map10 = ot_map(result.g1, result.g0);

  const CdiOperator op{Field(u0), Field(u1), result.map01, result.map10};
  for (double s : cfg.s_values) {
    std::vector<double> values = endpoint_values(u0, u1, s);
    if (values.empty()) {
      values.resize(u0.node_count() * u0.components());
      std::size_t k = 0;
      for (int i = 0; i < u0.n1(); ++i)
        for (int j = 0; j < u0.n2(); ++j) {
          const Vec v = cdi_eval(op, s, u0.node_coords(i, j));
          for (int c = 0; c < u0.components(); ++c) values[k++] = v[c];
        }
    }
    if (u0.dim() == 1)
      result.snapshots.emplace_back(u0.x1lo(), u0.x1hi(), u0.n1(), std::move(values),
                                    u0.components());
    else
      result.snapshots.emplace_back(u0.x1lo(), u0.x1hi(), u0.x2lo(), u0.x2hi(), u0.n1(),
                                    u0.n2(), std::move(values), u0.components());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Boundary-aware registration pipeline.

namespace {

std::vector<PointCloud> cluster_cloud(const PointCloud& cloud, ClusterRule rule) {
  switch (rule) {
    case ClusterRule::SignX2:
      return split_clusters(cloud, [](const Vec& x) { return x[1] >= 0.0 ? 1 : 0; });
    case ClusterRule::None:
      break;
  }
  return {cloud};
}

}  // namespace

RegisterResult run_register(const StructuredField& u0, const StructuredField& u1,
                            const RegisterConfig& cfg) {
  if (u0.dim() != 2 || u1.dim() != 2)
    throw DimensionError("run_register: registration requires 2D snapshots");

  RegisterResult result;
  const PointCloud cloud0 = detect_structure(u0, cfg.detector);
  const PointCloud cloud1 = detect_structure(u1, cfg.detector);
  result.merged0 = mle_fit(cloud0);
  result.merged1 = mle_fit(cloud1);

  const std::vector<PointCloud> clusters0 = cluster_cloud(cloud0, cfg.clusters);
  const std::vector<PointCloud> clusters1 = cluster_cloud(cloud1, cfg.clusters);
  if (clusters0.size() != clusters1.size())
    throw DimensionError("run_register: snapshots decompose into different cluster counts");

  for (const PointCloud& c : clusters0) result.models0.push_back(mle_fit(c));
  for (const PointCloud& c : clusters1) result.models1.push_back(mle_fit(c));
  result.permutation = match_mixtures(result.models0, result.models1);

  for (std::size_t k = 0; k < clusters0.size(); ++k) {
    const int pk = result.permutation[k];
    const AffineTransportMap fwd = ot_map(result.models0[k], result.models1[pk]);
    const AffineTransportMap rev = ot_map(result.models1[pk], result.models0[k]);
    for (const Vec& y : clusters0[k].points)
      result.markers01.push_back({y, eval_forward(fwd, 1.0, y), static_cast<int>(k)});
    for (const Vec& y : clusters1[pk].points)
      result.markers10.push_back({y, eval_forward(rev, 1.0, y), static_cast<int>(k)});
  }

  const PatchBoundary boundary =
      cfg.has_patch
          ? PatchBoundary::rectangle(cfg.patch_x1lo, cfg.patch_x1hi, cfg.patch_x2lo,
                                     cfg.patch_x2hi)
          : PatchBoundary::rectangle(u0.x1lo(), u0.x1hi(), u0.x2lo(), u0.x2hi());
  auto space = std::make_shared<const MapSpace>(cfg.degree, GordonHallPatch(boundary));

  FitOptions opts;
  opts.lambda = cfg.lambda;
  opts.delta_min = cfg.delta_min;
  result.r01 = fit_registration(space, result.markers01, opts);
  result.r10 = fit_registration(space, result.markers10, opts);

  // Outside the patch the warps are undefined; fall back to the plain
  // Gaussian-transport blend built from the merged single-structure models.
  const CdiOperator fallback = make_cdi_operator(Field(u0), Field(u1), result.merged0,
                                                 result.merged1);
  const Field f0(u0), f1(u1);
  const GordonHallPatch& patch = space->patch();
  for (double s : cfg.s_values) {
    std::vector<double> values = endpoint_values(u0, u1, s);
    if (values.empty()) {
      values.resize(u0.node_count() * u0.components());
      std::size_t k = 0;
      for (int i = 0; i < u0.n1(); ++i)
        for (int j = 0; j < u0.n2(); ++j) {
          const Vec x = u0.node_coords(i, j);
          const Vec v = patch.contains(x) ? ba_cdi_eval(f0, f1, result.r01, result.r10, s, x)
                                          : cdi_eval(fallback, s, x);
          for (int c = 0; c < u0.components(); ++c) values[k++] = v[c];
        }
    }
    result.snapshots.emplace_back(u0.x1lo(), u0.x1hi(), u0.x2lo(), u0.x2hi(), u0.n1(), u0.n2(),
                                  std::move(values), u0.components());
  }
  return result;
}

void save_markers(const std::vector<Marker>& markers, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("save_markers: cannot open " + path);
  out << "# cdi-markers v1\n";
  char buf[160];
  for (const Marker& m : markers) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %d\n", m.source[0], m.source[1],
                  m.target[0], m.target[1], m.cluster);
    out << buf;
  }
  if (!out) throw FormatError("save_markers: write failure for " + path);
}

std::vector<Marker> load_markers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_markers: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# cdi-markers v1")
    throw FormatError("load_markers: bad magic at line 1 in " + path);
  std::vector<Marker> markers;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Marker m;
    m.source = Vec(2);
    m.target = Vec(2);
    if (!(ls >> m.source[0] >> m.source[1] >> m.target[0] >> m.target[1]))
      throw FormatError("load_markers: malformed row at line " + std::to_string(lineno) +
                        " in " + path);
    if (!(ls >> m.cluster)) m.cluster = 0;
    markers.push_back(m);
  }
  return markers;
}

}  // namespace cdi
