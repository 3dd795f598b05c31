// Command-line harness for the Gaussian-transport interpolation pipeline:
// benchmark studies with CSV output, generic snapshot interpolation, and
// boundary-aware registration.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cdi/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kDegToRad = 0.017453292519943295;

json to_json(const cdi::Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const cdi::SymMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const cdi::Gaussian& g) {
  return json{{"mean", to_json(g.mean)}, {"cov", to_json(g.cov)}};
}

json to_json(const cdi::AffineTransportMap& m) {
  return json{{"matrix", to_json(m.matrix)},
              {"source_mean", to_json(m.source_mean)},
              {"target_mean", to_json(m.target_mean)}};
}

json fit_summary(const cdi::RegistrationMap& r) {
  json j;
  j["coefficients"] = r.coeffs;
  j["pre_fit_rms"] = r.pre_fit_rms;
  j["mismatch_rms"] = r.mismatch_rms;
  j["certificate_s"] = r.certificate_s;
  j["certificate_min_det"] = r.certificate_min_det;
  j["certified"] = r.certified;
  j["stagnation_warning"] = r.stagnation_warning;
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw cdi::FormatError("cannot open " + path);
  out << j.dump(2) << '\n';
}

std::string out_file(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

struct GridSpec {
  int n1 = 0, n2 = 1;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      g.n1 = std::stoi(text);
    } else {
      g.n1 = std::stoi(text.substr(0, x));
      g.n2 = std::stoi(text.substr(x + 1));
    }
  } catch (const std::exception&) {
    throw cdi::InvalidParameter("--grid expects N or N1xN2");
  }
  if (g.n1 < 2 || g.n2 < 1) throw cdi::InvalidParameter("--grid values out of range");
  return g;
}

cdi::DetectorConfig make_detector(const std::string& kind, double threshold,
                                  double top_fraction, int component) {
  cdi::DetectorConfig det;
  if (kind == "threshold-gradient")
    det.kind = cdi::DetectorKind::ThresholdGradient;
  else if (kind == "ducros-top-fraction")
    det.kind = cdi::DetectorKind::DucrosTopFraction;
  else
    throw cdi::InvalidParameter("--detector must be threshold-gradient or ducros-top-fraction");
  det.threshold = threshold;
  det.top_fraction = top_fraction;
  det.component = component;
  return det;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear snapshot interpolation via optimal transport of Gaussian models"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Reproduce the analytic benchmark studies");
  bench->require_subcommand(1);

  cdi::HeatBenchConfig heat_cfg;
  std::string heat_grid;
  auto* heat = bench->add_subcommand("heat", "Heat-kernel displacement interpolation study");
  heat->add_option("--n", heat_cfg.n, "Spatial dimension (1 or 2)")->capture_default_str();
  heat->add_option("--t0", heat_cfg.t0, "First snapshot time")->capture_default_str();
  heat->add_option("--t1", heat_cfg.t1, "Second snapshot time")->capture_default_str();
  heat->add_option("--times", heat_cfg.n_times, "Interior evaluation times")
      ->capture_default_str();
  heat->add_option("--grid", heat_grid, "Evaluation grid (N or N1xN2)");
  heat->callback([&] {
    if (!heat_grid.empty()) {
      const GridSpec g = parse_grid(heat_grid);
      heat_cfg.grid_1d = g.n1;
      heat_cfg.grid_2d = g.n2 > 1 ? g.n2 : g.n1;
    }
    if (!(heat_cfg.t1 > heat_cfg.t0))
      throw cdi::InvalidTime("bench heat: --t1 must exceed --t0");
    const cdi::BenchTable t = cdi::bench_heat(heat_cfg);
    cdi::write_csv(t, out_file(out_dir, "bench_heat.csv"));
  });

  cdi::ZkbBenchConfig zkb_cfg;
  std::string zkb_grid;
  auto* zkb = bench->add_subcommand("zkb", "Porous-medium (ZKB) displacement study");
  zkb->add_option("--n", zkb_cfg.n, "Spatial dimension")->capture_default_str();
  zkb->add_option("--m", zkb_cfg.m, "Nonlinearity exponent (> 1)")->capture_default_str();
  zkb->add_option("--C", zkb_cfg.C, "Profile constant")->capture_default_str();
  zkb->add_option("--t0", zkb_cfg.t0, "First snapshot time")->capture_default_str();
  zkb->add_option("--t1", zkb_cfg.t1, "Second snapshot time")->capture_default_str();
  zkb->add_option("--times", zkb_cfg.n_times, "Interior evaluation times")
      ->capture_default_str();
  zkb->add_option("--grid", zkb_grid, "Evaluation grid (N or N1xN2)");
  zkb->callback([&] {
    if (!zkb_grid.empty()) {
      const GridSpec g = parse_grid(zkb_grid);
      zkb_cfg.grid_1d = g.n1;
      zkb_cfg.grid_2d = g.n2 > 1 ? g.n2 : g.n1;
    }
    if (!(zkb_cfg.t1 > zkb_cfg.t0)) throw cdi::InvalidTime("bench zkb: --t1 must exceed --t0");
    const cdi::BenchTable t = cdi::bench_zkb(zkb_cfg);
    cdi::write_csv(t, out_file(out_dir, "bench_zkb.csv"));
  });

  cdi::SimpleWaveBenchConfig sw_cfg;
  sw_cfg.project = false;
  bool sw_project = false;
  std::string sw_grid;
  std::vector<double> sw_domain, sw_window;
  auto* sw = bench->add_subcommand("simplewave", "Expansion-fan interpolation study");
  sw->add_option("--t0", sw_cfg.t0, "First snapshot time")->capture_default_str();
  sw->add_option("--t1", sw_cfg.t1, "Second snapshot time")->capture_default_str();
  sw->add_option("--threshold", sw_cfg.threshold, "Velocity-gradient threshold")
      ->capture_default_str();
  sw->add_option("--grid", sw_grid, "Snapshot grid size");
  sw->add_option("--domain", sw_domain, "Snapshot domain LO,HI")->delimiter(',')->expected(2);
  sw->add_option("--window", sw_window, "Error window LO,HI")->delimiter(',')->expected(2);
  sw->add_option("--alpha", sw_cfg.alphas, "Interpolation fractions")->delimiter(',');
  sw->add_flag("--project-s", sw_project, "Project each target onto the interpolant family");
  sw->callback([&] {
    if (!sw_grid.empty()) sw_cfg.grid_n = parse_grid(sw_grid).n1;
    if (!sw_domain.empty()) {
      sw_cfg.grid_lo = sw_domain[0];
      sw_cfg.grid_hi = sw_domain[1];
    }
    if (!sw_window.empty()) {
      sw_cfg.window_lo = sw_window[0];
      sw_cfg.window_hi = sw_window[1];
    }
    sw_cfg.project = sw_project;
    const cdi::BenchTable t = cdi::bench_simplewave(sw_cfg);
    cdi::write_csv(t, out_file(out_dir, "bench_simplewave.csv"));
  });

  cdi::SodBenchConfig sod_cfg;
  std::string sod_grid;
  std::vector<double> sod_domain;
  auto* sod = bench->add_subcommand("sod", "Shock-tube self-similar transport study");
  sod->add_option("--t0", sod_cfg.t0, "First snapshot time")->capture_default_str();
  sod->add_option("--t1", sod_cfg.t1, "Second snapshot time")->capture_default_str();
  sod->add_option("--grid", sod_grid, "Number of sample points");
  sod->add_option("--domain", sod_domain, "Sample domain LO,HI")->delimiter(',')->expected(2);
  sod->callback([&] {
    if (!sod_grid.empty()) sod_cfg.grid_n = parse_grid(sod_grid).n1;
    if (!sod_domain.empty()) {
      sod_cfg.x_lo = sod_domain[0];
      sod_cfg.x_hi = sod_domain[1];
    }
    if (!(sod_cfg.t1 > sod_cfg.t0)) throw cdi::InvalidTime("bench sod: --t1 must exceed --t0");
    const cdi::BenchTable t = cdi::bench_sod(sod_cfg);
    cdi::write_csv(t, out_file(out_dir, "bench_sod.csv"));
  });

  cdi::WedgeBenchConfig wedge_cfg;
  wedge_cfg.project = false;
  bool wedge_project = false;
  std::string wedge_mode = "extension", wedge_grid;
  auto* wedge = bench->add_subcommand("wedge", "Supersonic wedge interpolation study");
  wedge->add_option("--mode", wedge_mode, "extension or registration")->capture_default_str();
  wedge->add_option("--m0", wedge_cfg.mach0, "First upstream Mach number")
      ->capture_default_str();
  wedge->add_option("--delta0", wedge_cfg.delta0_deg, "First wedge angle (degrees)")
      ->capture_default_str();
  wedge->add_option("--m1", wedge_cfg.mach1, "Second upstream Mach number")
      ->capture_default_str();
  wedge->add_option("--delta1", wedge_cfg.delta1_deg, "Second wedge angle (degrees)")
      ->capture_default_str();
  wedge->add_option("--grid", wedge_grid, "Snapshot grid N1xN2");
  wedge->add_option("--alpha", wedge_cfg.alphas, "Interpolation fractions")->delimiter(',');
  wedge->add_flag("--project-s", wedge_project, "Project each target onto the family");
  wedge->callback([&] {
    if (wedge_mode == "extension")
      wedge_cfg.mode = cdi::WedgeMode::Extension;
    else if (wedge_mode == "registration")
      wedge_cfg.mode = cdi::WedgeMode::Registration;
    else
      throw cdi::InvalidParameter("bench wedge: --mode must be extension or registration");
    if (!wedge_grid.empty()) {
      const GridSpec g = parse_grid(wedge_grid);
      wedge_cfg.n1 = g.n1;
      wedge_cfg.n2 = g.n2 > 1 ? g.n2 : g.n1;
    }
    wedge_cfg.project = wedge_project;
    const cdi::BenchTable t = cdi::bench_wedge(wedge_cfg);
    cdi::write_csv(t, out_file(out_dir, "bench_wedge_" + wedge_mode + ".csv"));
  });

  // ---- interp ----
  std::string interp_snap0, interp_snap1, interp_detector = "threshold-gradient";
  std::vector<double> interp_s = {0.5};
  double interp_threshold = 1.0, interp_top_fraction = 0.005;
  int interp_component = 0;
  auto* interp = app.add_subcommand("interp", "Interpolate between two snapshot files");
  interp->add_option("snap0", interp_snap0, "First snapshot")->required();
  interp->add_option("snap1", interp_snap1, "Second snapshot")->required();
  interp->add_option("--s", interp_s, "Interpolation parameters")->delimiter(',');
  interp->add_option("--detector", interp_detector,
                     "threshold-gradient or ducros-top-fraction")
      ->capture_default_str();
  interp->add_option("--threshold", interp_threshold, "Gradient threshold")
      ->capture_default_str();
  interp->add_option("--top-fraction", interp_top_fraction, "Indicator top fraction")
      ->capture_default_str();
  interp->add_option("--component", interp_component, "Component fed to the detector")
      ->capture_default_str();
  interp->callback([&] {
    cdi::InterpConfig cfg;
    cfg.detector =
        make_detector(interp_detector, interp_threshold, interp_top_fraction, interp_component);
    cfg.s_values = interp_s;
    for (double s : cfg.s_values)
      if (!(s >= 0.0 && s <= 1.0))
        throw cdi::InvalidParameter("interp: every s must lie in [0,1]");
    const cdi::StructuredField u0 = cdi::load_snapshot(interp_snap0);
    const cdi::StructuredField u1 = cdi::load_snapshot(interp_snap1);
    cdi::InterpResult result;
    try {
      result = cdi::run_interp(u0, u1, cfg);
    } catch (const cdi::EmptySelection& e) {
      std::cerr << "detector marked no points: " << e.what() << "\n"
                << "hint: lower --threshold or raise --top-fraction\n";
      throw;
    }
    json j;
    j["s_values"] = cfg.s_values;
    j["gaussian0"] = to_json(result.g0);
    j["gaussian1"] = to_json(result.g1);
    j["w2"] = result.w2;
    j["map01"] = to_json(result.map01);
    j["map10"] = to_json(result.map10);
    json files = json::array();
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "interp_%03zu.snap", i);
      cdi::save_snapshot(result.snapshots[i], out_file(out_dir, name));
      files.push_back(name);
    }
    j["snapshots"] = files;
    write_json(j, out_file(out_dir, "interp.json"));
  });

  // ---- register ----
  std::string reg_snap0, reg_snap1, reg_detector = "threshold-gradient";
  std::string reg_clusters = "none";
  std::vector<double> reg_s = {0.25, 0.5, 0.75};
  std::vector<double> reg_patch;
  double reg_threshold = 1.0, reg_top_fraction = 0.005, reg_lambda = -1.0, reg_delta_min = 0.1;
  int reg_component = 0, reg_degree = 4;
  auto* reg = app.add_subcommand("register",
                                 "Boundary-aware registration between two snapshot files");
  reg->add_option("snap0", reg_snap0, "First snapshot")->required();
  reg->add_option("snap1", reg_snap1, "Second snapshot")->required();
  reg->add_option("--s", reg_s, "Interpolation parameters")->delimiter(',');
  reg->add_option("--detector", reg_detector, "threshold-gradient or ducros-top-fraction")
      ->capture_default_str();
  reg->add_option("--threshold", reg_threshold, "Gradient threshold")->capture_default_str();
  reg->add_option("--top-fraction", reg_top_fraction, "Indicator top fraction")
      ->capture_default_str();
  reg->add_option("--component", reg_component, "Component fed to the detector")
      ->capture_default_str();
  reg->add_option("--clusters", reg_clusters, "none or sign-x2")->capture_default_str();
  reg->add_option("--degree", reg_degree, "Polynomial degree of the map space")
      ->capture_default_str();
  reg->add_option("--lambda", reg_lambda, "H2 penalty weight (negative = scale-aware default)")
      ->capture_default_str();
  reg->add_option("--delta-min", reg_delta_min, "Jacobian determinant floor")
      ->capture_default_str();
  reg->add_option("--patch", reg_patch, "Patch rectangle x1lo,x1hi,x2lo,x2hi")
      ->delimiter(',')
      ->expected(4);
  reg->callback([&] {
    cdi::RegisterConfig cfg;
    cfg.detector = make_detector(reg_detector, reg_threshold, reg_top_fraction, reg_component);
    cfg.s_values = reg_s;
    cfg.degree = reg_degree;
    cfg.lambda = reg_lambda;
    cfg.delta_min = reg_delta_min;
    if (reg_clusters == "none")
      cfg.clusters = cdi::ClusterRule::None;
    else if (reg_clusters == "sign-x2")
      cfg.clusters = cdi::ClusterRule::SignX2;
    else
      throw cdi::InvalidParameter("register: --clusters must be none or sign-x2");
    if (!reg_patch.empty()) {
      cfg.has_patch = true;
      cfg.patch_x1lo = reg_patch[0];
      cfg.patch_x1hi = reg_patch[1];
      cfg.patch_x2lo = reg_patch[2];
      cfg.patch_x2hi = reg_patch[3];
    }
    for (double s : cfg.s_values)
      if (!(s >= 0.0 && s <= 1.0))
        throw cdi::InvalidParameter("register: every s must lie in [0,1]");

    const cdi::StructuredField u0 = cdi::load_snapshot(reg_snap0);
    const cdi::StructuredField u1 = cdi::load_snapshot(reg_snap1);
    const cdi::RegisterResult result = cdi::run_register(u0, u1, cfg);

    cdi::save_markers(result.markers01, out_file(out_dir, "markers_01.txt"));
    cdi::save_markers(result.markers10, out_file(out_dir, "markers_10.txt"));

    json j;
    j["s_values"] = cfg.s_values;
    json m0 = json::array(), m1 = json::array();
    for (const auto& g : result.models0) m0.push_back(to_json(g));
    for (const auto& g : result.models1) m1.push_back(to_json(g));
    j["models0"] = m0;
    j["models1"] = m1;
    j["permutation"] = result.permutation;
    j["fit01"] = fit_summary(result.r01);
    j["fit10"] = fit_summary(result.r10);
    if (result.r01.stagnation_warning || result.r10.stagnation_warning)
      std::cerr << "warning: optimizer stagnated before reaching the gradient tolerance;"
                << " best feasible coefficients returned\n";
    if (!result.r01.certified || !result.r10.certified)
      std::cerr << "warning: bijectivity certificate below the requested floor for some s\n";
    json files = json::array();
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "ba_cdi_%03zu.snap", i);
      cdi::save_snapshot(result.snapshots[i], out_file(out_dir, name));
      files.push_back(name);
    }
    j["snapshots"] = files;
    write_json(j, out_file(out_dir, "register.json"));
  });

  // ---- fit-gaussian ----
  std::string fit_snap, fit_detector = "threshold-gradient";
  double fit_threshold = 1.0, fit_top_fraction = 0.005;
  int fit_component = 0;
  auto* fit = app.add_subcommand("fit-gaussian", "Detect a structure and print its Gaussian model");
  fit->add_option("snap", fit_snap, "Snapshot file")->required();
  fit->add_option("--detector", fit_detector, "threshold-gradient or ducros-top-fraction")
      ->capture_default_str();
  fit->add_option("--threshold", fit_threshold, "Gradient threshold")->capture_default_str();
  fit->add_option("--top-fraction", fit_top_fraction, "Indicator top fraction")
      ->capture_default_str();
  fit->add_option("--component", fit_component, "Component fed to the detector")
      ->capture_default_str();
  fit->callback([&] {
    const cdi::DetectorConfig det =
        make_detector(fit_detector, fit_threshold, fit_top_fraction, fit_component);
    const cdi::StructuredField u = cdi::load_snapshot(fit_snap);
    const cdi::PointCloud cloud = cdi::detect_structure(u, det);
    const cdi::Gaussian g = cdi::mle_fit(cloud);
    json j;
    j["detector"] = fit_detector;
    j["n_points"] = cloud.size();
    j["model"] = to_json(g);
    std::cout << j.dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const cdi::InvalidTime& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cdi::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cdi::InvalidFraction& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cdi::FormatError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cdi::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
