#ifndef CDI_PIPELINE_HPP
#define CDI_PIPELINE_HPP

#include <string>
#include <vector>

#include "cdi/benchmarks.hpp"
#include "cdi/detection.hpp"
#include "cdi/interpolation.hpp"
#include "cdi/registration.hpp"

namespace cdi {

// ---------------------------------------------------------------------------
// Detection front end shared by the pipelines.

enum class DetectorKind { ThresholdGradient, DucrosTopFraction };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::ThresholdGradient;
  int component = 0;        // field component fed to the criterion
  double threshold = 1.0;   // gradient threshold (ThresholdGradient)
  double top_fraction = 0.005;
  double ducros_eps = 1e-4;
};

PointCloud detect_structure(const StructuredField& f, const DetectorConfig& cfg);
// Detection restricted to a node mask (empty mask = all nodes).
PointCloud detect_structure(const StructuredField& f, const DetectorConfig& cfg,
                            const std::vector<std::uint8_t>& mask);

// ---------------------------------------------------------------------------
// Result tables and CSV emission.

struct BenchTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const BenchTable& table);
void write_csv(const BenchTable& table, const std::string& path);

// ---------------------------------------------------------------------------
// Benchmark studies.

struct HeatBenchConfig {
  int n = 1;                  // spatial dimension (1 or 2)
  double t0 = 0.1, t1 = 0.4;  // snapshot times
  int n_times = 5;            // interior evaluation times
  int grid_1d = 2001;
  int grid_2d = 201;
};
BenchTable bench_heat(const HeatBenchConfig& cfg);

struct ZkbBenchConfig {
  int n = 1;
  int m = 2;
  double C = 1.0;
  double t0 = 1.0, t1 = 2.0;
  int n_times = 5;
  int grid_1d = 2001;
  int grid_2d = 201;
};
BenchTable bench_zkb(const ZkbBenchConfig& cfg);

struct SimpleWaveBenchConfig {
  double t0 = 0.05, t1 = 0.4;
  double threshold = 1e-4;
  double grid_lo = -4.0, grid_hi = 10.0;
  int grid_n = 1401;
  double window_lo = -2.0, window_hi = 8.0;
  int window_n = 1001;
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  bool project = true;  // project onto the interpolant family; s = alpha otherwise
};
BenchTable bench_simplewave(const SimpleWaveBenchConfig& cfg);

struct SodBenchConfig {
  RiemannState state = sod_state();
  double t0 = 0.1, t1 = 0.3;
  double x_lo = -0.75, x_hi = 0.75;
  int grid_n = 1501;
};
BenchTable bench_sod(const SodBenchConfig& cfg);

enum class WedgeMode { Extension, Registration };

struct WedgeBenchConfig {
  WedgeMode mode = WedgeMode::Extension;
  double mach0 = 5.0, delta0_deg = 28.275;
  double mach1 = 8.0, delta1_deg = 22.80;
  double gamma = 1.4;
  int n1 = 151, n2 = 101;  // grid on (-0.5,1) x (0,1)
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  bool project = true;
};
BenchTable bench_wedge(const WedgeBenchConfig& cfg);

// Wedge snapshots on the reference rectangle. Extension: the trivially
// extended Mach field. Registration: the field pulled back by the geometry
// map phi onto the mean-angle domain.
StructuredField wedge_snapshot(double mach, double delta_rad, double gamma, int n1, int n2);
StructuredField wedge_snapshot_mapped(double mach, double delta_rad, double delta_bar_rad,
                                      double gamma, int n1, int n2);
// Mask of nodes inside the flow domain of the given wedge angle.
std::vector<std::uint8_t> wedge_flow_mask(double delta_rad, int n1, int n2);

// ---------------------------------------------------------------------------
// Generic snapshot interpolation pipeline (detect -> fit -> map -> blend).

struct InterpConfig {
  DetectorConfig detector;
  std::vector<double> s_values = {0.5};
};

struct InterpResult {
  Gaussian g0, g1;
  double w2 = 0;
  AffineTransportMap map01, map10;
  std::vector<StructuredField> snapshots;  // one per s, on the first grid
};

InterpResult run_interp(const StructuredField& u0, const StructuredField& u1,
                        const InterpConfig& cfg);

// ---------------------------------------------------------------------------
// Boundary-aware registration pipeline.

enum class ClusterRule { None, SignX2 };

struct RegisterConfig {
  DetectorConfig detector;
  ClusterRule clusters = ClusterRule::None;
  int degree = 4;
  double lambda = -1.0;
  double delta_min = 0.1;
  std::vector<double> s_values = {0.25, 0.5, 0.75};
  bool has_patch = false;  // default patch: the snapshot bounds
  double patch_x1lo = 0, patch_x1hi = 1, patch_x2lo = 0, patch_x2hi = 1;
};

struct RegisterResult {
  std::vector<Gaussian> models0, models1;
  std::vector<int> permutation;
  std::vector<Marker> markers01, markers10;
  RegistrationMap r01, r10;
  Gaussian merged0, merged1;  // single-structure models for the outside-patch fallback
  std::vector<StructuredField> snapshots;
};

RegisterResult run_register(const StructuredField& u0, const StructuredField& u1,
                            const RegisterConfig& cfg);

// Marker file I/O. Text format:
//   # cdi-markers v1
//   <rows: y1 y2 t1 t2 cluster>
void save_markers(const std::vector<Marker>& markers, const std::string& path);
std::vector<Marker> load_markers(const std::string& path);

}  // namespace cdi

#endif
