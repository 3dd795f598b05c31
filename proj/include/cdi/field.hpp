#ifndef CDI_FIELD_HPP
#define CDI_FIELD_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cdi/linalg.hpp"

namespace cdi {

// Analytic d-component field evaluator.
struct FieldFunction {
  std::function<Vec(const Vec&)> evaluator;
  int dim = 1;
  int components = 1;
};

FieldFunction scalar_field_1d(std::function<double(double)> f);
FieldFunction scalar_field_2d(std::function<double(double, double)> f);

enum class Extension {
  ConstantNearest,   // clamp to the nearest boundary value
  AnalyticCallback,  // delegate to a user callback outside the bounds
  Error,             // throw OutOfDomain
};

// d-component field values on a rectilinear grid, bilinearly interpolated.
// Nodes are stored row-major with the x2 index fastest. Immutable after
// construction.
class StructuredField {
public:
  StructuredField(double x1lo, double x1hi, int n1, std::vector<double> values,
                  int components = 1, Extension ext = Extension::ConstantNearest);
  StructuredField(double x1lo, double x1hi, double x2lo, double x2hi, int n1, int n2,
                  std::vector<double> values, int components = 1,
                  Extension ext = Extension::ConstantNearest);

  // Samples an analytic field on a fresh grid.
  static StructuredField sample_function(const FieldFunction& f, double x1lo, double x1hi,
                                         int n1, Extension ext = Extension::ConstantNearest);
  static StructuredField sample_function(const FieldFunction& f, double x1lo, double x1hi,
                                         double x2lo, double x2hi, int n1, int n2,
                                         Extension ext = Extension::ConstantNearest);

  int dim() const { return n2_ == 1 ? 1 : 2; }
  int components() const { return d_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double x1lo() const { return x1lo_; }
  double x1hi() const { return x1hi_; }
  double x2lo() const { return x2lo_; }
  double x2hi() const { return x2hi_; }
  double spacing1() const { return (x1hi_ - x1lo_) / (n1_ - 1); }
  double spacing2() const { return n2_ > 1 ? (x2hi_ - x2lo_) / (n2_ - 1) : 0.0; }

  std::size_t node_count() const { return static_cast<std::size_t>(n1_) * n2_; }
  Vec node_coords(int i1, int i2) const;
  double value(int i1, int i2, int c = 0) const {
    return values_[(static_cast<std::size_t>(i1) * n2_ + i2) * d_ + c];
  }
  const std::vector<double>& raw_values() const { return values_; }

  void set_extension(Extension ext) { ext_ = ext; }
  void set_extension_callback(FieldFunction cb);
  Extension extension() const { return ext_; }

  // Bilinear (linear in 1D) interpolation; outside the bounds the extension
  // policy applies.
  Vec sample(const Vec& x) const;
  double sample_scalar(const Vec& x, int c = 0) const;

private:
  void validate() const;
  double x1lo_, x1hi_, x2lo_, x2hi_;
  int n1_, n2_, d_;
  std::vector<double> values_;
  Extension ext_;
  FieldFunction callback_;
};

// Type-erased view over either representation; cheap to copy.
class Field {
public:
  Field() = default;
  Field(StructuredField f);
  Field(std::shared_ptr<const StructuredField> f);
  Field(FieldFunction f);

  Vec operator()(const Vec& x) const;
  double scalar(const Vec& x, int c = 0) const { return (*this)(x)[c]; }
  int dim() const { return dim_; }
  int components() const { return components_; }
  const StructuredField* structured() const { return grid_.get(); }

private:
  std::shared_ptr<const StructuredField> grid_;
  FieldFunction fn_;
  int dim_ = 0;
  int components_ = 0;
};

// One-component finite-difference gradient: central differences in the
// interior, first-order one-sided at the boundaries. The result has one
// component per active axis.
StructuredField gradient_fd(const StructuredField& f, int component = 0);

// Evaluation domain for norms and projections: a rectilinear quadrature
// grid (trapezoidal weights) with an optional node mask.
struct EvalDomain {
  double x1lo = 0, x1hi = 1, x2lo = 0, x2hi = 1;
  int n1 = 2, n2 = 1;  // n2 == 1 selects a 1D domain
  std::vector<std::uint8_t> mask;  // empty or n1*n2 entries; nonzero = active

  static EvalDomain from_field(const StructuredField& f);
  static EvalDomain line(double lo, double hi, int n);
  static EvalDomain box(double x1lo, double x1hi, double x2lo, double x2hi, int n1, int n2);

  int dim() const { return n2 == 1 ? 1 : 2; }
  std::size_t node_count() const { return static_cast<std::size_t>(n1) * n2; }
  Vec node(int i1, int i2) const;
  double weight(int i1, int i2) const;  // trapezoidal quadrature weight
};

struct L2Result {
  double absolute = 0;
  double relative = 0;
};

// Trapezoidal-rule L2 difference between two fields over a domain;
// relative error normalizes by ||g||_L2.
L2Result l2_error(const Field& f, const Field& g, const EvalDomain& dom);
double l2_norm(const Field& f, const EvalDomain& dom);

// Snapshot file I/O. Text format:
//   # cdi-snapshot v1
//   n1 n2 d x1lo x1hi x2lo x2hi
//   <n1*n2 rows of d values, row-major with x2 fastest, 17 significant digits>
StructuredField load_snapshot(const std::string& path);
void save_snapshot(const StructuredField& f, const std::string& path);

}  // namespace cdi

#endif
