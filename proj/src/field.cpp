#include "cdi/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdi {

FieldFunction scalar_field_1d(std::function<double(double)> f) {
  return FieldFunction{[f = std::move(f)](const Vec& x) { return Vec{f(x[0])}; }, 1, 1};
}

FieldFunction scalar_field_2d(std::function<double(double, double)> f) {
  return FieldFunction{[f = std::move(f)](const Vec& x) { return Vec{f(x[0], x[1])}; }, 2, 1};
}

StructuredField::StructuredField(double x1lo, double x1hi, int n1, std::vector<double> values,
                                 int components, Extension ext)
    : x1lo_(x1lo), x1hi_(x1hi), x2lo_(0.0), x2hi_(1.0), n1_(n1), n2_(1), d_(components),
      values_(std::move(values)), ext_(ext) {
  validate();
}

StructuredField::StructuredField(double x1lo, double x1hi, double x2lo, double x2hi, int n1,
                                 int n2, std::vector<double> values, int components,
                                 Extension ext)
    : x1lo_(x1lo), x1hi_(x1hi), x2lo_(x2lo), x2hi_(x2hi), n1_(n1), n2_(n2), d_(components),
      values_(std::move(values)), ext_(ext) {
  validate();
}

void StructuredField::validate() const {
  if (d_ < 1 || d_ > 6) throw InvalidField("StructuredField: components must be in [1,6]");
  if (n1_ < 2) throw InvalidField("StructuredField: need at least 2 nodes along x1");
  if (n2_ < 1) throw InvalidField("StructuredField: invalid node count along x2");
  if (!(x1hi_ > x1lo_)) throw InvalidField("StructuredField: x1 bounds not increasing");
  if (n2_ > 1 && !(x2hi_ > x2lo_)) throw InvalidField("StructuredField: x2 bounds not increasing");
  if (values_.size() != node_count() * d_)
    throw InvalidField("StructuredField: value array size does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidField("StructuredField: non-finite value");
}

StructuredField StructuredField::sample_function(const FieldFunction& f, double x1lo,
                                                 double x1hi, int n1, Extension ext) {
  std::vector<double> vals(static_cast<std::size_t>(n1) * f.components);
  for (int i = 0; i < n1; ++i) {
    const double x = x1lo + (x1hi - x1lo) * i / (n1 - 1);
    const Vec v = f.evaluator(Vec{x});
    for (int c = 0; c < f.components; ++c) vals[static_cast<std::size_t>(i) * f.components + c] = v[c];
  }
  return StructuredField(x1lo, x1hi, n1, std::move(vals), f.components, ext);
}

StructuredField StructuredField::sample_function(const FieldFunction& f, double x1lo,
                                                 double x1hi, double x2lo, double x2hi, int n1,
                                                 int n2, Extension ext) {
  std::vector<double> vals(static_cast<std::size_t>(n1) * n2 * f.components);
  std::size_t k = 0;
  for (int i = 0; i < n1; ++i) {
    const double x1 = x1lo + (x1hi - x1lo) * i / (n1 - 1);
    for (int j = 0; j < n2; ++j) {
      const double x2 = x2lo + (x2hi - x2lo) * j / (n2 - 1);
      const Vec v = f.evaluator(Vec{x1, x2});
      for (int c = 0; c < f.components; ++c) vals[k++] = v[c];
    }
  }
  return StructuredField(x1lo, x1hi, x2lo, x2hi, n1, n2, std::move(vals), f.components, ext);
}

Vec StructuredField::node_coords(int i1, int i2) const {
  if (dim() == 1) return Vec{x1lo_ + spacing1() * i1};
  return Vec{x1lo_ + spacing1() * i1, x2lo_ + spacing2() * i2};
}

void StructuredField::set_extension_callback(FieldFunction cb) {
  callback_ = std::move(cb);
  ext_ = Extension::AnalyticCallback;
}

namespace {

// Index and barycentric coordinate along one axis, clamped to the grid.
struct AxisLoc {
  int i;
  double frac;
  bool outside;
};

AxisLoc locate(double x, double lo, double hi, int n) {
  AxisLoc loc{0, 0.0, false};
  if (x < lo) {
    loc.outside = true;
    return loc;
  }
  if (x > hi) {
    loc.i = n - 2;
    loc.frac = 1.0;
    loc.outside = true;
    return loc;
  }
  const double h = (hi - lo) / (n - 1);
  int i = static_cast<int>((x - lo) / h);
  if (i > n - 2) i = n - 2;
  double frac = (x - lo - i * h) / h;
  if (frac < 0.0) frac = 0.0;
  if (frac > 1.0) frac = 1.0;
  loc.i = i;
  loc.frac = frac;
  return loc;
}

}  // namespace

Vec StructuredField::sample(const Vec& x) const {
  if (x.size() != dim()) throw DimensionError("StructuredField::sample: dimension mismatch");
  if (!x.finite()) throw InvalidField("StructuredField::sample: non-finite point");

  const bool outside1 = x[0] < x1lo_ || x[0] > x1hi_;
  const bool outside2 = dim() == 2 && (x[1] < x2lo_ || x[1] > x2hi_);
  if (outside1 || outside2) {
    switch (ext_) {
      case Extension::Error:
        throw OutOfDomain("StructuredField::sample: point outside bounds");
      case Extension::AnalyticCallback:
        if (!callback_.evaluator)
          throw InvalidField("StructuredField::sample: extension callback not set");
        return callback_.evaluator(x);
      case Extension::ConstantNearest:
        break;  // clamped by locate()
    }
  }

  const AxisLoc l1 = locate(x[0], x1lo_, x1hi_, n1_);
  Vec out(d_);
  if (dim() == 1) {
    for (int c = 0; c < d_; ++c)
      out[c] = (1.0 - l1.frac) * value(l1.i, 0, c) + l1.frac * value(l1.i + 1, 0, c);
    return out;
  }
  const AxisLoc l2 = locate(x[1], x2lo_, x2hi_, n2_);
  const double w00 = (1.0 - l1.frac) * (1.0 - l2.frac);
  const double w01 = (1.0 - l1.frac) * l2.frac;
  const double w10 = l1.frac * (1.0 - l2.frac);
  const double w11 = l1.frac * l2.frac;
  for (int c = 0; c < d_; ++c)
    out[c] = w00 * value(l1.i, l2.i, c) + w01 * value(l1.i, l2.i + 1, c) +
             w10 * value(l1.i + 1, l2.i, c) + w11 * value(l1.i + 1, l2.i + 1, c);
  return out;
}

double StructuredField::sample_scalar(const Vec& x, int c) const { return sample(x)[c]; }

Field::Field(StructuredField f)
    : grid_(std::make_shared<const StructuredField>(std::move(f))) {
  dim_ = grid_->dim();
  components_ = grid_->components();
}

Field::Field(std::shared_ptr<const StructuredField> f) : grid_(std::move(f)) {
  dim_ = grid_->dim();
  components_ = grid_->components();
}

Field::Field(FieldFunction f) : fn_(std::move(f)), dim_(fn_.dim), components_(fn_.components) {}

Vec Field::operator()(const Vec& x) const {
  if (grid_) return grid_->sample(x);
  if (!fn_.evaluator) throw InvalidField("Field: empty field");
  return fn_.evaluator(x);
}

StructuredField gradient_fd(const StructuredField& f, int component) {
  if (component < 0 || component >= f.components())
    throw DimensionError("gradient_fd: component out of range");
  if (f.n1() < 3 || (f.dim() == 2 && f.n2() < 3))
    throw GridTooCoarse("gradient_fd: need at least 3 nodes per active axis");

  const int dim = f.dim();
  std::vector<double> vals(f.node_count() * dim);
  const double h1 = f.spacing1();
  const double h2 = f.spacing2();
  std::size_t k = 0;
  for (int i = 0; i < f.n1(); ++i) {
    for (int j = 0; j < f.n2(); ++j) {
      double d1;
      if (i == 0)
        d1 = (f.value(1, j, component) - f.value(0, j, component)) / h1;
      else if (i == f.n1() - 1)
        d1 = (f.value(i, j, component) - f.value(i - 1, j, component)) / h1;
      else
        d1 = (f.value(i + 1, j, component) - f.value(i - 1, j, component)) / (2.0 * h1);
      vals[k++] = d1;
      if (dim == 2) {
        double d2;
        if (j == 0)
          d2 = (f.value(i, 1, component) - f.value(i, 0, component)) / h2;
        else if (j == f.n2() - 1)
          d2 = (f.value(i, j, component) - f.value(i, j - 1, component)) / h2;
        else
          d2 = (f.value(i, j + 1, component) - f.value(i, j - 1, component)) / (2.0 * h2);
        vals[k++] = d2;
      }
    }
  }
  if (dim == 1)
    return StructuredField(f.x1lo(), f.x1hi(), f.n1(), std::move(vals), 1, f.extension());
  return StructuredField(f.x1lo(), f.x1hi(), f.x2lo(), f.x2hi(), f.n1(), f.n2(),
                         std::move(vals), 2, f.extension());
}

EvalDomain EvalDomain::from_field(const StructuredField& f) {
  EvalDomain d;
  d.x1lo = f.x1lo();
  d.x1hi = f.x1hi();
  d.x2lo = f.x2lo();
  d.x2hi = f.x2hi();
  d.n1 = f.n1();
  d.n2 = f.n2();
  return d;
}

EvalDomain EvalDomain::line(double lo, double hi, int n) {
  EvalDomain d;
  d.x1lo = lo;
  d.x1hi = hi;
  d.n1 = n;
  d.n2 = 1;
  return d;
}

EvalDomain EvalDomain::box(double x1lo, double x1hi, double x2lo, double x2hi, int n1, int n2) {
  EvalDomain d;
  d.x1lo = x1lo;
  d.x1hi = x1hi;
  d.x2lo = x2lo;
  d.x2hi = x2hi;
  d.n1 = n1;
  d.n2 = n2;
  return d;
}

Vec EvalDomain::node(int i1, int i2) const {
  if (dim() == 1) return Vec{x1lo + (x1hi - x1lo) * i1 / (n1 - 1)};
  return Vec{x1lo + (x1hi - x1lo) * i1 / (n1 - 1), x2lo + (x2hi - x2lo) * i2 / (n2 - 1)};
}

double EvalDomain::weight(int i1, int i2) const {
  if (!mask.empty() && mask[static_cast<std::size_t>(i1) * n2 + i2] == 0) return 0.0;
  const double h1 = (x1hi - x1lo) / (n1 - 1);
  double w = (i1 == 0 || i1 == n1 - 1) ? 0.5 * h1 : h1;
  if (dim() == 2) {
    const double h2 = (x2hi - x2lo) / (n2 - 1);
    w *= (i2 == 0 || i2 == n2 - 1) ? 0.5 * h2 : h2;
  }
  return w;
}

namespace {

void require_compatible(const Field& f, const Field& g) {
  if (f.components() != g.components())
    throw DimensionError("l2_error: fields have different component counts");
}

}  // namespace

L2Result l2_error(const Field& f, const Field& g, const EvalDomain& dom) {
  require_compatible(f, g);
  double num = 0, den = 0;
  for (int i1 = 0; i1 < dom.n1; ++i1)
    for (int i2 = 0; i2 < dom.n2; ++i2) {
      const double w = dom.weight(i1, i2);
      if (w == 0.0) continue;
      const Vec x = dom.node(i1, i2);
      const Vec fv = f(x);
      const Vec gv = g(x);
      double d2 = 0, g2 = 0;
      for (int c = 0; c < f.components(); ++c) {
        const double d = fv[c] - gv[c];
        d2 += d * d;
        g2 += gv[c] * gv[c];
      }
      num += w * d2;
      den += w * g2;
    }
  L2Result r;
  r.absolute = std::sqrt(num);
  if (den == 0.0) {
    if (num == 0.0) {
      r.relative = 0.0;
    } else {
      throw ZeroReference("l2_error: reference field has zero L2 norm");
    }
  } else {
    r.relative = r.absolute / std::sqrt(den);
  }
  return r;
}

double l2_norm(const Field& f, const EvalDomain& dom) {
  double acc = 0;
  for (int i1 = 0; i1 < dom.n1; ++i1)
    for (int i2 = 0; i2 < dom.n2; ++i2) {
      const double w = dom.weight(i1, i2);
      if (w == 0.0) continue;
      const Vec fv = f(dom.node(i1, i2));
      double s = 0;
      for (int c = 0; c < f.components(); ++c) s += fv[c] * fv[c];
      acc += w * s;
    }
  return std::sqrt(acc);
}

StructuredField load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_snapshot: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# cdi-snapshot v1")
    throw FormatError("load_snapshot: bad magic at line 1 in " + path);
  if (!std::getline(in, line))
    throw FormatError("load_snapshot: missing header at line 2 in " + path);
  std::istringstream hdr(line);
  int n1, n2, d;
  double x1lo, x1hi, x2lo, x2hi;
  if (!(hdr >> n1 >> n2 >> d >> x1lo >> x1hi >> x2lo >> x2hi))
    throw FormatError("load_snapshot: malformed header at line 2 in " + path);
  if (n1 < 2 || n2 < 1 || d < 1)
    throw FormatError("load_snapshot: invalid grid shape at line 2 in " + path);
  std::vector<double> vals(static_cast<std::size_t>(n1) * n2 * d);
  std::size_t k = 0;
  for (std::size_t row = 0; row < static_cast<std::size_t>(n1) * n2; ++row) {
    if (!std::getline(in, line))
      throw FormatError("load_snapshot: truncated file at line " + std::to_string(row + 3) +
                        " in " + path);
    std::istringstream ls(line);
    for (int c = 0; c < d; ++c) {
      if (!(ls >> vals[k]))
        throw FormatError("load_snapshot: malformed row at line " + std::to_string(row + 3) +
                          " in " + path);
      ++k;
    }
  }
  if (n2 == 1) return StructuredField(x1lo, x1hi, n1, std::move(vals), d);
  return StructuredField(x1lo, x1hi, x2lo, x2hi, n1, n2, std::move(vals), d);
}

void save_snapshot(const StructuredField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("save_snapshot: cannot open " + path);
  char buf[64];
  out << "# cdi-snapshot v1\n";
  out << f.n1() << ' ' << f.n2() << ' ' << f.components();
  for (double b : {f.x1lo(), f.x1hi(), f.x2lo(), f.x2hi()}) {
    std::snprintf(buf, sizeof buf, " %.17g", b);
    out << buf;
  }
  out << '\n';
  for (int i = 0; i < f.n1(); ++i)
    for (int j = 0; j < f.n2(); ++j) {
      for (int c = 0; c < f.components(); ++c) {
        std::snprintf(buf, sizeof buf, c == 0 ? "%.17g" : " %.17g", f.value(i, j, c));
        out << buf;
      }
      out << '\n';
    }
  if (!out) throw FormatError("save_snapshot: write failure for " + path);
}

}  // namespace cdi
