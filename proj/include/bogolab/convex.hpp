#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bogolab/error.hpp"

namespace bogolab {

// Samples of a real function of one variable on a strictly ascending grid.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::vector<double> xs, std::vector<double> ys, std::string label = {})
      : xs_(std::move(xs)), ys_(std::move(ys)), label_(std::move(label)) {
    if (xs_.size() != ys_.size()) {
      throw PreconditionError("SampledFunction '" + label_ + "': grid and values differ in length");
    }
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i])) throw PreconditionError("SampledFunction '" + label_ + "': non-finite grid");
      if (i > 0 && !(xs_[i] > xs_[i - 1])) {
        throw PreconditionError("SampledFunction '" + label_ + "': grid is not strictly ascending");
      }
    }
  }

  template <class F>
  static SampledFunction tabulate(const std::vector<double>& xs, F&& f, std::string label = {}) {
    std::vector<double> ys;
    ys.reserve(xs.size());
    for (double x : xs) ys.push_back(f(x));
    return SampledFunction(xs, std::move(ys), std::move(label));
  }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return xs_.size(); }

  double min_spacing() const {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xs_.size(); ++i) h = std::min(h, xs_[i] - xs_[i - 1]);
    return h;
  }
  double max_spacing() const {
    double h = 0.0;
    for (std::size_t i = 1; i < xs_.size(); ++i) h = std::max(h, xs_[i] - xs_[i - 1]);
    return h;
  }
  double scale() const {
    double s = 0.0;
    for (double y : ys_) s = std::max(s, std::abs(y));
    return std::max(s, 1.0);
  }
  double slope(std::size_t i) const { return (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]); }

 private:
  std::vector<double> xs_, ys_;
  std::string label_;
};

// CSV with the header grid,value,label. Several labels may share one file.
inline void write_sampled_csv(const std::string& path, const std::vector<SampledFunction>& fs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "grid,value,label\n";
  char buf[64];
  for (const auto& f : fs) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,", f.xs()[i], f.ys()[i]);
      out << buf << f.label() << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Reads every label in a grid,value,label CSV, in order of first appearance.
inline std::vector<SampledFunction> read_sampled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("grid,value", 0) != 0) {
    throw IoError("'" + path + "' lacks the grid,value,label header");
  }
  std::vector<std::string> labels;
  std::vector<std::vector<double>> xs, ys;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, label;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    std::getline(row, label);
    auto it = std::find(labels.begin(), labels.end(), label);
    std::size_t k = static_cast<std::size_t>(it - labels.begin());
    if (it == labels.end()) {
      labels.push_back(label);
      xs.emplace_back();
      ys.emplace_back();
    }
    try {
      xs[k].push_back(std::stod(a));
      ys[k].push_back(std::stod(b));
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": non-numeric value");
    }
  }
  std::vector<SampledFunction> out;
  for (std::size_t k = 0; k < labels.size(); ++k) out.emplace_back(xs[k], ys[k], labels[k]);
  return out;
}

struct DerivativeEstimate {
  double left = 0.0;
  double right = 0.0;
  double step = 0.0;
  double error_estimate = 0.0;
  bool kink = false;  // right - left > 10 * error_estimate

  double central() const { return 0.5 * (left + right); }
};

// Secant slopes of the last grid interval ending at or before x and the first
// one starting at or after x. The error estimate is the slope change across
// the neighbouring intervals on each side.
inline DerivativeEstimate one_sided_derivative(const SampledFunction& f, double x) {
  const auto& xs = f.xs();
  if (xs.size() < 3 || !(x >= xs[1] && x <= xs[xs.size() - 2])) {
    throw PreconditionError("one_sided_derivative: x = " + std::to_string(x) + " is not interior to the grid of '" +
                            f.label() + "'");
  }
  // i: last node <= x; j: first node >= x.
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
  const std::size_t j = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  DerivativeEstimate d;
  d.left = f.slope(i - 1);
  d.right = f.slope(j);
  d.step = std::max(xs[i] - xs[i - 1], xs[j + 1] - xs[j]);
  double err = 0.0;
  if (i >= 2) err = std::max(err, std::abs(d.left - f.slope(i - 2)));
  if (j + 2 < xs.size()) err = std::max(err, std::abs(f.slope(j + 1) - d.right));
  d.error_estimate = err;
  d.kink = d.right - d.left > 10.0 * err;
  return d;
}

struct GriffithsReport {
  double x = 0.0;
  double f_prime_left = 0.0;
  double f_prime_right = 0.0;
  std::vector<DerivativeEstimate> sequence;  // one per family member, in family order
  std::vector<std::string> labels;
  double liminf_proxy = 0.0;  // min of left slopes over the tail
  double limsup_proxy = 0.0;  // max of right slopes over the tail
  std::size_t tail = 0;
  double tolerance = 0.0;
  bool pass = false;
};

// Tail proxies use the last min(3, count) members. With tol < 0 the tolerance
// defaults to the limit's secant error estimate plus 1e-9.
inline GriffithsReport griffiths_check(const std::vector<SampledFunction>& family, const SampledFunction& f,
                                       double x, double tol = -1.0) {
  if (family.size() < 3) throw PreconditionError("griffiths_check needs at least 3 family members");
  for (const auto& g : family) {
    if (g.xs() != f.xs()) {
      throw PreconditionError("griffiths_check: member '" + g.label() + "' is not on the grid of '" + f.label() + "'");
    }
  }
  GriffithsReport r;
  r.x = x;
  const DerivativeEstimate df = one_sided_derivative(f, x);
  r.f_prime_left = df.left;
  r.f_prime_right = df.right;
  for (const auto& g : family) {
    r.sequence.push_back(one_sided_derivative(g, x));
    r.labels.push_back(g.label());
  }
  r.tail = std::min<std::size_t>(3, family.size());
  r.liminf_proxy = std::numeric_limits<double>::infinity();
  r.limsup_proxy = -std::numeric_limits<double>::infinity();
  for (std::size_t k = family.size() - r.tail; k < family.size(); ++k) {
    r.liminf_proxy = std::min(r.liminf_proxy, r.sequence[k].left);
    r.limsup_proxy = std::max(r.limsup_proxy, r.sequence[k].right);
  }
  r.tolerance = tol >= 0.0 ? tol : df.error_estimate + 1e-9;
  r.pass = r.f_prime_left - r.tolerance <= r.liminf_proxy && r.liminf_proxy <= r.limsup_proxy &&
           r.limsup_proxy <= r.f_prime_right + r.tolerance;
  return r;
}

enum class Parity { Even, None };

struct ConvexityViolation {
  std::size_t i = 0;  // middle index of the triple (i-1, i, i+1)
  double second_difference = 0.0;
};

struct ConvexityReport {
  double scale = 1.0;
  double min_second_difference = std::numeric_limits<double>::infinity();
  std::vector<ConvexityViolation> violations;
  bool convex = false;
  bool parity_checked = false;
  std::size_t mirrored_pairs = 0;
  double max_parity_defect = 0.0;
  bool even = true;
  bool pass = false;
};

// Second difference at node i: the chord through i-1 and i+1 minus f(i). It is
// half the usual three-point stencil on a uniform grid and >= 0 when convex.
inline ConvexityReport convexity_and_parity_audit(const SampledFunction& f, Parity parity,
                                                  double convex_tol = 1e-9, double parity_tol = 1e-10) {
  ConvexityReport r;
  r.scale = f.scale();
  const auto& xs = f.xs();
  const auto& ys = f.ys();
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double w = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
    const double chord = (1.0 - w) * ys[i - 1] + w * ys[i + 1];
    const double d2 = chord - ys[i];
    r.min_second_difference = std::min(r.min_second_difference, d2);
    if (d2 < -convex_tol * r.scale) r.violations.push_back({i, d2});
  }
  r.convex = r.violations.empty();
  if (parity == Parity::Even) {
    r.parity_checked = true;
    double xscale = 0.0;
    for (double x : xs) xscale = std::max(xscale, std::abs(x));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < 0.0) continue;
      auto it = std::lower_bound(xs.begin(), xs.end(), -xs[i] - 1e-12 * xscale);
      if (it == xs.end() || std::abs(*it + xs[i]) > 1e-12 * xscale) continue;
      const std::size_t k = static_cast<std::size_t>(it - xs.begin());
      ++r.mirrored_pairs;
      r.max_parity_defect = std::max(r.max_parity_defect, std::abs(ys[i] - ys[k]));
    }
    r.even = r.max_parity_defect <= parity_tol * r.scale;
  }
  r.pass = r.convex && r.even;
  return r;
}

// Values p(x_i, y_j) on a rectangular grid; rows follow xs, columns ys.
struct SampledSurface {
  std::vector<double> xs;  // mu0
  std::vector<double> ys;  // nu
  Eigen::MatrixXd values;
  std::string label;

  void validate() const {
    if (values.rows() != static_cast<Eigen::Index>(xs.size()) || values.cols() != static_cast<Eigen::Index>(ys.size())) {
      throw PreconditionError("SampledSurface '" + label + "': value matrix does not match the grid");
    }
    for (const auto* g : {&xs, &ys}) {
      for (std::size_t i = 1; i < g->size(); ++i) {
        if (!((*g)[i] > (*g)[i - 1])) throw PreconditionError("SampledSurface '" + label + "': grid not ascending");
      }
    }
  }
};

struct PdeResidualReport {
  Eigen::MatrixXd residual;  // NaN where not evaluated
  double max_abs = 0.0;
  std::size_t argmax_i = 0, argmax_j = 0;
  std::size_t nodes = 0;
  double h = 0.0;  // largest grid spacing in either direction
};

namespace detail {

// Three-point first derivative on a possibly uneven stencil x0 < x1 < x2 at x1.
inline double three_point_derivative(double x0, double x1, double x2, double y0, double y1, double y2) {
  const double hl = x1 - x0, hr = x2 - x1;
  return (-hr / (hl * (hl + hr))) * y0 + ((hr - hl) / (hl * hr)) * y1 + (hl / (hr * (hl + hr))) * y2;
}

}  // namespace detail

// R = dp/dx - (1/4) (dp/dy)^2 at interior nodes, by central differences.
// Nodes with mask(i, j) == false are skipped.
inline PdeResidualReport pde_residual(const SampledSurface& s,
                                      const std::optional<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>>& mask = {}) {
  s.validate();
  const auto nx = static_cast<Eigen::Index>(s.xs.size());
  const auto ny = static_cast<Eigen::Index>(s.ys.size());
  if (nx < 3 || ny < 3) throw PreconditionError("pde_residual: surface '" + s.label + "' has no interior nodes");
  PdeResidualReport r;
  r.residual = Eigen::MatrixXd::Constant(nx, ny, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 1; i < nx; ++i) r.h = std::max(r.h, s.xs[i] - s.xs[i - 1]);
  for (Eigen::Index j = 1; j < ny; ++j) r.h = std::max(r.h, s.ys[j] - s.ys[j - 1]);
  for (Eigen::Index i = 1; i + 1 < nx; ++i) {
    for (Eigen::Index j = 1; j + 1 < ny; ++j) {
      if (mask && !(*mask)(i, j)) continue;
      const auto& v = s.values;
      const double dx = detail::three_point_derivative(s.xs[i - 1], s.xs[i], s.xs[i + 1], v(i - 1, j), v(i, j), v(i + 1, j));
      const double dy = detail::three_point_derivative(s.ys[j - 1], s.ys[j], s.ys[j + 1], v(i, j - 1), v(i, j), v(i, j + 1));
      const double res = dx - 0.25 * dy * dy;
      r.residual(i, j) = res;
      ++r.nodes;
      if (std::abs(res) >= r.max_abs) {
        r.max_abs = std::abs(res);
        r.argmax_i = static_cast<std::size_t>(i);
        r.argmax_j = static_cast<std::size_t>(j);
      }
    }
  }
  return r;
}

}  // namespace bogolab
