#include "finsler/structure.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/error.hpp"
#include "finsler/metric.hpp"

namespace finsler {

ChartSpec ChartSpec::torus(int n) {
  ChartSpec c;
  c.bounds.assign(static_cast<std::size_t>(n), {0.0, 2.0 * std::numbers::pi});
  c.periodic.assign(static_cast<std::size_t>(n), true);
  c.excluded_margin.assign(static_cast<std::size_t>(n), 0.0);
  return c;
}

ChartSpec ChartSpec::sphere(double pole_margin) {
  ChartSpec c;
  c.bounds = {{0.0, std::numbers::pi}, {0.0, 2.0 * std::numbers::pi}};
  c.periodic = {false, true};
  c.excluded_margin = {pole_margin, 0.0};
  return c;
}

void ChartSpec::validate() const {
  const std::size_t n = bounds.size();
  if (n == 0) throw Error(ErrorKind::ConfigError, "chart has no axes");
  if (periodic.size() != n || excluded_margin.size() != n) {
    throw Error(ErrorKind::ConfigError, "chart bounds/periodic/excluded_margin lengths differ");
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto [lo, hi] = bounds[a];
    if (!(hi > lo)) throw Error(ErrorKind::ConfigError, "chart axis " + std::to_string(a) + " has empty interval");
    if (excluded_margin[a] < 0.0 || 2.0 * excluded_margin[a] >= hi - lo) {
      throw Error(ErrorKind::ConfigError, "chart axis " + std::to_string(a) + " margin not strictly inside bounds");
    }
  }
}

bool ChartSpec::contains(std::span<const double> x) const {
  if (x.size() != bounds.size()) return false;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!std::isfinite(x[a])) return false;
    if (periodic[a]) continue;
    if (x[a] < bounds[a].first + excluded_margin[a] || x[a] > bounds[a].second - excluded_margin[a]) return false;
  }
  return true;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Euclidean: return "euclidean";
    case Family::Riemannian: return "riemannian";
    case Family::Randers: return "randers";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

struct FinslerStructure::Impl {
  Family family;
  int dim;
  ChartSpec chart;
  std::string label;
  std::string expression_id;
  std::vector<bool> invariant_axes;
  ScalarField f2;
  BaseField a;
  BaseField b;
};

namespace {

Jet quadratic(const std::vector<Jet>& a, std::span<const Jet> y, int n) {
  Jet q(0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) q += a[static_cast<std::size_t>(i * n + j)] * y[i] * y[j];
  }
  return q;
}

std::vector<Jet> constant_jets(std::span<const double> x) { return {x.begin(), x.end()}; }

// Lattice of chart points used for whole-chart invariant checks.
std::vector<std::vector<double>> sample_lattice(const ChartSpec& c, int per_axis) {
  const int n = c.dim();
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const double lo = c.bounds[a].first + c.excluded_margin[a];
      const double hi = c.bounds[a].second - c.excluded_margin[a];
      x[a] = lo + (hi - lo) * (idx[a] + 0.5) / per_axis;
    }
    pts.push_back(std::move(x));
    int a = 0;
    while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == n) break;
  }
  return pts;
}

}  // namespace

FinslerStructure FinslerStructure::euclidean(int n, ChartSpec chart, std::string label) {
  chart.validate();
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Euclidean;
  impl->dim = n;
  impl->chart = std::move(chart);
  impl->label = std::move(label);
  impl->invariant_axes.assign(static_cast<std::size_t>(n), true);
  impl->f2 = [](std::span<const Jet>, std::span<const Jet> y) {
    Jet q(0.0);
    for (const auto& yi : y) q += yi * yi;
    return q;
  };
  return FinslerStructure(impl);
}

FinslerStructure FinslerStructure::riemannian(int n, BaseField a, ChartSpec chart, bool translation_invariant,
                                              std::string label) {
  chart.validate();
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Riemannian;
  impl->dim = n;
  impl->chart = std::move(chart);
  impl->label = std::move(label);
  impl->invariant_axes.assign(static_cast<std::size_t>(n), translation_invariant);
  impl->a = a;
  impl->f2 = [a, n](std::span<const Jet> x, std::span<const Jet> y) { return quadratic(a(x), y, n); };
  return FinslerStructure(impl);
}

FinslerStructure FinslerStructure::randers(int n, BaseField a, BaseField b, ChartSpec chart,
                                           bool translation_invariant, std::string label) {
  chart.validate();
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Randers;
  impl->dim = n;
  impl->chart = std::move(chart);
  impl->label = std::move(label);
  impl->invariant_axes.assign(static_cast<std::size_t>(n), translation_invariant);
  impl->a = a;
  impl->b = b;
  impl->f2 = [a, b, n](std::span<const Jet> x, std::span<const Jet> y) {
    const auto bx = b(x);
    Jet beta(0.0);
    for (int i = 0; i < n; ++i) beta += bx[static_cast<std::size_t>(i)] * y[i];
    const Jet f = sqrt(quadratic(a(x), y, n)) + beta;
    return f * f;
  };
  FinslerStructure s(impl);
  for (const auto& x : sample_lattice(s.chart(), translation_invariant ? 1 : 24 / n)) {
    const double bn = s.randers_b_norm(x);
    if (!(bn < 1.0)) {
      std::ostringstream os;
      os << "Randers invariant violated: a-norm of b is " << bn << " (must be < 1)";
      throw Error(ErrorKind::ConfigError, os.str());
    }
  }
  return s;
}

FinslerStructure FinslerStructure::custom(int n, std::string expression_id, ScalarField norm_squared,
                                          ChartSpec chart, bool translation_invariant, std::string label) {
  chart.validate();
  auto impl = std::make_shared<Impl>();
  impl->family = Family::Custom;
  impl->dim = n;
  impl->chart = std::move(chart);
  impl->label = std::move(label);
  impl->expression_id = std::move(expression_id);
  impl->invariant_axes.assign(static_cast<std::size_t>(n), translation_invariant);
  impl->f2 = std::move(norm_squared);
  return FinslerStructure(impl);
}

Family FinslerStructure::family() const { return impl_->family; }
int FinslerStructure::dim() const { return impl_->dim; }
const ChartSpec& FinslerStructure::chart() const { return impl_->chart; }
const std::string& FinslerStructure::label() const { return impl_->label; }
const std::string& FinslerStructure::expression_id() const { return impl_->expression_id; }
bool FinslerStructure::translation_invariant() const {
  for (bool b : impl_->invariant_axes) {
    if (!b) return false;
  }
  return true;
}

bool FinslerStructure::invariant_along(int axis) const {
  return impl_->invariant_axes[static_cast<std::size_t>(axis)];
}

FinslerStructure FinslerStructure::with_invariant_axes(std::vector<bool> axes) const {
  if (static_cast<int>(axes.size()) != impl_->dim) throw Error(ErrorKind::ConfigError, "invariant axis count");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->invariant_axes = std::move(axes);
  return FinslerStructure(impl);
}

Jet FinslerStructure::norm_squared(std::span<const Jet> x, std::span<const Jet> y) const {
  return impl_->f2(x, y);
}

void FinslerStructure::check_in_chart(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != impl_->dim || !impl_->chart.contains(x)) {
    throw Error(ErrorKind::OutOfChart, "base point outside chart of '" + impl_->label + "'");
  }
}

double FinslerStructure::norm(std::span<const double> x, std::span<const double> y) const {
  check_in_chart(x);
  if (static_cast<int>(y.size()) != impl_->dim) throw Error(ErrorKind::DomainError, "tangent vector dimension");
  bool zero = true;
  for (double v : y) zero = zero && v == 0.0;
  if (zero) throw Error(ErrorKind::ZeroVector, "F evaluated at y = 0");
  const auto xj = constant_jets(x);
  const auto yj = constant_jets(y);
  const double f2 = impl_->f2(xj, yj).value();
  if (!(f2 > 0.0)) throw Error(ErrorKind::DomainError, "F^2 not positive");
  return std::sqrt(f2);
}

double FinslerStructure::randers_b_norm(std::span<const double> x) const {
  if (impl_->family != Family::Randers) return 0.0;
  const int n = impl_->dim;
  const auto xj = constant_jets(x);
  const auto a = impl_->a(xj);
  const auto b = impl_->b(xj);
  std::vector<double> am(static_cast<std::size_t>(n * n));
  for (std::size_t k = 0; k < am.size(); ++k) am[k] = a[k].value();
  const auto ainv = invert_spd(am, n);
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) q += ainv[static_cast<std::size_t>(i * n + j)] * b[i].value() * b[j].value();
  }
  return std::sqrt(std::max(q, 0.0));
}

SpherePoint SpherePoint::make(const FinslerStructure& s, std::vector<double> x, std::vector<double> y) {
  const double f = s.norm(x, y);
  if (std::abs(f - 1.0) > 1e-6) {
    throw Error(ErrorKind::DomainError, "point is not on the indicatrix (F = " + std::to_string(f) + ")");
  }
  for (auto& v : y) v /= f;
  return SpherePoint(TangentPoint{std::move(x), std::move(y)});
}

}  // namespace finsler
