#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/jet.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// Coordinate chart of the base manifold. Periodic axes wrap; non-periodic
/// axes are usable only inside [lo + margin, hi - margin].
struct ChartSpec {
  std::vector<std::pair<double, double>> bounds;
  std::vector<bool> periodic;
  std::vector<double> excluded_margin;

  static ChartSpec torus(int n);
  /// (theta, phi) chart of the round 2-sphere with polar margins.
  static ChartSpec sphere(double pole_margin = 1e-3);

  int dim() const { return static_cast<int>(bounds.size()); }
  /// Throws ConfigError when an invariant fails.
  void validate() const;
  bool contains(std::span<const double> x) const;
};

enum class Family { Euclidean, Riemannian, Randers, Custom };

std::string to_string(Family f);

/// Scalar field on the slit tangent bundle, evaluated on coordinate jets.
using ScalarField = std::function<Jet(std::span<const Jet> x, std::span<const Jet> y)>;
/// Field on the base manifold returning n*n (matrix, row-major) or n (covector) jets.
using BaseField = std::function<std::vector<Jet>(std::span<const Jet> x)>;

/// A Finsler structure F on a single chart. Cheap to copy; immutable.
class FinslerStructure {
 public:
  static FinslerStructure euclidean(int n, ChartSpec chart, std::string label = "euclidean");
  /// F = sqrt(a_ij(x) y^i y^j).
  static FinslerStructure riemannian(int n, BaseField a, ChartSpec chart, bool translation_invariant,
                                     std::string label);
  /// F = sqrt(a_ij y^i y^j) + b_i y^i. Rejects fields whose a-norm of b reaches 1
  /// on a sample lattice of the chart (ConfigError).
  static FinslerStructure randers(int n, BaseField a, BaseField b, ChartSpec chart, bool translation_invariant,
                                  std::string label);
  /// Arbitrary F^2 supplied by a built-in expression id.
  static FinslerStructure custom(int n, std::string expression_id, ScalarField norm_squared, ChartSpec chart,
                                 bool translation_invariant, std::string label);

  Family family() const;
  int dim() const;
  const ChartSpec& chart() const;
  const std::string& label() const;
  const std::string& expression_id() const;
  /// F independent of x: the connection tower at (x, y) depends on y only.
  bool translation_invariant() const;
  /// F does not depend on x^axis.
  bool invariant_along(int axis) const;
  /// Copy declaring which coordinates F is independent of (a caching hint;
  /// declaring an axis the formula does depend on gives wrong results).
  FinslerStructure with_invariant_axes(std::vector<bool> axes) const;

  /// F^2 on coordinate jets.
  Jet norm_squared(std::span<const Jet> x, std::span<const Jet> y) const;
  /// F(x, y); throws ZeroVector / OutOfChart.
  double norm(std::span<const double> x, std::span<const double> y) const;
  /// Throws OutOfChart when x is outside the usable chart.
  void check_in_chart(std::span<const double> x) const;

  /// Randers only: a-norm of b at x.
  double randers_b_norm(std::span<const double> x) const;

 private:
  struct Impl;
  explicit FinslerStructure(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// A point of the sphere bundle: F(x, y) = 1.
class SpherePoint {
 public:
  /// Accepts |F - 1| <= 1e-6 and re-normalizes; otherwise DomainError.
  static SpherePoint make(const FinslerStructure& s, std::vector<double> x, std::vector<double> y);

  const std::vector<double>& x() const { return z_.x; }
  const std::vector<double>& y() const { return z_.y; }
  const TangentPoint& tangent() const { return z_; }
  operator const TangentPoint&() const { return z_; }  // NOLINT implicit

 private:
  friend SpherePoint normalize_to_indicatrix(const FinslerStructure&, std::span<const double>,
                                             std::span<const double>);
  explicit SpherePoint(TangentPoint z) : z_(std::move(z)) {}
  TangentPoint z_;
};

}  // namespace finsler
