#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finsler/forms.hpp"

namespace finsler {

/// Node counts per base axis and per fiber angle.
struct GridSpec {
  std::vector<int> base;
  std::vector<int> fiber;

  /// n=2: 32x32 base, 64 fiber; n=3: 16^3 base, 32x16 fiber.
  static GridSpec defaults(int n);
  GridSpec doubled() const;
  std::string to_string() const;
};

/// One-dimensional rule on an interval.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  bool periodic = false;
};

/// Uniform rectangle rule on [lo, hi) (spectral for periodic integrands).
AxisRule periodic_rule(double lo, double hi, int count);
/// Composite Gauss-Legendre with panels of up to 8 nodes.
AxisRule gauss_legendre_rule(double lo, double hi, int count);

/// Fiber angles -> direction u(theta). n=2: (cos t, sin t); n=3: (sin t2 cos t1, sin t2 sin t1, cos t2).
std::vector<double> fiber_direction(int n, std::span<const double> theta);

/// Tensor-product rule on SM parameterized by (x, theta).
class QuadratureGrid {
 public:
  /// Throws GridError for fewer than 8 nodes on an axis or a dimension mismatch.
  static QuadratureGrid make(const FinslerStructure& s, const GridSpec& spec);

  int dim() const { return dim_; }
  const GridSpec& spec() const { return spec_; }
  const std::vector<AxisRule>& base_axes() const { return base_; }
  const std::vector<AxisRule>& fiber_axes() const { return fiber_; }
  std::size_t base_size() const;
  std::size_t fiber_size() const;
  std::size_t size() const { return base_size() * fiber_size(); }

  /// Base point, its weight, and fiber angles / weight by flat index.
  std::vector<double> base_point(std::size_t b, double* weight = nullptr) const;
  std::vector<double> fiber_angles(std::size_t f, double* weight = nullptr) const;

 private:
  int dim_ = 0;
  GridSpec spec_;
  std::vector<AxisRule> base_;
  std::vector<AxisRule> fiber_;
};

struct VolumeDensity {
  /// |component| of eta in the (x, theta) coordinates.
  double value;
  /// Signed component for the chosen orientation.
  double raw;
};

/// eta = (-1)^{n(n-1)/2}/(n-1)! omega ^ (d omega)^{n-1}, omega the Hilbert form,
/// pulled back through (x, theta) -> (x, u(theta)/F). `reversed` runs the first
/// fiber angle backwards. Throws DimensionUnsupported, PoleSingularity.
VolumeDensity volume_density(const FinslerStructure& s, std::span<const double> x, std::span<const double> theta,
                             bool reversed = false);

/// Worker count for grid fan-out (FINSLER_THREADS, else hardware concurrency).
int worker_count();

/// Integrand receiving the expansion at a node of SM and writing `count` values.
using NodeIntegrand = std::function<void(const LocalExpansion&, std::span<double>)>;

/// Integrals of several integrands against eta in one pass. The tower is
/// built once per node class that differs along axes F depends on and
/// rebased elsewhere; the reduction order is fixed, so results do not
/// depend on the worker count.
std::vector<double> integrate_many(const FinslerStructure& s, const QuadratureGrid& grid, int expansion_order,
                                   int count, const NodeIntegrand& integrand);

double integrate_scalar(const FinslerStructure& s, const std::function<double(const TangentPoint&)>& f,
                        const QuadratureGrid& grid);
double global_inner_product(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& psi,
                            const QuadratureGrid& grid);

struct DivergenceCheck {
  double integral;
  double norm;
  double defect;
  std::string warning;
};
DivergenceCheck divergence_integral_check(const FinslerStructure& s, const HorizontalForm& pi,
                                          const QuadratureGrid& grid);
std::vector<DivergenceCheck> divergence_integral_checks(const FinslerStructure& s,
                                                       const std::vector<HorizontalForm>& pis,
                                                       const QuadratureGrid& grid);

struct Adjointness {
  double lhs;  ///< (d_H phi, psi)
  double rhs;  ///< (phi, delta_H psi)
  double defect;
};
Adjointness adjointness_defect(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& psi,
                               const QuadratureGrid& grid);
/// Several pairs evaluated in one sweep over the grid.
std::vector<Adjointness> adjointness_defects(const FinslerStructure& s,
                                             const std::vector<std::pair<HorizontalForm, HorizontalForm>>& pairs,
                                             const QuadratureGrid& grid);

struct Bochner {
  double K_integral;
  double grad_norm_integral;
  double sum;
  /// Integral of delta Z - delta Y; vanishes for every smooth X on closed charts.
  double divergence_integral;
};
Bochner bochner_integral(const FinslerStructure& s, const VectorField& X, const QuadratureGrid& grid);

struct HarmonicReport {
  double laplacian_norm;
  double dH_norm;
  double deltaH_norm;
  double form_norm;
  /// (Delta phi, phi) - |d phi|^2 - |delta phi|^2.
  double energy_defect;
  /// Threshold for |d phi|, |delta phi| implied by tol through
  /// |d phi|^2 + |delta phi|^2 = (Delta phi, phi) <= |Delta phi| |phi|.
  double derived_tol;
  bool harmonic;
  /// harmonic <=> (dH_norm <= derived_tol and deltaH_norm <= derived_tol).
  bool equivalence_holds;
};
HarmonicReport is_h_harmonic(const FinslerStructure& s, const HorizontalForm& phi, const QuadratureGrid& grid,
                             double tol);

}  // namespace finsler
