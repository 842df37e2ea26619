#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsler/metric.hpp"
#include "finsler/structure.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// Taylor expansion of the Cartan-connection tower about z = (x, y).
///
/// F^2 is expanded to order K in the 2n variables (dx, dy); every derived
/// quantity is a jet whose order drops with the number of derivatives it
/// took: g, G at K-2; C, T, N, Gamma at K-3; grad_0 T at K-4. Operators on
/// fields evaluated against the same expansion therefore differentiate
/// composite expressions exactly.
class LocalExpansion {
 public:
  LocalExpansion(const FinslerStructure& s, const TangentPoint& z, int order);

  /// Same tower about a different base x. z.y must match and x may only move
  /// along axes F does not depend on.
  LocalExpansion rebased(const TangentPoint& z) const;

  const FinslerStructure& structure() const;
  const TangentPoint& point() const { return z_; }
  int dim() const;
  /// Order K of the F^2 expansion.
  int order() const;
  const JetSpace& space() const;

  Jet x(int i, int order) const;
  Jet y(int i, int order) const;
  std::vector<Jet> xs(int order) const;
  std::vector<Jet> ys(int order) const;
  /// y / F(x, y).
  std::vector<Jet> unit_ys(int order) const;

  const Jet& norm_squared() const;
  const Jet& norm() const;
  const MetricJets& metric() const;
  const TensorJet& g() const { return metric().g; }
  const TensorJet& ginv() const { return metric().ginv; }
  /// G^i.
  const TensorJet& spray() const;
  /// N(i, j) = N^i_j.
  const TensorJet& nonlinear() const;
  /// gamma(i, j, k) = Gamma^i_jk.
  const TensorJet& gamma() const;
  /// cartan_up(i, j, k) = C^i_jk.
  const TensorJet& cartan_up() const;
  const TensorJet& cartan_trace() const;
  /// J_j = grad_0 T_j = y^h grad_h T_j; needs K >= 4.
  const TensorJet& landsberg_trace() const;

  /// delta_i f = d f/dx^i - N^j_i d f/dy^j.
  Jet delta(const Jet& f, int i) const;
  /// Horizontal covariant derivative; the new lower slot is appended last.
  TensorJet hcov(const TensorJet& t) const;
  /// Vertical (Cartan) covariant derivative; new lower slot appended last.
  TensorJet vcov(const TensorJet& t) const;
  /// y^h grad_h t.
  TensorJet nabla0(const TensorJet& t) const;

 private:
  struct Tower;
  LocalExpansion(std::shared_ptr<const Tower> tower, TangentPoint z);
  void require(int needed, const char* what) const;

  std::shared_ptr<const Tower> tower_;
  TangentPoint z_;
};

/// Components of a tensor field on TM_0 evaluated against an expansion.
///
/// `geometry_depth` is the number of F^2 orders the evaluator needs beyond
/// the requested jet order (0 for fields given by explicit formulas, 2 for
/// fields built from g, and so on).
struct TensorField {
  Variance variance;
  int geometry_depth = 0;
  std::function<TensorJet(const LocalExpansion&, int order)> evaluate;
  std::string label;
  /// "jet" when derivatives are exact, "fd" when they come from finite differences.
  std::string derivative_path = "jet";

  /// Component formula f(x, y_hat) with y_hat = y / F, extended off SM with
  /// the given y-homogeneity degree (F^degree * f). With `homogeneity`
  /// empty the formula receives raw y instead.
  using Formula = std::function<std::vector<Jet>(std::span<const Jet> x, std::span<const Jet> y)>;
  static TensorField from_formula(int dim, Variance variance, Formula f, std::optional<int> homogeneity,
                                  std::string label);

  /// Plain numeric evaluator without jet support: derivatives up to order 2
  /// come from finite differences with step 1e-4.
  using NumericFormula = std::function<std::vector<double>(std::span<const double> x, std::span<const double> y)>;
  static TensorField from_numeric(int dim, Variance variance, NumericFormula f, std::string label);

  /// F^2 order needed to evaluate at the given jet order.
  int required_order(int jet_order) const { return jet_order + geometry_depth; }
};

/// Smallest F^2 order at which `field` can be differentiated `derivs` times
/// horizontally or vertically at jet order 0.
int expansion_order_for(const TensorField& field, int derivs);

struct ConnectionAtPoint {
  TensorValue G;      ///< G^i
  TensorValue N;      ///< N^i_j
  TensorValue Gamma;  ///< Gamma^i_jk
  TensorValue Cv;     ///< C^i_jk
  TangentPoint point;
};

TensorValue spray(const FinslerStructure& s, const TangentPoint& z);
TensorValue nonlinear_connection(const FinslerStructure& s, const TangentPoint& z);
double delta_derivative(const FinslerStructure& s, const ScalarField& f, const TangentPoint& z, int axis);
ConnectionAtPoint cartan_coefficients(const FinslerStructure& s, const TangentPoint& z);
TensorValue h_covariant_derivative(const FinslerStructure& s, const TensorField& t, const TangentPoint& z);
TensorValue v_covariant_derivative(const FinslerStructure& s, const TensorField& t, const TangentPoint& z);
TensorValue nabla_0(const FinslerStructure& s, const TensorField& t, const TangentPoint& z);

/// Geometric fields usable as TensorField inputs.
TensorField metric_field(int dim);          ///< g_ij
TensorField hilbert_field(int dim);         ///< l_i
TensorField cartan_trace_field(int dim);    ///< T_j
TensorField kronecker_field(int dim);       ///< delta^i_j

}  // namespace finsler
