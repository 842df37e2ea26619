#pragma once

#include <string>
#include <vector>

#include "finsler/connection.hpp"

namespace finsler {

/// Horizontal p-form phi = (1/p!) phi_{i1..ip}(z) dx^i1 ^ ... ^ dx^ip on SM.
/// Coefficients are stored as a full antisymmetric n^p array.
struct HorizontalForm {
  int dim = 0;
  int degree = 0;
  TensorField coeffs;
  std::string label;

  TensorJet evaluate(const LocalExpansion& e, int order) const { return coeffs.evaluate(e, order); }
  int geometry_depth() const { return coeffs.geometry_depth; }

  /// Independent components phi_I for increasing I (lexicographic), as
  /// functions of (x, y/F); the rest is filled by antisymmetry.
  static HorizontalForm from_components(int dim, int degree, TensorField::Formula f, std::string label);
  /// Wraps a lower-rank field that is already antisymmetric.
  static HorizontalForm from_field(int degree, TensorField f, std::string label);
};

/// X = X^i(x) d/dx^i on M.
struct VectorField {
  int dim = 0;
  BaseField components;
  std::string label;

  TensorField as_tensor() const;
};

/// Horizontal and vertical parts of the 1-form associated to a vector field.
struct AssociatedForm {
  HorizontalForm horizontal;  ///< X_i = g_ij(x, y) X^j(x)
  TensorField vertical;       ///< (grad_0 X_i - y_i grad_0(y^j X_j) / F^2) / F
  VectorField source;
};

/// Increasing multi-indices of length p in {0..n-1}.
std::vector<std::vector<int>> increasing_indices(int n, int p);

namespace forms {

/// (d phi)_{i0..ip} = sum_k (-1)^k grad_{ik} phi_{i0..^ik..ip}, from D = hcov(phi).
TensorJet differential(const TensorJet& D, int degree);
/// (delta psi)_J = -g^ij (grad_i psi_jJ - psi_jJ J_i).
TensorJet codifferential(const LocalExpansion& e, const TensorJet& psi, const TensorJet& D);
/// (1/p!) phi^I psi_I.
Jet inner(const LocalExpansion& e, const TensorJet& a, const TensorJet& b, int order);
Jet norm_squared(const LocalExpansion& e, const TensorJet& a, int order);

/// Terms of the energy identities at one point.
struct EnergyTerms {
  double dZ_minus_dY = 0.0;  ///< delta Z - delta Y from the codifferential
  double rhs = 0.0;          ///< right side of the expanded difference
  double cross = 0.0;        ///< grad_j X^k grad_k X^j
  double grad_norm2 = 0.0;   ///< |grad X|^2
  double dH_norm2 = 0.0;     ///< 1/4 (dX)_ij (dX)^ij
  double K = 0.0;
};
/// Needs an expansion of order >= 5 at the point.
EnergyTerms energy_terms(const LocalExpansion& e, const VectorField& X);

}  // namespace forms

HorizontalForm horizontal_differential(const FinslerStructure& s, const HorizontalForm& phi);
HorizontalForm horizontal_codifferential(const FinslerStructure& s, const HorizontalForm& psi);
/// d delta + delta d by composition.
HorizontalForm horizontal_laplacian(const FinslerStructure& s, const HorizontalForm& phi);
/// Expanded second-order formula for the Laplacian, p >= 1.
HorizontalForm laplacian_expansion_p(const FinslerStructure& s, const HorizontalForm& phi);

/// Coefficient array of a form at a point.
TensorValue form_values(const FinslerStructure& s, const HorizontalForm& phi, const TangentPoint& z);
double pointwise_inner(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& psi,
                       const TangentPoint& z);

AssociatedForm associate_one_form(const FinslerStructure& s, const VectorField& X);

/// g^rs (grad_r grad_s phi_i - grad_s phi_i J_r) - phi^t R_ti + vgrad_t phi^r R^t_ri - phi^r grad_i J_r
/// for phi the horizontal associated form; equals -(Laplacian phi)_i.
TensorValue weitzenbock_residual(const FinslerStructure& s, const VectorField& X, const TangentPoint& z);
double k_scalar(const FinslerStructure& s, const VectorField& X, const TangentPoint& z);

struct EnergyResidual {
  /// delta Z - delta Y minus its expanded form.
  double difference;
  /// grad_j X^k grad_k X^j - |grad X|^2 + 2 |d_H X|^2.
  double norm_identity;
};
EnergyResidual energy_identity_residual(const FinslerStructure& s, const VectorField& X, const TangentPoint& z);

}  // namespace finsler
