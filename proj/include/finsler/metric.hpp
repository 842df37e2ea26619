#pragma once

#include <span>
#include <vector>

#include "finsler/structure.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// Cholesky pivot below which a fundamental tensor is rejected.
inline constexpr double kCholeskyPivot = 1e-12;
/// |F - 1| accepted for points declared to lie on SM.
inline constexpr double kIndicatrixTolerance = 1e-10;

/// Inverse of a symmetric positive-definite row-major matrix.
/// Throws NotPositiveDefinite when a Cholesky pivot drops below kCholeskyPivot.
std::vector<double> invert_spd(std::span<const double> a, int n);

/// Jet-level zeroth layer of the tower: everything that is a y-derivative of F^2.
/// Variables of the jet space are (x^0..x^{n-1}, y^0..y^{n-1}).
struct MetricJets {
  Jet f2;
  Jet f;
  TensorJet g;       ///< g_ij, order K-2
  TensorJet ginv;    ///< g^ij, order K-2
  TensorJet cartan;  ///< C_kij = 1/2 d g_ij / d y^k, order K-3
  TensorJet cartan_up;  ///< C^i_jk = g^il C_ljk
  TensorJet trace;   ///< T_j = g^ik C_ikj
  TensorJet hilbert; ///< l_i = dF/dy^i, order K-1

  /// `f2` must be a jet of F^2 of order >= 2; quantities needing more orders
  /// than available are left empty (rank 0). Throws NotPositiveDefinite.
  static MetricJets from_norm_squared(const Jet& f2, int n);
};

/// Inverse of a matrix of jets (Gauss-Jordan without pivoting; for SPD input).
TensorJet invert_jets(const TensorJet& m);

double eval_F(const FinslerStructure& s, std::span<const double> x, std::span<const double> y);
TensorValue fundamental_tensor(const FinslerStructure& s, const TangentPoint& z);
TensorValue inverse_metric(const FinslerStructure& s, const TangentPoint& z);
TensorValue cartan_tensor(const FinslerStructure& s, const TangentPoint& z);
TensorValue cartan_trace(const FinslerStructure& s, const TangentPoint& z);
TensorValue hilbert_form(const FinslerStructure& s, const TangentPoint& z);
/// (x, u / F(x, u)).
SpherePoint normalize_to_indicatrix(const FinslerStructure& s, std::span<const double> x,
                                    std::span<const double> u);

}  // namespace finsler
