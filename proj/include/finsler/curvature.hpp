#pragma once

#include "finsler/connection.hpp"

namespace finsler {

/// Curvature of the Cartan connection from an expansion of order K >= 4.
/// Results are jets of order K-4 (Q: K-3).
namespace curv {

/// rhh(h, k, i, j) = R^h_kij.
TensorJet hh(const LocalExpansion& e);
/// rflag(i, j, k) = R^i_jk = delta_j N^i_k - delta_k N^i_j.
TensorJet flag(const LocalExpansion& e);
/// y^m R^i_mjk from the hh-curvature.
TensorJet flag_contracted(const LocalExpansion& e, const TensorJet& rhh);
/// P^h_kij as printed: d_k Gamma^h_ki - delta_i C^h_kj + Gamma^r_ki C^h_rj - C^r_kj Gamma^h_rj + d_j N^r_i C^h_kr
/// (repeated indices k and j taken literally, r summed).
TensorJet hv_printed(const LocalExpansion& e);
/// d_j Gamma^h_ki - delta_i C^h_kj + Gamma^r_ki C^h_rj - C^r_kj Gamma^h_ri + d_j N^r_i C^h_kr.
TensorJet hv(const LocalExpansion& e);
TensorJet vv(const LocalExpansion& e);
/// R_ij = R^l_ilj.
TensorJet ricci(const TensorJet& rhh);

}  // namespace curv

struct CurvatureAtPoint {
  TensorValue R_hh;
  TensorValue P_hv;
  TensorValue P_hv_printed;
  TensorValue Q_vv;
  TensorValue R_flag;
  /// y^m R^i_mjk, the dual form of R_flag.
  TensorValue R_flag_contracted;
  TensorValue Ricci;
  TangentPoint point;
};

CurvatureAtPoint curvature(const FinslerStructure& s, const TangentPoint& z);

TensorValue hh_curvature(const FinslerStructure& s, const TangentPoint& z);
/// Throws DomainError when the two forms of R^i_jk disagree beyond 1e-6 relative.
TensorValue flag_curvature_tensor(const FinslerStructure& s, const TangentPoint& z);
TensorValue hv_curvature(const FinslerStructure& s, const TangentPoint& z);
TensorValue hv_curvature_printed(const FinslerStructure& s, const TangentPoint& z);
TensorValue vv_curvature(const FinslerStructure& s, const TangentPoint& z);
TensorValue ricci_trace(const FinslerStructure& s, const TangentPoint& z);

/// res(i, k, h) = grad_k grad_h X^i - grad_h grad_k X^i - X^r R^i_rkh + vgrad_r X^i R^r_kh.
TensorJet ricci_identity_residual(const LocalExpansion& e, const TensorJet& X2);
TensorValue ricci_identity_residual(const FinslerStructure& s, const TensorField& X, const TangentPoint& z);

}  // namespace finsler
