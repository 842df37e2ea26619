#include "finsler/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/error.hpp"

namespace finsler {

namespace {

const Variance kUlll = {Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower};

void need(const LocalExpansion& e, int k) {
  if (e.order() < k) throw Error(ErrorKind::DomainError, "curvature needs expansion order " + std::to_string(k));
}

// dgamma(h, j, k, i) = delta_i Gamma^h_jk
TensorJet delta_gamma(const LocalExpansion& e) {
  const int n = e.dim();
  const auto& G = e.gamma();
  TensorJet out(n, kUlll);
  for (int h = 0; h < n; ++h) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          out(h, j, k, i) = e.delta(G(h, j, k), i);
          out(h, k, j, i) = out(h, j, k, i);
        }
      }
    }
  }
  return out;
}

}  // namespace

namespace curv {

TensorJet flag(const LocalExpansion& e) {
  need(e, 4);
  const int n = e.dim();
  const auto& N = e.nonlinear();
  // d3(i, k, j) = delta_j N^i_k
  TensorJet d3(n, {Slot::Upper, Slot::Lower, Slot::Lower});
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) d3(i, k, j) = e.delta(N(i, k), j);
    }
  }
  TensorJet R(n, {Slot::Upper, Slot::Lower, Slot::Lower});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) R(i, j, k) = d3(i, k, j) - d3(i, j, k);
    }
  }
  return R;
}

TensorJet hh(const LocalExpansion& e) {
  need(e, 4);
  const int n = e.dim();
  const int K = e.order();
  const auto& G = e.gamma();
  const auto& C = e.cartan_up();
  const TensorJet dG = delta_gamma(e);
  const TensorJet Rf = flag(e);
  TensorJet R(n, kUlll);
  for (int h = 0; h < n; ++h) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Jet v = dG(h, j, k, i) - dG(h, i, k, j);
          for (int l = 0; l < n; ++l) {
            v += G(l, j, k) * G(h, i, l) - G(l, i, k) * G(h, j, l) + Rf(l, i, j) * C(h, l, k);
          }
          R(h, k, i, j) = v.truncated(K - 4);
        }
      }
    }
  }
  return R;
}

TensorJet flag_contracted(const LocalExpansion& e, const TensorJet& rhh) {
  const int n = e.dim();
  const int o = rhh.order();
  TensorJet R(n, {Slot::Upper, Slot::Lower, Slot::Lower});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Jet v(0.0);
        for (int m = 0; m < n; ++m) v += e.y(m, o) * rhh(i, m, j, k);
        R(i, j, k) = v;
      }
    }
  }
  return R;
}

namespace {

TensorJet hv_generic(const LocalExpansion& e, bool literal) {
  need(e, 4);
  const int n = e.dim();
  const int K = e.order();
  const auto& G = e.gamma();
  const auto& C = e.cartan_up();
  const auto& N = e.nonlinear();
  TensorJet P(n, kUlll);
  for (int h = 0; h < n; ++h) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const int dvar = literal ? k : j;
          const int last = literal ? j : i;
          Jet v = G(h, k, i).derivative(n + dvar) - e.delta(C(h, k, j), i);
          for (int r = 0; r < n; ++r) {
            v += G(r, k, i) * C(h, r, j) - C(r, k, j) * G(h, r, last) + N(r, i).derivative(n + j) * C(h, k, r);
          }
          P(h, k, i, j) = v.truncated(K - 4);
        }
      }
    }
  }
  return P;
}

}  // namespace

TensorJet hv_printed(const LocalExpansion& e) { return hv_generic(e, true); }
TensorJet hv(const LocalExpansion& e) { return hv_generic(e, false); }

TensorJet vv(const LocalExpansion& e) {
  const int n = e.dim();
  const auto& C = e.cartan_up();
  TensorJet Q(n, kUlll);
  for (int h = 0; h < n; ++h) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Jet v(0.0);
          for (int r = 0; r < n; ++r) v += C(h, r, j) * C(r, k, i) - C(h, r, i) * C(r, k, j);
          Q(h, k, i, j) = v;
        }
      }
    }
  }
  return Q;
}

TensorJet ricci(const TensorJet& rhh) {
  const int n = rhh.dim();
  TensorJet R(n, lower(2));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet v(0.0);
      for (int l = 0; l < n; ++l) v += rhh(l, i, l, j);
      R(i, j) = v;
    }
  }
  return R;
}

}  // namespace curv

namespace {

TensorValue val(const TensorJet& t, const TangentPoint& z) { return TensorValue::from_jets(t, z); }

void check_flag_agreement(const TensorValue& a, const TensorValue& b) {
  const double d = max_abs_diff(a, b);
  if (d > 1e-6 * (1.0 + std::max(a.max_abs(), b.max_abs()))) {
    throw Error(ErrorKind::DomainError, "R^i_jk forms disagree by " + std::to_string(d));
  }
}

}  // namespace

CurvatureAtPoint curvature(const FinslerStructure& s, const TangentPoint& z) {
  const LocalExpansion e(s, z, 4);
  const TensorJet rhh = curv::hh(e);
  return {val(rhh, z),
          val(curv::hv(e), z),
          val(curv::hv_printed(e), z),
          val(curv::vv(e), z),
          val(curv::flag(e), z),
          val(curv::flag_contracted(e, rhh), z),
          val(curv::ricci(rhh), z),
          z};
}

TensorValue hh_curvature(const FinslerStructure& s, const TangentPoint& z) {
  return val(curv::hh(LocalExpansion(s, z, 4)), z);
}

TensorValue flag_curvature_tensor(const FinslerStructure& s, const TangentPoint& z) {
  const LocalExpansion e(s, z, 4);
  const TensorValue a = val(curv::flag(e), z);
  check_flag_agreement(a, val(curv::flag_contracted(e, curv::hh(e)), z));
  return a;
}

TensorValue hv_curvature(const FinslerStructure& s, const TangentPoint& z) {
  return val(curv::hv(LocalExpansion(s, z, 4)), z);
}

TensorValue hv_curvature_printed(const FinslerStructure& s, const TangentPoint& z) {
  return val(curv::hv_printed(LocalExpansion(s, z, 4)), z);
}

TensorValue vv_curvature(const FinslerStructure& s, const TangentPoint& z) {
  return val(curv::vv(LocalExpansion(s, z, 3)), z);
}

TensorValue ricci_trace(const FinslerStructure& s, const TangentPoint& z) {
  return val(curv::ricci(curv::hh(LocalExpansion(s, z, 4))), z);
}

TensorJet ricci_identity_residual(const LocalExpansion& e, const TensorJet& X2) {
  const int n = e.dim();
  if (X2.variance() != upper(1)) throw Error(ErrorKind::DomainError, "Ricci identity expects a vector field");
  const TensorJet A = e.hcov(e.hcov(X2));
  const TensorJet V = e.vcov(X2);
  const TensorJet rhh = curv::hh(e);
  const TensorJet rf = curv::flag(e);
  TensorJet out(n, {Slot::Upper, Slot::Lower, Slot::Lower});
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      for (int h = 0; h < n; ++h) {
        Jet v = A(i, h, k) - A(i, k, h);
        for (int r = 0; r < n; ++r) v += V(i, r) * rf(r, k, h) - X2(r) * rhh(i, r, k, h);
        out(i, k, h) = v.truncated(0);
      }
    }
  }
  return out;
}

TensorValue ricci_identity_residual(const FinslerStructure& s, const TensorField& X, const TangentPoint& z) {
  const LocalExpansion e(s, z, std::max(4, expansion_order_for(X, 2)));
  return val(ricci_identity_residual(e, X.evaluate(e, 2)), z);
}

}  // namespace finsler
