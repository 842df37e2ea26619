#include "finsler/forms.hpp"

#include <algorithm>
#include <memory>

#include "finsler/curvature.hpp"
#include "finsler/error.hpp"

namespace finsler {

std::vector<std::vector<int>> increasing_indices(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) idx[k] = k;
  if (p > n) return out;
  while (true) {
    out.push_back(idx);
    int k = p - 1;
    while (k >= 0 && idx[k] == n - p + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int m = k + 1; m < p; ++m) idx[m] = idx[m - 1] + 1;
  }
  return out;
}

namespace {

struct SlotEntry {
  int independent;  // -1 for repeated indices
  int sign;
};

// Flat index of a full antisymmetric array -> (independent component, sign).
std::vector<SlotEntry> antisymmetric_table(int n, int p) {
  const auto inc = increasing_indices(n, p);
  const IndexLayout layout(n, p);
  std::vector<SlotEntry> table(layout.size(), {-1, 0});
  for (std::size_t f = 0; f < layout.size(); ++f) {
    auto idx = layout.unflatten(f);
    int sign = 1;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (idx[a] == idx[b]) sign = 0;
        if (idx[a] > idx[b]) sign = -sign;
      }
    }
    if (sign == 0) continue;
    std::sort(idx.begin(), idx.end());
    const auto it = std::find(inc.begin(), inc.end(), idx);
    table[f] = {static_cast<int>(it - inc.begin()), sign};
  }
  return table;
}

double factorial(int p) {
  double f = 1.0;
  for (int k = 2; k <= p; ++k) f *= k;
  return f;
}

// Raise every slot of a lower tensor with g^ij.
TensorJet raise_all(const LocalExpansion& e, const TensorJet& a, int order) {
  const int n = a.dim();
  const int p = a.rank();
  const TensorJet& ginv = e.ginv();
  TensorJet cur = a.order() > order ? a.truncated(order) : a;
  std::vector<std::size_t> stride(static_cast<std::size_t>(p));
  std::size_t st = 1;
  for (int r = p - 1; r >= 0; --r) {
    stride[r] = st;
    st *= static_cast<std::size_t>(n);
  }
  for (int slot = 0; slot < p; ++slot) {
    TensorJet next(n, a.variance());
    for (std::size_t f = 0; f < cur.size(); ++f) {
      const int i = static_cast<int>((f / stride[slot]) % static_cast<std::size_t>(n));
      const std::size_t base = f - static_cast<std::size_t>(i) * stride[slot];
      Jet v(0.0);
      for (int j = 0; j < n; ++j) v.add_product(ginv(i, j), cur[base + static_cast<std::size_t>(j) * stride[slot]]);
      next[f] = std::move(v);
    }
    cur = std::move(next);
  }
  return cur;
}

void require_degree(const HorizontalForm& f, int lo, int hi, ErrorKind kind, const char* what) {
  if (f.degree < lo || f.degree > hi) {
    throw Error(kind, std::string(what) + ": form '" + f.label + "' has degree " + std::to_string(f.degree));
  }
}

void check_dim(const FinslerStructure& s, const HorizontalForm& f) {
  if (f.dim != s.dim()) throw Error(ErrorKind::DomainError, "form dimension does not match structure");
}

HorizontalForm make_form(int dim, int degree, int depth, std::string label,
                         std::function<TensorJet(const LocalExpansion&, int)> eval) {
  HorizontalForm f;
  f.dim = dim;
  f.degree = degree;
  f.label = std::move(label);
  f.coeffs.variance = lower(degree);
  f.coeffs.geometry_depth = depth;
  f.coeffs.label = f.label;
  f.coeffs.evaluate = std::move(eval);
  return f;
}

std::vector<Jet> base_values(const VectorField& X, const LocalExpansion& e, int order) {
  auto v = X.components(e.xs(order));
  if (static_cast<int>(v.size()) != X.dim) throw Error(ErrorKind::DomainError, "vector field component count");
  return v;
}

TensorJet vector_jet(const VectorField& X, const LocalExpansion& e, int order) {
  TensorJet t(X.dim, upper(1));
  auto v = base_values(X, e, order);
  for (int i = 0; i < X.dim; ++i) t(i) = v[i];
  return t;
}

TensorJet lowered_jet(const VectorField& X, const LocalExpansion& e, int order) {
  const auto v = base_values(X, e, order);
  const int n = X.dim;
  TensorJet t(n, lower(1));
  for (int i = 0; i < n; ++i) {
    Jet s(0.0);
    for (int j = 0; j < n; ++j) s.add_product(e.g()(i, j), v[j]);
    s = s.truncated(order);
    t(i) = s;
  }
  return t;
}

}  // namespace

HorizontalForm HorizontalForm::from_components(int dim, int degree, TensorField::Formula f, std::string label) {
  if (degree < 0 || degree > dim) throw Error(ErrorKind::DomainError, "form degree out of range");
  auto table = std::make_shared<const std::vector<SlotEntry>>(antisymmetric_table(dim, degree));
  const auto count = increasing_indices(dim, degree).size();
  return make_form(dim, degree, 0, label, [dim, degree, f = std::move(f), table, count](const LocalExpansion& e,
                                                                                        int order) {
    const auto comps = f(e.xs(order), e.unit_ys(order));
    if (comps.size() != count) throw Error(ErrorKind::DomainError, "form returned wrong component count");
    TensorJet t(dim, lower(degree));
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& s = (*table)[k];
      t[k] = s.independent < 0 ? Jet(0.0) : static_cast<double>(s.sign) * comps[static_cast<std::size_t>(s.independent)];
    }
    return t;
  });
}

HorizontalForm HorizontalForm::from_field(int degree, TensorField f, std::string label) {
  if (f.variance != lower(degree)) throw Error(ErrorKind::DomainError, "form field must be all-lower of its degree");
  HorizontalForm h;
  h.degree = degree;
  h.label = std::move(label);
  h.coeffs = std::move(f);
  return h;
}

TensorField VectorField::as_tensor() const {
  TensorField t;
  t.variance = upper(1);
  t.label = label;
  t.evaluate = [X = *this](const LocalExpansion& e, int order) { return vector_jet(X, e, order); };
  return t;
}

namespace forms {

TensorJet differential(const TensorJet& D, int degree) {
  const int n = D.dim();
  const int q = degree + 1;
  TensorJet out(n, lower(q));
  const IndexLayout layout(n, q);
  std::vector<int> src(static_cast<std::size_t>(q));
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto I = layout.unflatten(f);
    Jet v(0.0);
    for (int k = 0; k < q; ++k) {
      int m = 0;
      for (int a = 0; a < q; ++a) {
        if (a != k) src[m++] = I[a];
      }
      src[q - 1] = I[k];
      if (k % 2 == 0) {
        v += D.at(src);
      } else {
        v -= D.at(src);
      }
    }
    out[f] = std::move(v);
  }
  return out;
}

TensorJet codifferential(const LocalExpansion& e, const TensorJet& psi, const TensorJet& D) {
  const int n = psi.dim();
  const int p = psi.rank() - 1;
  const auto& J = e.landsberg_trace();
  const auto& ginv = e.ginv();
  TensorJet out(n, lower(p));
  const std::size_t inner = out.size();
  for (std::size_t f = 0; f < inner; ++f) {
    Jet v(0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t pj = static_cast<std::size_t>(j) * inner + f;
        v.add_product(ginv(i, j), D[pj * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)], -1.0);
        v.add_product(ginv(i, j), psi[pj] * J(i));
      }
    }
    out[f] = std::move(v);
  }
  return out;
}

Jet inner(const LocalExpansion& e, const TensorJet& a, const TensorJet& b, int order) {
  if (a.rank() != b.rank()) throw Error(ErrorKind::DegreeMismatch, "inner product of forms of different degree");
  const TensorJet up = raise_all(e, a, order);
  Jet s(0.0);
  for (std::size_t f = 0; f < up.size(); ++f) s.add_product(up[f], b[f]);
  return s.truncated(order) * (1.0 / factorial(a.rank()));
}

Jet norm_squared(const LocalExpansion& e, const TensorJet& a, int order) { return inner(e, a, a, order); }

EnergyTerms energy_terms(const LocalExpansion& e, const VectorField& X) {
  const int n = e.dim();
  const TensorJet Xu = vector_jet(X, e, 2);
  const TensorJet Xl = lowered_jet(X, e, 2);
  const TensorJet DXu = e.hcov(Xu);  // DXu(j, k) = grad_k X^j
  const TensorJet DXl = e.hcov(Xl);  // DXl(j, k) = grad_k X_j
  const TensorJet AXu = e.hcov(DXu);
  const auto& J = e.landsberg_trace();
  const auto& ginv = e.ginv();

  Jet div(0.0);
  for (int j = 0; j < n; ++j) div += DXu(j, j);
  TensorJet Y(n, lower(1));
  TensorJet Z(n, lower(1));
  for (int i = 0; i < n; ++i) {
    Jet y(0.0);
    for (int k = 0; k < n; ++k) y += Xu(k) * DXl(i, k);
    Y(i) = y;
    Z(i) = Xl(i) * div;
  }
  const double dY = codifferential(e, Y, e.hcov(Y))[0].value();
  const double dZ = codifferential(e, Z, e.hcov(Z))[0].value();

  auto v = [](const Jet& j) { return j.value(); };
  double XJ = 0.0;
  for (int j = 0; j < n; ++j) XJ += v(Xu(j)) * v(J(j));
  const double divv = v(div);
  const double deltaX = -(divv - XJ);
  double rhs = divv * deltaX;
  double cross = 0.0;
  double landsberg = 0.0;
  for (int k = 0; k < n; ++k) {
    double comm = 0.0;
    for (int j = 0; j < n; ++j) {
      comm += v(AXu(j, k, j)) - v(AXu(j, j, k));
      cross += v(DXu(k, j)) * v(DXu(j, k));
      landsberg += v(Xu(k)) * v(DXu(j, k)) * v(J(j));
    }
    rhs += v(Xu(k)) * comm;
  }
  rhs += cross - landsberg;

  double grad2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < n; ++a) grad2 += v(DXl(j, i)) * v(ginv(i, a)) * v(DXu(j, a));
    }
  }
  TensorJet dX(n, lower(2));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) dX(i, j) = DXl(j, i) - DXl(i, j);
  }
  // 1/4 dX_ij dX^ij = (1/2) * inner(dX, dX) with the 1/p! convention.
  const double dH2 = 0.5 * inner(e, dX, dX, 0).value();

  const TensorJet ric = curv::ricci(curv::hh(e));
  const TensorJet rf = curv::flag(e);
  const TensorJet V = e.vcov(Xu);  // V(j, r) = vgrad_r X^j
  double K = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int t = 0; t < n; ++t) K += v(Xu(k)) * v(Xu(t)) * v(ric(t, k));
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < n; ++j) K -= v(Xu(k)) * v(V(j, r)) * v(rf(r, j, k));
    }
  }
  K -= landsberg;
  return {dZ - dY, rhs, cross, grad2, dH2, K};
}

}  // namespace forms

HorizontalForm horizontal_differential(const FinslerStructure& s, const HorizontalForm& phi) {
  check_dim(s, phi);
  require_degree(phi, 0, phi.dim - 1, ErrorKind::DegreeOverflow, "d_H");
  const int p = phi.degree;
  return make_form(phi.dim, p + 1, std::max(phi.geometry_depth() + 1, 3), "d(" + phi.label + ")",
                   [phi, p](const LocalExpansion& e, int order) {
                     return forms::differential(e.hcov(phi.evaluate(e, order + 1)), p).truncated(order);
                   });
}

HorizontalForm horizontal_codifferential(const FinslerStructure& s, const HorizontalForm& psi) {
  check_dim(s, psi);
  require_degree(psi, 1, psi.dim, ErrorKind::DegreeUnderflow, "delta_H");
  return make_form(psi.dim, psi.degree - 1, std::max(psi.geometry_depth() + 1, 4), "delta(" + psi.label + ")",
                   [psi](const LocalExpansion& e, int order) {
                     const TensorJet P = psi.evaluate(e, order + 1);
                     return forms::codifferential(e, P, e.hcov(P)).truncated(order);
                   });
}

HorizontalForm horizontal_laplacian(const FinslerStructure& s, const HorizontalForm& phi) {
  check_dim(s, phi);
  const int p = phi.degree;
  std::vector<HorizontalForm> parts;
  if (p < phi.dim) parts.push_back(horizontal_codifferential(s, horizontal_differential(s, phi)));
  if (p > 0) parts.push_back(horizontal_differential(s, horizontal_codifferential(s, phi)));
  int depth = 0;
  for (const auto& f : parts) depth = std::max(depth, f.geometry_depth());
  return make_form(phi.dim, p, depth, "Delta(" + phi.label + ")", [parts](const LocalExpansion& e, int order) {
    TensorJet t = parts[0].evaluate(e, order);
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const TensorJet u = parts[k].evaluate(e, order);
      for (std::size_t f = 0; f < t.size(); ++f) t[f] += u[f];
    }
    return t;
  });
}

HorizontalForm laplacian_expansion_p(const FinslerStructure& s, const HorizontalForm& phi) {
  check_dim(s, phi);
  require_degree(phi, 1, phi.dim, ErrorKind::DegreeUnderflow, "Laplacian expansion");
  const int p = phi.degree;
  const int n = phi.dim;
  return make_form(n, p, std::max(phi.geometry_depth() + 2, 5), "DeltaX(" + phi.label + ")",
                   [phi, p, n](const LocalExpansion& e, int order) {
                     const TensorJet P = phi.evaluate(e, order + 2);
                     const TensorJet D = e.hcov(P);  // D(I, s) = grad_s phi_I
                     const TensorJet A = e.hcov(D);  // A(I, s, r) = grad_r grad_s phi_I
                     const TensorJet J = e.landsberg_trace();
                     const TensorJet dJ = e.hcov(J);  // dJ(r, i) = grad_i J_r
                     const TensorJet ginv = e.ginv().truncated(order);
                     const IndexLayout layout(n, p);
                     TensorJet out(n, lower(p));
                     std::vector<int> idx(static_cast<std::size_t>(p + 2));
                     for (std::size_t f = 0; f < out.size(); ++f) {
                       const auto I = layout.unflatten(f);
                       Jet v(0.0);
                       for (int r = 0; r < n; ++r) {
                         for (int s2 = 0; s2 < n; ++s2) {
                           const Jet& g = ginv(r, s2);
                           std::copy(I.begin(), I.end(), idx.begin());
                           idx[p] = s2;
                           idx[p + 1] = r;
                           Jet term = A.at(idx) - D.at(std::span<const int>(idx.data(), p + 1)) * J(r);
                           for (int k = 0; k < p; ++k) {
                             std::copy(I.begin(), I.end(), idx.begin());
                             idx[k] = s2;
                             idx[p] = I[k];
                             idx[p + 1] = r;
                             term -= A.at(idx);
                             idx[p] = r;
                             idx[p + 1] = I[k];
                             term += A.at(idx);
                             term -= P.at(std::span<const int>(idx.data(), p)) * dJ(r, I[k]);
                           }
                           v -= g * term;
                         }
                       }
                       out[f] = v.truncated(order);
                     }
                     return out;
                   });
}

TensorValue form_values(const FinslerStructure& s, const HorizontalForm& phi, const TangentPoint& z) {
  check_dim(s, phi);
  const LocalExpansion e(s, z, std::max(2, phi.geometry_depth()));
  return TensorValue::from_jets(phi.evaluate(e, 0), z);
}

double pointwise_inner(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& psi,
                       const TangentPoint& z) {
  check_dim(s, phi);
  check_dim(s, psi);
  if (phi.degree != psi.degree) throw Error(ErrorKind::DegreeMismatch, "inner product of forms of different degree");
  const LocalExpansion e(s, z, std::max({2, phi.geometry_depth(), psi.geometry_depth()}));
  return forms::inner(e, phi.evaluate(e, 0), psi.evaluate(e, 0), 0).value();
}

AssociatedForm associate_one_form(const FinslerStructure& s, const VectorField& X) {
  if (X.dim != s.dim()) throw Error(ErrorKind::DomainError, "vector field dimension does not match structure");
  AssociatedForm a;
  a.source = X;
  a.horizontal = make_form(X.dim, 1, 2, "flat(" + X.label + ")",
                           [X](const LocalExpansion& e, int order) { return lowered_jet(X, e, order); });
  a.vertical.variance = lower(1);
  a.vertical.geometry_depth = 3;
  a.vertical.label = "vert(" + X.label + ")";
  a.vertical.evaluate = [X](const LocalExpansion& e, int order) {
    const int n = X.dim;
    const TensorJet Xl = lowered_jet(X, e, order + 1);
    const TensorJet n0 = e.nabla0(Xl);
    TensorJet yX(n, {});
    Jet s(0.0);
    for (int j = 0; j < n; ++j) s += e.y(j, order + 1) * Xl(j);
    yX[0] = s;
    const Jet n0s = e.nabla0(yX)[0];
    const Jet F = e.norm().truncated(order);
    const Jet invF = reciprocal(F);
    TensorJet out(n, lower(1));
    for (int i = 0; i < n; ++i) {
      Jet yl(0.0);
      for (int j = 0; j < n; ++j) yl += e.g()(i, j).truncated(order) * e.y(j, order);
      out(i) = ((n0(i) - yl * n0s * invF * invF) * invF).truncated(order);
    }
    return out;
  };
  return a;
}

TensorValue weitzenbock_residual(const FinslerStructure& s, const VectorField& X, const TangentPoint& z) {
  const int n = s.dim();
  const LocalExpansion e(s, z, 5);
  const TensorJet Xu = vector_jet(X, e, 1);
  const TensorJet phi = lowered_jet(X, e, 2);
  const TensorJet D = e.hcov(phi);  // D(i, s) = grad_s phi_i
  const TensorJet A = e.hcov(D);    // A(i, s, r)
  const TensorJet& J = e.landsberg_trace();
  const TensorJet dJ = e.hcov(J);
  const TensorJet ric = curv::ricci(curv::hh(e));
  const TensorJet rf = curv::flag(e);
  const TensorJet V = e.vcov(Xu);  // V(r, t) = vgrad_t X^r
  const auto& ginv = e.ginv();
  TensorJet out(n, lower(1));
  for (int i = 0; i < n; ++i) {
    Jet v(0.0);
    for (int r = 0; r < n; ++r) {
      for (int s2 = 0; s2 < n; ++s2) v += ginv(r, s2) * (A(i, s2, r) - D(i, s2) * J(r));
    }
    for (int t = 0; t < n; ++t) {
      v -= Xu(t) * ric(t, i);
      for (int r = 0; r < n; ++r) v += V(r, t) * rf(t, r, i);
    }
    for (int r = 0; r < n; ++r) v -= Xu(r) * dJ(r, i);
    out(i) = v.truncated(0);
  }
  return TensorValue::from_jets(out, z);
}

double k_scalar(const FinslerStructure& s, const VectorField& X, const TangentPoint& z) {
  return forms::energy_terms(LocalExpansion(s, z, 4), X).K;
}

EnergyResidual energy_identity_residual(const FinslerStructure& s, const VectorField& X, const TangentPoint& z) {
  const auto t = forms::energy_terms(LocalExpansion(s, z, 4), X);
  return {t.dZ_minus_dY - t.rhs, t.cross - t.grad_norm2 + 2.0 * t.dH_norm2};
}

}  // namespace finsler
