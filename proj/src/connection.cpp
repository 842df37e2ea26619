#include "finsler/connection.hpp"

#include <algorithm>
#include <cmath>

#include <boost/container/small_vector.hpp>

#include "finsler/error.hpp"
#include "finsler/jets.hpp"

namespace finsler {

struct LocalExpansion::Tower {
  FinslerStructure structure;
  int n;
  int K;
  const JetSpace* space;
  std::vector<double> x0;
  std::vector<double> y0;
  MetricJets metric;
  TensorJet spray;
  TensorJet nonlinear;
  TensorJet gamma;
  TensorJet landsberg;
  std::vector<Jet> unit_y;
  bool nonlinear_zero = false;
  bool gamma_zero = false;
};

namespace {

struct Strides {
  std::vector<std::size_t> s;
  explicit Strides(const TensorJet& t) : s(static_cast<std::size_t>(t.rank())) {
    std::size_t st = 1;
    for (int r = t.rank() - 1; r >= 0; --r) {
      s[static_cast<std::size_t>(r)] = st;
      st *= static_cast<std::size_t>(t.dim());
    }
  }
  int digit(std::size_t f, int slot, int n) const {
    return static_cast<int>((f / s[static_cast<std::size_t>(slot)]) % static_cast<std::size_t>(n));
  }
  std::size_t replace(std::size_t f, int slot, int from, int to) const {
    return f + (static_cast<std::size_t>(to) - static_cast<std::size_t>(from)) * s[static_cast<std::size_t>(slot)];
  }
};

using JetRow = boost::container::small_vector<Jet, 3>;

bool all_zero(const TensorJet& t) {
  for (std::size_t f = 0; f < t.size(); ++f) {
    for (std::size_t i = 0; i < t[f].size(); ++i) {
      if (t[f][i] != 0.0) return false;
    }
  }
  return true;
}

Variance appended(Variance v) {
  v.push_back(Slot::Lower);
  return v;
}

// Covariant derivative with connection coefficients coef(i, j, h) = {Gamma or C}^i_jh
// and base derivative d(component, h).
template <class BaseDerivative>
TensorJet covariant(const TensorJet& t, const TensorJet& coef, bool coef_zero, BaseDerivative&& d) {
  const int n = t.dim();
  const int r = coef_zero ? 0 : t.rank();
  TensorJet out(n, appended(t.variance()));
  const Strides st(t);
  for (std::size_t f = 0; f < t.size(); ++f) {
    JetRow base = d(t[f]);
    for (int h = 0; h < n; ++h) {
      Jet v = std::move(base[static_cast<std::size_t>(h)]);
      for (int slot = 0; slot < r; ++slot) {
        const int a = st.digit(f, slot, n);
        for (int p = 0; p < n; ++p) {
          const Jet& other = t[st.replace(f, slot, a, p)];
          if (t.variance()[static_cast<std::size_t>(slot)] == Slot::Upper) {
            v.add_product(coef(a, p, h), other);
          } else {
            v.add_product(coef(p, a, h), other, -1.0);
          }
        }
      }
      out[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(h)] = std::move(v);
    }
  }
  return out;
}

JetRow deltas(const Jet& f, const TensorJet& N, int n, bool N_zero = false) {
  JetRow out(static_cast<std::size_t>(n), Jet(0.0));
  if (f.is_constant()) return out;
  if (N_zero) {
    for (int i = 0; i < n; ++i) out[i] = f.derivative(i);
    return out;
  }
  JetRow dy(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) dy[j] = f.derivative(n + j);
  for (int i = 0; i < n; ++i) {
    Jet v = f.derivative(i);
    for (int j = 0; j < n; ++j) v.add_product(N(j, i), dy[j], -1.0);
    out[i] = std::move(v);
  }
  return out;
}

}  // namespace

LocalExpansion::LocalExpansion(const FinslerStructure& s, const TangentPoint& z, int order) : z_(z) {
  s.norm(z.x, z.y);  // chart and zero-vector gates
  const int n = s.dim();
  if (order < 2) throw Error(ErrorKind::DomainError, "expansion order must be >= 2");
  auto tw = std::make_shared<Tower>(Tower{s, n, order, &JetSpace::get(2 * n, order), z.x, z.y, {}, {}, {}, {}, {}, {}});
  const int K = order;
  const auto& sp = *tw->space;
  std::vector<Jet> x, y;
  for (int i = 0; i < n; ++i) x.push_back(Jet::variable(sp, K, i, z.x[i]));
  for (int i = 0; i < n; ++i) y.push_back(Jet::variable(sp, K, n + i, z.y[i]));
  const Jet f2 = s.norm_squared(x, y);
  tw->metric = MetricJets::from_norm_squared(f2, n);
  const auto& ginv = tw->metric.ginv;
  {
    const Jet inv = reciprocal(tw->metric.f);
    for (int i = 0; i < n; ++i) tw->unit_y.push_back(y[i] * inv);
  }

  // G^i = 1/4 g^ih (d^2 F^2 / dy^h dx^j y^j - d F^2 / dx^h)
  std::vector<Jet> inner(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) {
    const Jet dyh = f2.derivative(n + h);
    Jet v = -f2.derivative(h);
    for (int j = 0; j < n; ++j) v += dyh.derivative(j) * y[j];
    inner[h] = std::move(v);
  }
  tw->spray = TensorJet(n, upper(1));
  for (int i = 0; i < n; ++i) {
    Jet v(0.0);
    for (int h = 0; h < n; ++h) v += ginv(i, h) * inner[h];
    tw->spray(i) = 0.25 * v;
  }

  if (K >= 3) {
    tw->nonlinear = TensorJet(n, {Slot::Upper, Slot::Lower});
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) tw->nonlinear(i, j) = tw->spray(i).derivative(n + j);
    }
    // dg(k, i, j) = delta_k g_ij
    const auto& g = tw->metric.g;
    TensorJet dg(n, lower(3));
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        auto d = deltas(g(i, j), tw->nonlinear, n);
        for (int k = 0; k < n; ++k) {
          dg(k, i, j) = d[k];
          dg(k, j, i) = d[k];
        }
      }
    }
    tw->gamma = TensorJet(n, {Slot::Upper, Slot::Lower, Slot::Lower});
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        JetRow lowered(static_cast<std::size_t>(n));
        for (int l = 0; l < n; ++l) lowered[l] = dg(j, l, k) + dg(k, j, l) - dg(l, j, k);
        for (int i = 0; i < n; ++i) {
          Jet v(0.0);
          for (int l = 0; l < n; ++l) v += ginv(i, l) * lowered[l];
          tw->gamma(i, j, k) = 0.5 * v;
          tw->gamma(i, k, j) = tw->gamma(i, j, k);
        }
      }
    }
    tw->nonlinear_zero = all_zero(tw->nonlinear);
    tw->gamma_zero = all_zero(tw->gamma);
  }
  tower_ = tw;
  if (K >= 4) {
    const TensorJet dT = hcov(tw->metric.trace);
    TensorJet J(n, lower(1));
    for (int j = 0; j < n; ++j) {
      Jet v(0.0);
      for (int h = 0; h < n; ++h) v += y[h] * dT(j, h);
      J(j) = v.truncated(K - 4);
    }
    tw->landsberg = std::move(J);
  }
}

LocalExpansion::LocalExpansion(std::shared_ptr<const Tower> tower, TangentPoint z)
    : tower_(std::move(tower)), z_(std::move(z)) {}

LocalExpansion LocalExpansion::rebased(const TangentPoint& z) const {
  const auto& s = tower_->structure;
  if (z.y != tower_->y0) throw Error(ErrorKind::DomainError, "rebasing an expansion to a different direction");
  for (int a = 0; a < tower_->n; ++a) {
    if (z.x[a] != tower_->x0[a] && !s.invariant_along(a)) {
      throw Error(ErrorKind::DomainError, "rebasing an expansion along an axis F depends on");
    }
  }
  s.check_in_chart(z.x);
  return LocalExpansion(tower_, z);
}

const FinslerStructure& LocalExpansion::structure() const { return tower_->structure; }
int LocalExpansion::dim() const { return tower_->n; }
int LocalExpansion::order() const { return tower_->K; }
const JetSpace& LocalExpansion::space() const { return *tower_->space; }

void LocalExpansion::require(int needed, const char* what) const {
  if (tower_->K < needed) {
    throw Error(ErrorKind::DomainError, std::string(what) + " needs expansion order " + std::to_string(needed) +
                                            ", have " + std::to_string(tower_->K));
  }
}

Jet LocalExpansion::x(int i, int order) const {
  return Jet::variable(*tower_->space, std::min(order, tower_->K), i, z_.x[static_cast<std::size_t>(i)]);
}

Jet LocalExpansion::y(int i, int order) const {
  return Jet::variable(*tower_->space, std::min(order, tower_->K), tower_->n + i, z_.y[static_cast<std::size_t>(i)]);
}

std::vector<Jet> LocalExpansion::xs(int order) const {
  std::vector<Jet> v;
  v.reserve(static_cast<std::size_t>(tower_->n));
  for (int i = 0; i < tower_->n; ++i) v.push_back(x(i, order));
  return v;
}

std::vector<Jet> LocalExpansion::ys(int order) const {
  std::vector<Jet> v;
  v.reserve(static_cast<std::size_t>(tower_->n));
  for (int i = 0; i < tower_->n; ++i) v.push_back(y(i, order));
  return v;
}

std::vector<Jet> LocalExpansion::unit_ys(int order) const {
  if (order >= tower_->K) return tower_->unit_y;
  std::vector<Jet> v;
  v.reserve(tower_->unit_y.size());
  for (const auto& u : tower_->unit_y) v.push_back(u.truncated(order));
  return v;
}

const Jet& LocalExpansion::norm_squared() const { return tower_->metric.f2; }
const Jet& LocalExpansion::norm() const { return tower_->metric.f; }
const MetricJets& LocalExpansion::metric() const { return tower_->metric; }
const TensorJet& LocalExpansion::spray() const { return tower_->spray; }

const TensorJet& LocalExpansion::nonlinear() const {
  require(3, "nonlinear connection");
  return tower_->nonlinear;
}

const TensorJet& LocalExpansion::gamma() const {
  require(3, "Cartan coefficients");
  return tower_->gamma;
}

const TensorJet& LocalExpansion::cartan_up() const {
  require(3, "Cartan tensor");
  return tower_->metric.cartan_up;
}

const TensorJet& LocalExpansion::cartan_trace() const {
  require(3, "Cartan trace");
  return tower_->metric.trace;
}

const TensorJet& LocalExpansion::landsberg_trace() const {
  require(4, "grad_0 T");
  return tower_->landsberg;
}

Jet LocalExpansion::delta(const Jet& f, int i) const {
  return deltas(f, nonlinear(), tower_->n)[static_cast<std::size_t>(i)];
}

TensorJet LocalExpansion::hcov(const TensorJet& t) const {
  const auto& N = nonlinear();
  const int n = tower_->n;
  const bool nz = tower_->nonlinear_zero;
  return covariant(t, gamma(), tower_->gamma_zero, [&](const Jet& f) { return deltas(f, N, n, nz); });
}

TensorJet LocalExpansion::vcov(const TensorJet& t) const {
  const int n = tower_->n;
  return covariant(t, cartan_up(), false, [&](const Jet& f) {
    JetRow d(static_cast<std::size_t>(n), Jet(0.0));
    if (!f.is_constant()) {
      for (int h = 0; h < n; ++h) d[h] = f.derivative(n + h);
    }
    return d;
  });
}

TensorJet LocalExpansion::nabla0(const TensorJet& t) const {
  const TensorJet d = hcov(t);
  const int n = tower_->n;
  TensorJet out(n, t.variance());
  for (std::size_t f = 0; f < t.size(); ++f) {
    Jet v(0.0);
    for (int h = 0; h < n; ++h) v.add_product(y(h, tower_->K), d[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(h)]);
    out[f] = std::move(v);
  }
  return out;
}

TensorField TensorField::from_formula(int dim, Variance variance, Formula f, std::optional<int> homogeneity,
                                      std::string label) {
  TensorField t;
  t.variance = variance;
  t.label = std::move(label);
  t.evaluate = [dim, variance, f = std::move(f), homogeneity](const LocalExpansion& ctx, int order) {
    const auto x = ctx.xs(order);
    const auto y = homogeneity ? ctx.unit_ys(order) : ctx.ys(order);
    auto comps = f(x, y);
    TensorJet out(dim, variance);
    if (comps.size() != out.size()) throw Error(ErrorKind::DomainError, "field returned wrong component count");
    Jet scale(1.0);
    if (homogeneity && *homogeneity != 0) scale = pow(ctx.norm().truncated(order), *homogeneity);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = comps[k] * scale;
    return out;
  };
  return t;
}

TensorField TensorField::from_numeric(int dim, Variance variance, NumericFormula f, std::string label) {
  TensorField t;
  t.variance = variance;
  t.label = std::move(label);
  t.derivative_path = "fd";
  t.evaluate = [dim, variance, f = std::move(f)](const LocalExpansion& ctx, int order) {
    if (order > 2) throw Error(ErrorKind::OrderTooHigh, "finite-difference fields support jet order <= 2");
    const FinslerStructure& s = ctx.structure();
    const auto& z = ctx.point();
    TensorJet out(dim, variance);
    const auto& sp = ctx.space();
    for (std::size_t c = 0; c < out.size(); ++c) {
      JetRequest req;
      req.point = z;
      req.target = [&, c](std::span<const Jet> x, std::span<const Jet> y) {
        std::vector<double> xv, yv;
        for (const auto& j : x) xv.push_back(j.value());
        for (const auto& j : y) yv.push_back(j.value());
        const double fn = s.norm(xv, yv);
        for (auto& v : yv) v /= fn;
        return Jet(f(xv, yv)[c]);
      };
      Jet jet(sp, order);
      for (int idx = 0; idx < sp.size(order); ++idx) {
        const auto e = sp.exponents(idx);
        req.x_orders.assign(e.begin(), e.begin() + dim);
        req.y_orders.assign(e.begin() + dim, e.end());
        double fac = 1.0;
        for (auto k : e) {
          for (int m = 2; m <= k; ++m) fac *= m;
        }
        jet[static_cast<std::size_t>(idx)] = fd_partial(req, 1e-4) / fac;
      }
      out[c] = std::move(jet);
    }
    return out;
  };
  return t;
}

int expansion_order_for(const TensorField& field, int derivs) {
  return std::max({derivs + field.geometry_depth, derivs + 2, 2});
}

namespace {

TensorValue value(const TensorJet& t, const TangentPoint& z) { return TensorValue::from_jets(t, z); }

}  // namespace

TensorValue spray(const FinslerStructure& s, const TangentPoint& z) {
  return value(LocalExpansion(s, z, 2).spray(), z);
}

TensorValue nonlinear_connection(const FinslerStructure& s, const TangentPoint& z) {
  return value(LocalExpansion(s, z, 3).nonlinear(), z);
}

double delta_derivative(const FinslerStructure& s, const ScalarField& f, const TangentPoint& z, int axis) {
  if (axis < 0 || axis >= s.dim()) throw Error(ErrorKind::DomainError, "axis out of range");
  const LocalExpansion ctx(s, z, 3);
  return ctx.delta(f(ctx.xs(1), ctx.ys(1)), axis).value();
}

ConnectionAtPoint cartan_coefficients(const FinslerStructure& s, const TangentPoint& z) {
  const LocalExpansion ctx(s, z, 3);
  return {value(ctx.spray(), z), value(ctx.nonlinear(), z), value(ctx.gamma(), z), value(ctx.cartan_up(), z), z};
}

TensorValue h_covariant_derivative(const FinslerStructure& s, const TensorField& t, const TangentPoint& z) {
  const LocalExpansion ctx(s, z, expansion_order_for(t, 1));
  return value(ctx.hcov(t.evaluate(ctx, 1)), z);
}

TensorValue v_covariant_derivative(const FinslerStructure& s, const TensorField& t, const TangentPoint& z) {
  const LocalExpansion ctx(s, z, expansion_order_for(t, 1));
  return value(ctx.vcov(t.evaluate(ctx, 1)), z);
}

TensorValue nabla_0(const FinslerStructure& s, const TensorField& t, const TangentPoint& z) {
  const LocalExpansion ctx(s, z, expansion_order_for(t, 1));
  return value(ctx.nabla0(t.evaluate(ctx, 1)), z);
}

TensorField metric_field(int dim) {
  TensorField t;
  t.variance = lower(2);
  t.geometry_depth = 2;
  t.label = "g";
  t.evaluate = [](const LocalExpansion& ctx, int order) { return ctx.g().truncated(order); };
  (void)dim;
  return t;
}

TensorField hilbert_field(int dim) {
  TensorField t;
  t.variance = lower(1);
  t.geometry_depth = 1;
  t.label = "ell";
  t.evaluate = [](const LocalExpansion& ctx, int order) { return ctx.metric().hilbert.truncated(order); };
  (void)dim;
  return t;
}

TensorField cartan_trace_field(int dim) {
  TensorField t;
  t.variance = lower(1);
  t.geometry_depth = 3;
  t.label = "T";
  t.evaluate = [](const LocalExpansion& ctx, int order) { return ctx.cartan_trace().truncated(order); };
  (void)dim;
  return t;
}

TensorField kronecker_field(int dim) {
  TensorField t;
  t.variance = {Slot::Upper, Slot::Lower};
  t.label = "kronecker";
  t.evaluate = [dim](const LocalExpansion&, int) {
    TensorJet d(dim, {Slot::Upper, Slot::Lower});
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) d(i, j) = Jet(i == j ? 1.0 : 0.0);
    }
    return d;
  };
  return t;
}

}  // namespace finsler
