#include "finsler/metric.hpp"

#include <cmath>

#include "finsler/error.hpp"

namespace finsler {

std::vector<double> invert_spd(std::span<const double> a, int n) {
  const auto N = static_cast<std::size_t>(n);
  // Cholesky a = L L^T.
  std::vector<double> L(N * N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    double d = a[j * N + j];
    for (std::size_t k = 0; k < j; ++k) d -= L[j * N + k] * L[j * N + k];
    if (!(d > kCholeskyPivot)) throw Error(ErrorKind::NotPositiveDefinite, "Cholesky pivot " + std::to_string(d));
    L[j * N + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < N; ++i) {
      double s = a[i * N + j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i * N + k] * L[j * N + k];
      L[i * N + j] = s / L[j * N + j];
    }
  }
  // Solve for each unit vector.
  std::vector<double> inv(N * N, 0.0);
  std::vector<double> w(N);
  for (std::size_t c = 0; c < N; ++c) {
    for (std::size_t i = 0; i < N; ++i) {
      double s = i == c ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= L[i * N + k] * w[k];
      w[i] = s / L[i * N + i];
    }
    for (std::size_t ii = N; ii-- > 0;) {
      double s = w[ii];
      for (std::size_t k = ii + 1; k < N; ++k) s -= L[k * N + ii] * inv[k * N + c];
      inv[ii * N + c] = s / L[ii * N + ii];
    }
  }
  return inv;
}

TensorJet invert_jets(const TensorJet& m) {
  const int n = m.dim();
  TensorJet a = m;
  TensorJet inv(n, {Slot::Upper, Slot::Upper});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) inv(i, j) = Jet(i == j ? 1.0 : 0.0);
  }
  for (int p = 0; p < n; ++p) {
    if (std::abs(a(p, p).value()) < kCholeskyPivot) throw Error(ErrorKind::Singular, "singular jet matrix");
    const Jet r = reciprocal(a(p, p));
    for (int j = 0; j < n; ++j) {
      a(p, j) = a(p, j) * r;
      inv(p, j) = inv(p, j) * r;
    }
    for (int i = 0; i < n; ++i) {
      if (i == p) continue;
      const Jet f = a(i, p);
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(p, j);
        inv(i, j) -= f * inv(p, j);
      }
    }
  }
  return inv;
}

MetricJets MetricJets::from_norm_squared(const Jet& f2, int n) {
  MetricJets m;
  const int K = f2.order();
  m.f2 = f2;
  m.f = sqrt(f2);
  m.hilbert = TensorJet(n, lower(1));
  for (int i = 0; i < n; ++i) m.hilbert(i) = m.f.derivative(n + i);

  m.g = TensorJet(n, lower(2));
  std::vector<Jet> dy(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dy[i] = f2.derivative(n + i);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m.g(i, j) = 0.5 * dy[i].derivative(n + j);
      m.g(j, i) = m.g(i, j);
    }
  }
  std::vector<double> gv(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n * n; ++k) gv[k] = m.g[static_cast<std::size_t>(k)].value();
  invert_spd(gv, n);  // positive-definiteness gate
  m.ginv = invert_jets(m.g);
  if (K < 3) return m;

  m.cartan = TensorJet(n, lower(3));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        m.cartan(k, i, j) = 0.5 * m.g(i, j).derivative(n + k);
        m.cartan(k, j, i) = m.cartan(k, i, j);
      }
    }
  }
  m.cartan_up = TensorJet(n, {Slot::Upper, Slot::Lower, Slot::Lower});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Jet s(0.0);
        for (int l = 0; l < n; ++l) s += m.ginv(i, l) * m.cartan(l, j, k);
        m.cartan_up(i, j, k) = s;
      }
    }
  }
  m.trace = TensorJet(n, lower(1));
  for (int j = 0; j < n; ++j) {
    Jet s(0.0);
    for (int i = 0; i < n; ++i) s += m.cartan_up(i, i, j);
    m.trace(j) = s;
  }
  return m;
}

namespace {

MetricJets metric_at(const FinslerStructure& s, const TangentPoint& z, int order) {
  eval_F(s, z.x, z.y);  // chart and zero-vector gates
  const int n = s.dim();
  const auto& sp = JetSpace::get(2 * n, order);
  std::vector<Jet> x, y;
  for (int i = 0; i < n; ++i) x.push_back(Jet::variable(sp, order, i, z.x[i]));
  for (int i = 0; i < n; ++i) y.push_back(Jet::variable(sp, order, n + i, z.y[i]));
  return MetricJets::from_norm_squared(s.norm_squared(x, y), n);
}

}  // namespace

double eval_F(const FinslerStructure& s, std::span<const double> x, std::span<const double> y) {
  return s.norm(x, y);
}

TensorValue fundamental_tensor(const FinslerStructure& s, const TangentPoint& z) {
  return TensorValue::from_jets(metric_at(s, z, 2).g, z);
}

TensorValue inverse_metric(const FinslerStructure& s, const TangentPoint& z) {
  return TensorValue::from_jets(metric_at(s, z, 2).ginv, z);
}

TensorValue cartan_tensor(const FinslerStructure& s, const TangentPoint& z) {
  return TensorValue::from_jets(metric_at(s, z, 3).cartan, z);
}

TensorValue cartan_trace(const FinslerStructure& s, const TangentPoint& z) {
  return TensorValue::from_jets(metric_at(s, z, 3).trace, z);
}

TensorValue hilbert_form(const FinslerStructure& s, const TangentPoint& z) {
  return TensorValue::from_jets(metric_at(s, z, 2).hilbert, z);
}

SpherePoint normalize_to_indicatrix(const FinslerStructure& s, std::span<const double> x,
                                    std::span<const double> u) {
  const double f = s.norm(x, u);
  TangentPoint z{{x.begin(), x.end()}, {u.begin(), u.end()}};
  for (auto& v : z.y) v /= f;
  return SpherePoint(std::move(z));
}

}  // namespace finsler
