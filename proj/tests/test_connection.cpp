#include "doctest.h"

#include "support.hpp"

using namespace test;

namespace {

std::vector<TangentPoint> samples(const FinslerStructure& s, std::size_t n, std::uint64_t seed) {
  std::vector<TangentPoint> v;
  for (const auto& p : checks::random_points(s, n, seed)) v.push_back(p.tangent());
  return v;
}

TensorValue y_fd(const std::function<TensorValue(const TangentPoint&)>& f, TangentPoint z, int j, double h = 1e-5) {
  TangentPoint a = z, b = z;
  a.y[j] += h;
  b.y[j] -= h;
  TensorValue out = f(a);
  const TensorValue lo = f(b);
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] = (out.data[k] - lo.data[k]) / (2 * h);
  return out;
}

}  // namespace

TEST_CASE("spray") {
  for (const auto& s : {flat(), randers()}) {
    CHECK(max_abs(spray(s, at({0.4, 1.0}, {0.3, 0.7}))) == 0.0);
    CHECK(max_abs(nonlinear_connection(s, at({0.4, 1.0}, {0.3, 0.7}))) == 0.0);
  }
  for (const auto& z : samples(sphere(), 10, 3)) {
    const double th = z.x[0], yt = z.y[0], yp = z.y[1];
    const auto G = spray(sphere(), z);
    CHECK(std::abs(G(0) - 0.5 * (-std::sin(th) * std::cos(th)) * yp * yp) < 1e-8);
    CHECK(std::abs(G(1) - std::cos(th) / std::sin(th) * yt * yp) < 1e-8);
  }
  const auto s = builtins::metric("randers-wave");
  const auto z = at({0.3, 2.0}, {0.8, -0.5});
  auto z2 = z;
  for (auto& v : z2.y) v *= 2.0;
  const auto a = spray(s, z), b = spray(s, z2);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(b(i) - 4 * a(i)) < 1e-10);
}

TEST_CASE("nonlinear connection") {
  for (const auto& z : samples(sphere(), 10, 4)) {
    const auto N = nonlinear_connection(sphere(), z);
    const auto G = spray(sphere(), z);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(N(i, 0) * z.y[0] + N(i, 1) * z.y[1] - 2 * G(i)) < 1e-10);
  }
  const auto s = builtins::metric("randers-wave");
  const auto z = at({1.1, 0.6}, {0.5, 0.9});
  const auto N = nonlinear_connection(s, z);
  for (int j = 0; j < 2; ++j) {
    const auto d = y_fd([&](const TangentPoint& p) { return spray(s, p); }, z, j);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(N(i, j) - d(i)) < 1e-6);
  }
}

TEST_CASE("delta derivatives") {
  ScalarField f = [](std::span<const Jet> x, std::span<const Jet>) { return sin(x[0]) * cos(x[1]); };
  const auto z = at({0.4, 1.3}, {0.6, 0.8});
  CHECK(delta_derivative(flat(), f, z, 0) == doctest::Approx(std::cos(0.4) * std::cos(1.3)));
  CHECK(delta_derivative(flat(), f, z, 1) == doctest::Approx(-std::sin(0.4) * std::sin(1.3)));
  for (const auto* id : {"randers-wave", "conformal-torus", "wavy-quartic-torus", "riemannian-sphere"}) {
    const auto s = builtins::metric(id);
    ScalarField F = [s](std::span<const Jet> x, std::span<const Jet> y) { return sqrt(s.norm_squared(x, y)); };
    for (const auto& p : samples(s, 5, 9)) {
      for (int i = 0; i < 2; ++i) CHECK(std::abs(delta_derivative(s, F, p, i)) < 1e-8);
    }
  }
}

TEST_CASE("Cartan coefficients") {
  const double th = pi / 3;
  const auto c = cartan_coefficients(sphere(), at({th, 0.5}, {0.4, 0.7}));
  CHECK(c.Gamma(0, 1, 1) == doctest::Approx(-std::sqrt(3.0) / 4));
  CHECK(c.Gamma(1, 0, 1) == doctest::Approx(std::cos(th) / std::sin(th)));
  CHECK(c.Gamma(1, 1, 0) == doctest::Approx(std::cos(th) / std::sin(th)));
  CHECK(std::abs(c.Gamma(0, 0, 0)) < 1e-14);
  CHECK(max_abs(c.Cv) == 0.0);

  const auto z = at({0.9, 0.1}, {0.3, -0.95});
  const auto r = cartan_coefficients(randers(), z);
  CHECK(max_abs(r.Gamma) == 0.0);
  CHECK(max_abs(r.Cv) > 0.01);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) CHECK(std::abs(r.Cv(i, 0, k) * z.y[0] + r.Cv(i, 1, k) * z.y[1]) < 1e-10);
  }
}

TEST_CASE("metric compatibility") {
  for (const auto* id : {"randers-wave", "conformal-torus", "wavy-quartic-torus", "riemannian-sphere"}) {
    CAPTURE(id);
    const auto s = builtins::metric(id);
    for (const auto& p : samples(s, 5, 17)) {
      CHECK(max_abs(h_covariant_derivative(s, metric_field(2), p)) < 1e-8);
      CHECK(max_abs(v_covariant_derivative(s, metric_field(2), p)) < 1e-8);
      CHECK(max_abs(nabla_0(s, metric_field(2), p)) < 1e-8);
      CHECK(max_abs(h_covariant_derivative(s, kronecker_field(2), p)) <= 1e-12);
    }
  }
}

TEST_CASE("flat covariant derivative is the coordinate derivative") {
  auto f = TensorField::from_formula(
      2, lower(0), [](std::span<const Jet> x, std::span<const Jet>) { return std::vector<Jet>{sin(x[0])}; }, 0,
      "sin x1");
  const auto d = h_covariant_derivative(flat(), f, at({0.7, 0.2}, {1, 0}));
  CHECK(d(0) == doctest::Approx(std::cos(0.7)));
  CHECK(std::abs(d(1)) < 1e-15);

  auto t = TensorField::from_formula(
      2, lower(1), [](std::span<const Jet> x, std::span<const Jet>) { return std::vector<Jet>{cos(x[1]), x[0] * x[0]}; },
      std::nullopt, "y-free");
  CHECK(max_abs(v_covariant_derivative(sphere(), t, at({1.0, 0.5}, {0.2, 0.4}))) == 0.0);
}

TEST_CASE("vertical derivative of the Hilbert form") {
  const auto s = builtins::metric("randers-wave");
  const auto z = at({0.5, 1.9}, {0.7, 0.2});
  const auto v = v_covariant_derivative(s, hilbert_field(2), z);
  const auto Cv = cartan_coefficients(s, z).Cv;
  const auto l = hilbert_form(s, z);
  for (int h = 0; h < 2; ++h) {
    const auto dl = y_fd([&](const TangentPoint& p) { return hilbert_form(s, p); }, z, h);
    for (int i = 0; i < 2; ++i) {
      const double expect = dl(i) - Cv(0, i, h) * l(0) - Cv(1, i, h) * l(1);
      CHECK(std::abs(v(i, h) - expect) < 1e-6);
    }
  }
}

TEST_CASE("Landsberg trace") {
  const auto z = at({0.5, 1.9}, {0.7, 0.2});
  CHECK(max_abs(nabla_0(randers(), cartan_trace_field(2), z)) < 1e-14);
  CHECK(max_abs(nabla_0(sphere(), cartan_trace_field(2), at({1, 1}, {0.5, 0.2}))) == 0.0);
  CHECK(max_abs(nabla_0(builtins::metric("randers-wave"), cartan_trace_field(2), z)) > 1e-4);
}
