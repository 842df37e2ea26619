#include "doctest.h"

#include <cstdlib>

#include "finsler/error.hpp"
#include "support.hpp"

using namespace test;

namespace {

const double vol = std::pow(2 * pi, 3);

GridSpec small() { return {{16, 16}, {32}}; }

HorizontalForm F(const std::string& id) { return builtins::form(id, 2); }

}  // namespace

TEST_CASE("axis rules") {
  const auto p = periodic_rule(0, 2 * pi, 16);
  double w = 0.0, c = 0.0;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    w += p.weights[i];
    c += p.weights[i] * std::cos(3 * p.nodes[i]) * std::cos(3 * p.nodes[i]);
  }
  CHECK(w == doctest::Approx(2 * pi));
  CHECK(c == doctest::Approx(pi));
  const auto g = gauss_legendre_rule(0.0, pi, 24);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::sin(g.nodes[i]);
  CHECK(std::abs(s - 2.0) < 1e-13);
}

TEST_CASE("volume density") {
  const double d0 = volume_density(flat(), std::vector<double>{0, 0}, std::vector<double>{0}).value;
  for (double x : {0.3, 2.0, 5.5}) {
    for (double t : {0.0, 1.0, 4.0}) {
      CHECK(std::abs(volume_density(flat(), std::vector<double>{x, 1.0}, std::vector<double>{t}).value - d0) < 1e-14);
    }
  }
  const auto grid = QuadratureGrid::make(randers(), small());
  for (std::size_t f = 0; f < grid.fiber_size(); ++f) {
    const auto t = grid.fiber_angles(f);
    CHECK(volume_density(randers(), std::vector<double>{0.2, 0.3}, t).value > 0.0);
  }
  CHECK_THROWS_AS(volume_density(builtins::metric_from_json(nlohmann::json::parse(R"({"family":"euclidean","dim":4})")),
                                 std::vector<double>(4, 0.0), std::vector<double>(3, 0.0)),
                  Error);
}

TEST_CASE("scalar integrals") {
  const auto grid = QuadratureGrid::make(flat(), small());
  CHECK(rel(integrate_scalar(flat(), [](const TangentPoint&) { return 1.0; }, grid), vol) < 1e-8);
  CHECK(std::abs(integrate_scalar(flat(), [](const TangentPoint& z) { return std::sin(z.x[0]); }, grid)) < 1e-10);

  const auto s = builtins::metric("randers-wave");
  auto f = [](const TangentPoint& z) { return 1.0 + 0.3 * std::cos(z.x[0]) * z.y[1]; };
  const double a = integrate_scalar(s, f, QuadratureGrid::make(s, GridSpec::defaults(2)));
  const double b = integrate_scalar(s, f, QuadratureGrid::make(s, GridSpec::defaults(2).doubled()));
  CHECK(std::abs(a - b) / std::abs(b) < 1e-8);
  const auto band = builtins::metric("riemannian-sphere-band");
  CHECK(rel(integrate_scalar(band, [](const TangentPoint&) { return 1.0; },
                             QuadratureGrid::make(band, GridSpec::defaults(2))),
            2 * pi * 2 * pi * std::sqrt(3.0)) < 1e-8);
}

TEST_CASE("global inner products") {
  const auto grid = QuadratureGrid::make(flat(), small());
  CHECK(rel(global_inner_product(flat(), F("dx1"), F("dx1"), grid), vol) < 1e-10);
  CHECK(std::abs(global_inner_product(flat(), F("dx1"), F("dx2"), grid)) < 1e-10);
  CHECK(rel(global_inner_product(flat(), F("sin-x1-dx1"), F("sin-x1-dx1"), grid), vol / 2) < 1e-6);
  CHECK_THROWS_AS(global_inner_product(flat(), F("dx1"), F("dx1^dx2"), grid), Error);
}

TEST_CASE("divergence integral") {
  const auto grid = QuadratureGrid::make(flat(), small());
  CHECK(divergence_integral_check(flat(), F("sin-x1-dx1"), grid).defect <= 1e-8);
  const auto c = divergence_integral_check(randers(), F("dx1"), QuadratureGrid::make(randers(), small()));
  CHECK(c.integral == 0.0);
  CHECK(c.defect == 0.0);
  CHECK(checks::divergence(randers(), 2, 51, GridSpec::defaults(2)).max_residual <= 1e-5);
  CHECK(!divergence_integral_check(builtins::metric("riemannian-sphere-band"), F("sin-x1-dx1"),
                                   QuadratureGrid::make(builtins::metric("riemannian-sphere-band"), small()))
             .warning.empty());
}

TEST_CASE("adjointness") {
  const auto grid = QuadratureGrid::make(flat(), small());
  CHECK(adjointness_defect(flat(), F("sin-x1"), F("cos-x1-dx1"), grid).defect <= 1e-8);
  const auto r = adjointness_defect(randers(), F("one"), F("dx2"), QuadratureGrid::make(randers(), small()));
  CHECK(std::abs(r.lhs) <= 1e-12);
  CHECK(std::abs(r.rhs) <= 1e-12);
  CHECK(checks::adjointness(randers(), 1, 1, 61, GridSpec::defaults(2)).max_residual <= 1e-4);
  CHECK_THROWS_AS(adjointness_defect(flat(), F("dx1"), F("dx2"), grid), Error);
}

TEST_CASE("h-harmonic forms") {
  const auto grid = QuadratureGrid::make(flat(), small());
  const auto h = is_h_harmonic(flat(), F("dx1"), grid, 1e-10);
  CHECK(h.harmonic);
  CHECK(h.laplacian_norm <= 1e-10);
  CHECK(h.dH_norm <= 1e-10);
  CHECK(h.deltaH_norm <= 1e-10);
  CHECK(h.equivalence_holds);

  const auto s = is_h_harmonic(flat(), F("sin-x1-dx1"), grid, 1e-8);
  CHECK(!s.harmonic);
  CHECK(s.laplacian_norm > 0.1);
  CHECK(std::max(s.dH_norm, s.deltaH_norm) > 0.1);
  CHECK(s.equivalence_holds);
  CHECK(std::abs(s.energy_defect) < 1e-8 * s.laplacian_norm * s.form_norm + 1e-12);

  const auto r = is_h_harmonic(randers(), F("dx1"), QuadratureGrid::make(randers(), small()), 1e-8);
  CHECK(r.harmonic);
  CHECK(r.equivalence_holds);
}

TEST_CASE("Bochner integral") {
  const auto grid = QuadratureGrid::make(flat(), small());
  const auto c = bochner_integral(flat(), builtins::vector_field("e1", 2), grid);
  CHECK(c.K_integral == 0.0);
  CHECK(c.grad_norm_integral == 0.0);
  CHECK(c.sum == 0.0);
  const auto s = bochner_integral(flat(), builtins::vector_field("sin-x1-e1", 2), grid);
  CHECK(std::abs(s.divergence_integral) <= 1e-6);
  CHECK(s.grad_norm_integral > 1.0);
  const auto r = bochner_integral(randers(), builtins::vector_field("e2", 2), QuadratureGrid::make(randers(), small()));
  CHECK(std::abs(r.sum) <= 1e-8);
}

TEST_CASE("grids") {
  CHECK_THROWS_AS(QuadratureGrid::make(flat(), {{4, 16}, {32}}), Error);
  CHECK_THROWS_AS(QuadratureGrid::make(flat(), {{16, 16, 16}, {32}}), Error);
  CHECK(GridSpec::defaults(2).to_string() == "32x32/64");
  CHECK(GridSpec::defaults(2).doubled().to_string() == "64x64/128");
  CHECK(GridSpec::defaults(3).to_string() == "16x16x16/32x16");
  const auto g3 = builtins::metric("euclidean-3d");
  const double v3 = integrate_scalar(g3, [](const TangentPoint&) { return 1.0; },
                                     QuadratureGrid::make(g3, {{8, 8, 8}, {16, 16}}));
  CHECK(rel(v3, std::pow(2 * pi, 3) * 4 * pi) < 1e-6);
}

TEST_CASE("results do not depend on the worker count") {
  const auto s = builtins::metric("randers-wave");
  const auto grid = QuadratureGrid::make(s, small());
  const auto phi = builtins::random_form(2, 1, 7);
  setenv("FINSLER_THREADS", "1", 1);
  const double a = global_inner_product(s, phi, phi, grid);
  setenv("FINSLER_THREADS", "3", 1);
  const double b = global_inner_product(s, phi, phi, grid);
  unsetenv("FINSLER_THREADS");
  CHECK(a == b);
}
