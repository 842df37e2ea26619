#include "doctest.h"

#include "finsler/error.hpp"
#include "support.hpp"

using namespace test;

namespace {

HorizontalForm F(const std::string& id) { return builtins::form(id, 2); }

}  // namespace

TEST_CASE("horizontal differential") {
  const auto z = at({0.7, 1.2}, {0.6, 0.8});
  const auto d = form_values(flat(), horizontal_differential(flat(), F("sin-x1-dx2")), z);
  CHECK(d(0, 1) == doctest::Approx(std::cos(0.7)));
  CHECK(d(1, 0) == doctest::Approx(-std::cos(0.7)));
  CHECK(max_abs(form_values(flat(), horizontal_differential(flat(), F("dx2")), z)) == 0.0);
  CHECK(max_abs(form_values(randers(), horizontal_differential(randers(), F("dx1")), z)) <= 1e-14);
  const auto f = form_values(flat(), horizontal_differential(flat(), F("sin-x1")), z);
  CHECK(f(0) == doctest::Approx(std::cos(0.7)));
  CHECK(f(1) == 0.0);
  CHECK_THROWS_AS(horizontal_differential(flat(), F("dx1^dx2")), Error);
  CHECK_THROWS_AS(horizontal_codifferential(flat(), F("sin-x1")), Error);
}

TEST_CASE("horizontal codifferential") {
  const auto z = at({0.7, 1.2}, {0.6, 0.8});
  const auto c = form_values(flat(), horizontal_codifferential(flat(), F("sin-x1-dx1")), z);
  CHECK(c(0) == doctest::Approx(-std::cos(0.7)));
  CHECK(max_abs(form_values(randers(), horizontal_codifferential(randers(), F("dx2")), z)) <= 1e-14);
  // -g^ij d_i psi_j. on cos(x1) dx1^dx2: component 2 is -d_1 psi_12 = sin(x1)
  const auto c2 = form_values(flat(), horizontal_codifferential(flat(), F("cos-x1-dx1^dx2")), z);
  CHECK(std::abs(c2(0)) < 1e-15);
  CHECK(c2(1) == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("horizontal Laplacian") {
  const auto z = at({0.7, 1.2}, {0.6, 0.8});
  const auto l = form_values(flat(), horizontal_laplacian(flat(), F("sin-x1-dx1")), z);
  CHECK(std::abs(l(0) - std::sin(0.7)) < 1e-12);
  CHECK(std::abs(l(1)) < 1e-14);
  CHECK(max_abs(form_values(flat(), horizontal_laplacian(flat(), F("dx1")), z)) == 0.0);

  const auto e = form_values(flat(), laplacian_expansion_p(flat(), F("sin-x1-dx1^dx2")), z);
  const auto c = form_values(flat(), horizontal_laplacian(flat(), F("sin-x1-dx1^dx2")), z);
  CHECK(max_abs_diff(e, c) <= 1e-8);
  CHECK(c(0, 1) == doctest::Approx(std::sin(0.7)));

  for (const auto* id : {"randers-torus", "randers-wave", "wavy-quartic-torus"}) {
    CAPTURE(id);
    const auto s = builtins::metric(id);
    CHECK(checks::laplacian_expansion(s, 1, 3, 31).max_residual <= 1e-5);
    CHECK(checks::laplacian_expansion(s, 2, 2, 32).max_residual <= 1e-5);
  }
}

TEST_CASE("pointwise inner product") {
  const auto z = at({0.1, 0.1}, {1, 0});
  CHECK(pointwise_inner(flat(), F("dx1"), F("dx1"), z) == doctest::Approx(1.0));
  CHECK(pointwise_inner(flat(), F("dx1"), F("dx2"), z) == 0.0);
  CHECK(pointwise_inner(flat(), F("dx1^dx2"), F("dx1^dx2"), z) == doctest::Approx(1.0));
  CHECK_THROWS(pointwise_inner(flat(), F("dx1"), F("dx1^dx2"), z));
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto phi = builtins::random_form(2, 1 + static_cast<int>(k % 2), k);
    for (const auto& p : checks::random_points(randers(), 2, k)) {
      CHECK(pointwise_inner(randers(), phi, phi, p) > 0.0);
    }
  }
}

TEST_CASE("associated one-form") {
  const auto a = associate_one_form(flat(), builtins::vector_field("e1", 2));
  const auto z = at({0.3, 0.4}, {0.6, 0.8});
  const auto h = form_values(flat(), a.horizontal, z);
  CHECK(h(0) == 1.0);
  CHECK(h(1) == 0.0);

  const auto X = builtins::vector_field("sin-x1-e2", 2);
  const auto r = associate_one_form(randers(), builtins::vector_field("e1", 2));
  const auto g = fundamental_tensor(randers(), z);
  const auto hr = form_values(randers(), r.horizontal, z);
  CHECK(std::abs(hr(0) - g(0, 0)) < 1e-12);
  CHECK(std::abs(hr(1) - g(1, 0)) < 1e-12);
  const auto hr2 = form_values(randers(), r.horizontal, at({0.3, 0.4}, {-0.6, 0.8}));
  CHECK(std::abs(hr(0) - hr2(0)) > 1e-3);
  (void)X;
}

TEST_CASE("Weitzenbock and energy identities") {
  const auto z = at({0.6, 1.3}, {0.8, 0.6});
  CHECK(max_abs(weitzenbock_residual(flat(), builtins::vector_field("e2", 2), z)) <= 1e-14);
  const auto w = weitzenbock_residual(flat(), builtins::vector_field("sin-x1-e1", 2), z);
  CHECK(std::abs(w(0) + std::sin(0.6)) < 1e-6);
  CHECK(std::abs(w(1)) < 1e-6);

  CHECK(k_scalar(flat(), builtins::vector_field("sin-x1-e2", 2), z) == 0.0);
  CHECK(std::abs(k_scalar(randers(), builtins::vector_field("e1", 2), z)) < 1e-14);
  CHECK(std::abs(k_scalar(sphere(), builtins::vector_field("d-phi", 2), at({pi / 2, 0.3}, {0.6, 0.8})) - 1.0) < 1e-6);

  const auto e = energy_identity_residual(flat(), builtins::vector_field("sin-x1-e2", 2), z);
  CHECK(std::abs(e.difference) <= 1e-8);
  CHECK(std::abs(e.norm_identity) <= 1e-8);
  CHECK(checks::energy(randers(), 5, 41).max_residual <= 1e-5);
  CHECK(checks::energy(builtins::metric("randers-wave"), 5, 42).max_residual <= 1e-5);
  CHECK(checks::weitzenbock(builtins::metric("randers-wave"), 3, 43).max_residual <= 1e-5);
  CHECK(checks::weitzenbock(sphere(), 3, 44, true).max_residual <= 1e-5);
}
