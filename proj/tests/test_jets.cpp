#include "doctest.h"

#include "finsler/error.hpp"
#include "finsler/jets.hpp"
#include "support.hpp"

using namespace test;

namespace {

ScalarField f2_of(const FinslerStructure& s) {
  return [s](std::span<const Jet> x, std::span<const Jet> y) { return s.norm_squared(x, y); };
}

}  // namespace

TEST_CASE("jet arithmetic") {
  const auto& sp = JetSpace::get(2, 6);
  const Jet a = Jet::variable(sp, 6, 0, 0.7);
  const Jet b = Jet::variable(sp, 6, 1, -0.3);
  const Jet one = sin(a * b) * sin(a * b) + cos(a * b) * cos(a * b);
  CHECK(one.value() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < one.size(); ++i) CHECK(std::abs(one[i]) < 1e-14);

  const Jet q = (a + 2.0) / (b + 3.0);
  const Jet back = q * (b + 3.0) - a;
  CHECK(back.value() == doctest::Approx(2.0));
  for (std::size_t i = 1; i < back.size(); ++i) CHECK(std::abs(back[i]) < 1e-13);

  const Jet e = exp(log(a + 1.0));
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == doctest::Approx((a + 1.0)[i]).epsilon(1e-13));

  // d^3/da^3 of a^4 at 0.7 = 24 * 0.7
  const std::vector<int> m = {3, 0};
  CHECK(pow(a, 4.0).partial(m) == doctest::Approx(24 * 0.7));
  CHECK(sqrt(a).partial(std::vector<int>{1, 0}) == doctest::Approx(0.5 / std::sqrt(0.7)));
}

TEST_CASE("truncation and derivative orders") {
  const auto& sp = JetSpace::get(2, 4);
  const Jet a = Jet::variable(sp, 4, 0, 1.0);
  CHECK(a.derivative(0).order() == 3);
  CHECK((a * a.truncated(2)).order() == 2);
  CHECK_THROWS_AS(Jet(sp, 0, 1.0).derivative(0), Error);
}

TEST_CASE("partial of Euclidean F^2 in y1 twice is 2") {
  JetRequest r{f2_of(flat()), at({0.4, 1.1}, {0.3, -0.8}), {0, 0}, {2, 0}};
  CHECK(partial(r) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(partial(r) - fd_partial(r)) < 1e-10);
}

TEST_CASE("sphere chart: d/dtheta of g_phiphi at pi/3 is sqrt(3)/2") {
  JetRequest r{f2_of(sphere()), at({pi / 3, 0.2}, {0.5, 0.7}), {1, 0}, {0, 2}};
  CHECK(0.5 * partial(r) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-13));
}

TEST_CASE("Randers mixed partials agree with finite differences") {
  const auto s = builtins::metric("randers-wave");
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> orders = {
      {{1, 0}, {1, 0}}, {{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}, {{1, 1}, {1, 0}}, {{0, 0}, {1, 2}}, {{2, 0}, {0, 1}}};
  for (const auto& [xo, yo] : orders) {
    JetRequest r{f2_of(s), at({0.9, 2.3}, {0.6, -0.4}), xo, yo};
    CHECK(rel(fd_partial(r), partial(r)) < 1e-6);
  }
}

TEST_CASE("mixed partials do not depend on the order of differentiation") {
  const auto s = builtins::metric("wavy-quartic-torus");
  const auto z = at({0.3, 1.7}, {0.8, 0.25});
  const JetSpace& sp = JetSpace::get(4, 3);
  std::vector<Jet> x = {Jet::variable(sp, 3, 0, z.x[0]), Jet::variable(sp, 3, 1, z.x[1])};
  std::vector<Jet> y = {Jet::variable(sp, 3, 2, z.y[0]), Jet::variable(sp, 3, 3, z.y[1])};
  const Jet f = s.norm_squared(x, y);
  const double a = f.derivative(0).derivative(2).derivative(3).value();
  const double b = f.derivative(3).derivative(0).derivative(2).value();
  CHECK(std::abs(a - b) < 1e-12);
  JetRequest r{f2_of(s), z, {1, 0}, {1, 1}};
  CHECK(std::abs(partial(r) - a) < 1e-12);
}

TEST_CASE("fundamental tensor from second y-differences") {
  const auto s = randers();
  const auto z = at({0.1, 0.2}, {1.0, 0.3});
  const auto g = fundamental_tensor(s, z);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      std::vector<int> yo = {0, 0};
      ++yo[i];
      ++yo[j];
      JetRequest r{f2_of(s), z, {0, 0}, yo};
      CHECK(rel(0.5 * fd_partial(r), g(i, j)) < 1e-7);
    }
  }
}

TEST_CASE("halving the step cuts the first-derivative error by about 16") {
  const auto s = builtins::metric("randers-wave");
  JetRequest r{f2_of(s), at({0.9, 2.3}, {0.6, -0.4}), {1, 0}, {0, 0}};
  const double exact = partial(r);
  const double e1 = std::abs(fd_partial(r, 0.05) - exact);
  const double e2 = std::abs(fd_partial(r, 0.025) - exact);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("orders past the engine limit are rejected") {
  JetRequest r{f2_of(flat()), at({0, 0}, {1, 0}), {4, 0}, {3, 0}};
  try {
    partial(r);
    FAIL("expected OrderTooHigh");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderTooHigh);
  }
  JetRequest bad{f2_of(flat()), at({0, 0}, {1, 0}), {-1, 0}, {0, 0}};
  CHECK_THROWS_AS(partial(bad), Error);
}
