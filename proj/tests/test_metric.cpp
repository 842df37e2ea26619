#include "doctest.h"

#include "finsler/error.hpp"
#include "support.hpp"

using namespace test;

TEST_CASE("norm examples") {
  CHECK(eval_F(flat(), std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(5.0));
  CHECK(eval_F(randers(), std::vector<double>{0, 0}, std::vector<double>{1, 0}) == doctest::Approx(1.5));
  CHECK(eval_F(sphere(), std::vector<double>{pi / 2, 0}, std::vector<double>{0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("fundamental and inverse tensors") {
  const auto g = fundamental_tensor(flat(), at({1, 2}, {3, 4}));
  CHECK(g(0, 0) == 1.0);
  CHECK(g(0, 1) == 0.0);
  CHECK(g(1, 1) == 1.0);

  const auto gs = fundamental_tensor(sphere(), at({pi / 3, 1}, {0.2, 0.9}));
  const auto gs2 = fundamental_tensor(sphere(), at({pi / 3, 1}, {-0.7, 0.1}));
  CHECK(gs(1, 1) == doctest::Approx(0.75));
  CHECK(max_abs_diff(gs, gs2) < 1e-14);

  const auto ginv = inverse_metric(sphere(), at({pi / 2, 0}, {0, 1}));
  CHECK(ginv(0, 0) == doctest::Approx(1.0));
  CHECK(ginv(1, 1) == doctest::Approx(1.0));

  for (const auto* id : {"randers-wave", "wavy-quartic-torus", "conformal-torus"}) {
    const auto s = builtins::metric(id);
    const auto z = at({0.7, 2.1}, {-0.4, 0.9});
    const auto a = fundamental_tensor(s, z);
    const auto b = inverse_metric(s, z);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double v = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
        CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("Cartan tensor and its trace") {
  CHECK(max_abs(cartan_tensor(sphere(), at({1, 1}, {0.3, 0.4}))) == 0.0);
  CHECK(max_abs(cartan_trace(sphere(), at({1, 1}, {0.3, 0.4}))) == 0.0);

  for (const auto& y : {std::vector<double>{1, 0}, std::vector<double>{0.6, 0.8}}) {
    const auto C = cartan_tensor(randers(), at({0, 0}, y));
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 2; ++j) CHECK(std::abs(C(k, 0, j) * y[0] + C(k, 1, j) * y[1]) < 1e-10);
    }
  }
  CHECK(max_abs(cartan_tensor(randers(), at({0, 0}, {0.6, 0.8}))) > 0.01);

  // double contraction with g^ij
  const auto zz = at({0.2, 0.5}, {0.6, -0.8});
  const auto C2 = cartan_tensor(randers(), zz);
  const auto gi = inverse_metric(randers(), zz);
  const auto T = cartan_trace(randers(), zz);
  for (int j = 0; j < 2; ++j) {
    double t = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) t += gi(i, k) * C2(i, k, j);
    }
    CHECK(std::abs(t - T(j)) < 1e-12);
  }
  CHECK(std::abs(T(0) * 0.6 + T(1) * -0.8) < 1e-10);
}

TEST_CASE("Hilbert form") {
  const auto l = hilbert_form(flat(), at({0, 0}, {3, 4}));
  CHECK(l(0) == doctest::Approx(0.6));
  CHECK(l(1) == doctest::Approx(0.8));

  const auto s = builtins::metric("randers-wave");
  const auto z = at({1.3, 0.2}, {0.5, 1.5});
  const auto h = hilbert_form(s, z);
  const auto g = fundamental_tensor(s, z);
  const double F = eval_F(s, z.x, z.y);
  CHECK(std::abs(h(0) * z.y[0] + h(1) * z.y[1] - F) < 1e-12);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(h(i) - (g(i, 0) * z.y[0] + g(i, 1) * z.y[1]) / F) < 1e-10);
}

TEST_CASE("normalize to the indicatrix") {
  const auto p = normalize_to_indicatrix(flat(), std::vector<double>{0, 0}, std::vector<double>{3, 4});
  CHECK(p.y()[0] == doctest::Approx(0.6));
  CHECK(p.y()[1] == doctest::Approx(0.8));
  const auto q = normalize_to_indicatrix(randers(), std::vector<double>{0, 0}, std::vector<double>{1, 0});
  CHECK(q.y()[0] == doctest::Approx(2.0 / 3.0));
  CHECK(q.y()[1] == 0.0);
  const auto r = normalize_to_indicatrix(randers(), q.x(), q.y());
  CHECK(std::abs(r.y()[0] - q.y()[0]) < 1e-12);
  CHECK_THROWS_AS(normalize_to_indicatrix(randers(), std::vector<double>{0, 0}, std::vector<double>{0, 0}), Error);
  CHECK_THROWS_AS(SpherePoint::make(flat(), {0, 0}, {1.1, 0}), Error);
}

TEST_CASE("homogeneity suite, every built-in family") {
  for (const auto& entry : builtins::metrics()) {
    CAPTURE(entry.id);
    const auto o = checks::homogeneity(builtins::metric(entry.id), 20, 11);
    CHECK(o.max_residual <= 1e-10);
  }
}

TEST_CASE("invalid inputs") {
  try {
    builtins::metric_from_json(nlohmann::json::parse(R"({"family":"randers","dim":2,"a":[[1,0],[0,1]],"b":[1.2,0]})"));
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("Randers") != std::string::npos);
  }
  CHECK_THROWS_AS(builtins::metric_from_json(nlohmann::json::parse(R"({"family":"riemannian","dim":2,"a":[[1,0.5],[0,1]]})")),
                  Error);
  CHECK_THROWS_AS(eval_F(flat(), std::vector<double>{0, 0}, std::vector<double>{0, 0}), Error);
  CHECK_THROWS_AS(eval_F(sphere(), std::vector<double>{0, 0}, std::vector<double>{1, 0}), Error);
  CHECK_THROWS_AS(invert_spd(std::vector<double>{1, 2, 2, 1}, 2), Error);
}
