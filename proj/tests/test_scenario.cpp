#include "doctest.h"

#include "finsler/error.hpp"
#include "finsler/scenario.hpp"
#include "support.hpp"

using namespace test;
using nlohmann::json;

namespace {

json doc(json metric, json tasks) {
  return {{"metric", std::move(metric)}, {"grid", "16x16/32"}, {"seed", 5}, {"tasks", std::move(tasks)}};
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::TaskError;
}

}  // namespace

TEST_CASE("catalog") {
  const auto c = list_builtins();
  std::vector<std::string> ids;
  for (const auto& m : c.at("metrics")) ids.push_back(m.at("id"));
  for (const char* want : {"euclidean", "riemannian-sphere", "randers-torus"}) {
    CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());
  }
  for (const auto& id : ids) CHECK_NOTHROW(builtins::metric(id));
  for (const auto& f : c.at("forms")) {
    const std::string id = f.at("id");
    if (id.find('<') == std::string::npos) CHECK_NOTHROW(builtins::form(id, 2));
  }
  for (const auto& f : c.at("vector_fields")) {
    const std::string id = f.at("id");
    if (id.find('<') == std::string::npos) CHECK_NOTHROW(builtins::vector_field(id, 2));
  }
  CHECK(list_builtins().dump() == c.dump());
  CHECK(kind_of([] { builtins::metric("nope"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { builtins::form("nope", 2); }) == ErrorKind::ConfigError);
}

TEST_CASE("seeded generators are reproducible") {
  const auto a = builtins::random_form(2, 1, 99);
  const auto b = builtins::random_form(2, 1, 99);
  const auto c = builtins::random_form(2, 1, 100);
  const auto z = at({0.3, 0.9}, {0.6, 0.8});
  CHECK(max_abs_diff(form_values(flat(), a, z), form_values(flat(), b, z)) == 0.0);
  CHECK(max_abs_diff(form_values(flat(), a, z), form_values(flat(), c, z)) > 0.0);
  CHECK(builtins::sub_seed(1, 2) == builtins::sub_seed(1, 2));
  CHECK(builtins::sub_seed(1, 2) != builtins::sub_seed(1, 3));
}

TEST_CASE("flat ricci-identity scenario passes") {
  const auto sc = Scenario::parse(doc("euclidean", {{{"kind", "check"}, {"params", {{"check", "ricci-identity"}}}, {"tolerance", 1e-8}}}));
  const auto rep = run_scenario(sc);
  CHECK(rep.all_pass);
  CHECK(rep.exit_code() == 0);
  CHECK(*rep.tasks[0].measure <= 1e-8);
}

TEST_CASE("Randers adjointness scenario passes") {
  const auto sc = Scenario::parse(
      {{"metric", "randers-torus"}, {"tasks", {{{"kind", "check"}, {"params", {{"check", "adjointness"}, {"p", 1}, {"count", 1}}}}}}});
  const auto rep = run_scenario(sc);
  CHECK(rep.all_pass);
  CHECK(*rep.tasks[0].tolerance == 1e-4);
}

TEST_CASE("configuration errors surface before any math") {
  const json bad_b = {{"family", "randers"}, {"dim", 2}, {"a", {{1, 0}, {0, 1}}}, {"b", {1.0, 0}}};
  try {
    Scenario::parse(doc(bad_b, {{{"kind", "tensor"}, {"params", {{"name", "g"}, {"at", "0,0,1,0"}}}}}));
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("Randers") != std::string::npos);
  }
  auto parse = [](json d) { return [d] { Scenario::parse(d); }; };
  CHECK(kind_of(parse(doc("euclidean", json::array()))) == ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("euclidean", {{{"kind", "bogus"}}}))) == ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("euclidean", {{{"kind", "tensor"}, {"params", {{"name", "Z"}, {"at", "0,0,1,0"}}}}}))) ==
        ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("euclidean", {{{"kind", "tensor"}, {"params", {{"name", "g"}, {"at", "0,0,1"}}}}}))) ==
        ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("euclidean", {{{"kind", "tensor"}, {"params", {{"name", "g"}, {"at", "0,0,0,0"}}}}}))) ==
        ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("riemannian-sphere", {{{"kind", "tensor"}, {"params", {{"name", "g"}, {"at", "0,0,1,0"}}}}}))) ==
        ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("euclidean", {{{"kind", "check"}, {"params", {{"check", "adjointness"}, {"p", 2}}}}}))) ==
        ErrorKind::ConfigError);
  CHECK(kind_of(parse(doc("euclidean", {{{"kind", "harmonic"}, {"params", {{"form", "dx7"}}}}}))) ==
        ErrorKind::ConfigError);
  json g = doc("euclidean", {{{"kind", "harmonic"}, {"params", {{"form", "dx1"}}}}});
  g["grid"] = "4x4/8";
  CHECK(kind_of(parse(g)) == ErrorKind::ConfigError);
}

TEST_CASE("a failing operation is recorded and later tasks still run") {
  json tasks = {{{"kind", "curvature"}, {"params", {{"name", "Rflag"}, {"at", "0.5,0.5,1,0"}}}},
                {{"kind", "integrate"}, {"params", {{"integrand", "inner"}, {"form", "dx1"}, {"other", "dx1^dx2"}}}},
                {{"kind", "tensor"}, {"params", {{"name", "g"}, {"at", "0.5,0.5,1,0"}}}}};
  json bad = doc("euclidean", tasks);
  CHECK(kind_of([&] { Scenario::parse(bad); }) == ErrorKind::ConfigError);

  tasks[1] = {{"kind", "tensor"}, {"params", {{"name", "g"}, {"at", "0.5,0.5,1,0"}, {"expected", {1, 0, 0}}}}};
  const auto rep = run_scenario(Scenario::parse(doc("euclidean", tasks)));
  CHECK(!rep.all_pass);
  CHECK(rep.exit_code() == 1);
  CHECK(rep.tasks[0].pass);
  CHECK(!rep.tasks[1].pass);
  CHECK(rep.tasks[1].error.find("TaskError") == 0);
  CHECK(rep.tasks[1].error.find("task 1") != std::string::npos);
  CHECK(rep.tasks[2].pass);
}

TEST_CASE("reports are deterministic and carry their provenance") {
  json tasks = {{{"kind", "tensor"}, {"params", {{"name", "C"}, {"at", "0.5,0.5,0.3,0.9"}}}},
                {{"kind", "check"}, {"params", {{"check", "energy"}, {"count", 2}}}, {"tolerance", 1e-5}},
                {{"kind", "laplacian"}, {"params", {{"form", "random:1:3"}, {"random", 2}}}, {"tolerance", 1e-5}},
                {{"kind", "integrate"}, {"params", {{"integrand", "volume"}}}}};
  const json d = doc("randers-wave", tasks);
  const auto a = run_scenario(Scenario::parse(d));
  const auto b = run_scenario(Scenario::parse(d));
  CHECK(a.to_json(false).dump() == b.to_json(false).dump());
  CHECK(a.to_csv() == b.to_csv());
  const auto j = a.to_json();
  CHECK(j.at("scenario_sha256") == sha256_hex(d.dump()));
  CHECK(j.at("scenario_sha256").get<std::string>().size() == 64);
  CHECK(j.at("engine").contains("tolerances"));
  CHECK(j.at("seed") == 5);
  CHECK(j.at("tasks")[0].contains("wall_time_s"));
  CHECK(!a.to_json(false).at("tasks")[0].contains("wall_time_s"));
  CHECK(a.all_pass);

  json d2 = d;
  d2["seed"] = 6;
  const auto c = run_scenario(Scenario::parse(d2));
  CHECK(c.to_json(false).at("tasks")[1].at("result") != a.to_json(false).at("tasks")[1].at("result"));
}

TEST_CASE("CSV layout") {
  const auto rep = run_scenario(
      Scenario::parse(doc("euclidean", {{{"kind", "harmonic"}, {"params", {{"form", "dx1"}}}, {"tolerance", 1e-10}}})));
  const auto csv = rep.to_csv();
  CHECK(csv.rfind("index,kind,status,measure,tolerance,error\n", 0) == 0);
  CHECK(csv.find("0,harmonic,pass,") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("point and grid parsing") {
  const auto z = parse_point("1,2,3,4", 2);
  CHECK(z.x == std::vector<double>{1, 2});
  CHECK(z.y == std::vector<double>{3, 4});
  CHECK(kind_of([] { parse_point("1,2,x,4", 2); }) == ErrorKind::ConfigError);
  CHECK(parse_grid("24x24/48", 2).to_string() == "24x24/48");
  CHECK(parse_grid("doubled", 2).to_string() == "64x64/128");
  CHECK(kind_of([] { parse_grid("24x24", 2); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_grid("24/48", 2); }) == ErrorKind::ConfigError);
  CHECK(point_from_json(json{{"x", {0.1, 0.2}}, {"y", {1, 0}}}, 2).x[1] == 0.2);
}
