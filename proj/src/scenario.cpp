#include "finsler/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "finsler/builtins.hpp"
#include "finsler/checks.hpp"
#include "finsler/curvature.hpp"
#include "finsler/error.hpp"
#include "finsler/metric.hpp"

namespace finsler {

using nlohmann::json;

namespace {

[[noreturn]] void config(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::string task_tag(std::size_t i, const std::string& kind) {
  return "task " + std::to_string(i) + " (" + kind + ")";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::string> kKinds = {"tensor", "curvature", "laplacian", "harmonic", "integrate", "check"};

double default_check_tolerance(const std::string& name) {
  if (name == "adjointness") return 1e-4;
  if (name == "homogeneity") return 1e-10;
  return 1e-5;
}

}  // namespace

json engine_tolerances() {
  return {{"indicatrix", kIndicatrixTolerance},
          {"cholesky_pivot", kCholeskyPivot},
          {"max_jet_order", kMaxJetOrder},
          {"fd_field_step", 1e-4},
          {"flag_form_agreement", 1e-6},
          {"sphere_pole_margin", 1e-3}};
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GridSpec parse_grid(const std::string& text, int dim) {
  if (text == "default") return GridSpec::defaults(dim);
  if (text == "doubled") return GridSpec::defaults(dim).doubled();
  const auto slash = text.find('/');
  if (slash == std::string::npos) config("grid '" + text + "' must look like 32x32/64");
  auto counts = [&](const std::string& part) {
    std::vector<int> v;
    std::stringstream ss(part);
    std::string item;
    while (std::getline(ss, item, 'x')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        config("bad node count '" + item + "' in grid '" + text + "'");
      }
    }
    return v;
  };
  GridSpec g{counts(text.substr(0, slash)), counts(text.substr(slash + 1))};
  if (static_cast<int>(g.base.size()) != dim || static_cast<int>(g.fiber.size()) != dim - 1) {
    config("grid '" + text + "' does not match dimension " + std::to_string(dim));
  }
  return g;
}

GridSpec grid_from_json(const json& j, int dim) {
  if (j.is_null()) return GridSpec::defaults(dim);
  if (j.is_string()) return parse_grid(j.get<std::string>(), dim);
  try {
    GridSpec g{j.at("base").get<std::vector<int>>(), j.at("fiber").get<std::vector<int>>()};
    if (static_cast<int>(g.base.size()) != dim || static_cast<int>(g.fiber.size()) != dim - 1) {
      config("grid does not match dimension " + std::to_string(dim));
    }
    return g;
  } catch (const json::exception& e) {
    config(std::string("grid: ") + e.what());
  }
}

json grid_to_json(const GridSpec& g) { return {{"base", g.base}, {"fiber", g.fiber}, {"text", g.to_string()}}; }

TangentPoint parse_point(const std::string& text, int dim) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config("bad coordinate '" + item + "' in point '" + text + "'");
    }
  }
  if (static_cast<int>(v.size()) != 2 * dim) {
    config("point needs " + std::to_string(2 * dim) + " numbers (x then y), got " + std::to_string(v.size()));
  }
  return {{v.begin(), v.begin() + dim}, {v.begin() + dim, v.end()}};
}

TangentPoint point_from_json(const json& j, int dim) {
  if (j.is_string()) return parse_point(j.get<std::string>(), dim);
  try {
    TangentPoint z;
    if (j.is_array()) {
      const auto v = j.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != 2 * dim) config("point needs " + std::to_string(2 * dim) + " numbers");
      z = {{v.begin(), v.begin() + dim}, {v.begin() + dim, v.end()}};
    } else {
      z = {j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>()};
    }
    if (z.dim() != dim || static_cast<int>(z.y.size()) != dim) config("point dimension mismatch");
    return z;
  } catch (const json::exception& e) {
    config(std::string("point: ") + e.what());
  }
}

const std::vector<std::string>& tensor_names() {
  static const std::vector<std::string> n = {"g", "ginv", "C", "T", "ell", "G", "N", "Gamma", "Cv"};
  return n;
}

const std::vector<std::string>& curvature_names() {
  static const std::vector<std::string> n = {"Rhh", "P", "P-printed", "Q", "Rflag", "Rflag-contracted", "Ricci"};
  return n;
}

TensorValue named_tensor(const FinslerStructure& s, const std::string& name, const TangentPoint& z) {
  if (name == "g") return fundamental_tensor(s, z);
  if (name == "ginv") return inverse_metric(s, z);
  if (name == "C") return cartan_tensor(s, z);
  if (name == "T") return cartan_trace(s, z);
  if (name == "ell") return hilbert_form(s, z);
  if (name == "G") return spray(s, z);
  if (name == "N") return nonlinear_connection(s, z);
  if (name == "Gamma") return cartan_coefficients(s, z).Gamma;
  if (name == "Cv") return cartan_coefficients(s, z).Cv;
  config("unknown tensor '" + name + "'");
}

TensorValue named_curvature(const FinslerStructure& s, const std::string& name, const TangentPoint& z) {
  if (name == "Rhh") return hh_curvature(s, z);
  if (name == "P") return hv_curvature(s, z);
  if (name == "P-printed") return hv_curvature_printed(s, z);
  if (name == "Q") return vv_curvature(s, z);
  if (name == "Rflag") return flag_curvature_tensor(s, z);
  if (name == "Rflag-contracted") return curvature(s, z).R_flag_contracted;
  if (name == "Ricci") return ricci_trace(s, z);
  config("unknown curvature '" + name + "'");
}

json tensor_json(const TensorValue& t) {
  std::vector<int> shape(static_cast<std::size_t>(t.rank()), t.dim);
  return {{"variance", variance_string(t.variance)},
          {"shape", shape},
          {"data", t.data},
          {"point", {{"x", t.point.x}, {"y", t.point.y}}}};
}

json list_builtins() {
  auto entries = [](const std::vector<builtins::CatalogEntry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"id", e.id}, {"description", e.description}});
    return a;
  };
  return {{"metrics", entries(builtins::metrics())},
          {"forms", entries(builtins::forms())},
          {"vector_fields", entries(builtins::vector_fields())},
          {"custom_expressions", entries(builtins::expressions())},
          {"checks", checks::names()},
          {"tensors", tensor_names()},
          {"curvatures", curvature_names()},
          {"task_kinds", kKinds},
          {"default_grids", {{"2", grid_to_json(GridSpec::defaults(2))}, {"3", grid_to_json(GridSpec::defaults(3))}}}};
}

namespace {

// Builds every object a task needs; runs no geometry beyond point normalization checks.
void validate_task(const FinslerStructure& s, const Task& t, std::size_t i) {
  const int n = s.dim();
  const auto& p = t.params;
  auto tag = [&](const std::string& what) { config(task_tag(i, t.kind) + ": " + what); };
  auto need = [&](const char* key) -> const json& {
    if (!p.contains(key)) tag(std::string("missing '") + key + "'");
    return p.at(key);
  };
  auto str = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_string()) tag(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  };
  auto point = [&](const json& j) {
    const TangentPoint z = point_from_json(j, n);
    if (!s.chart().contains(z.x)) tag("point outside the usable chart");
    bool zero = true;
    for (double v : z.y) zero = zero && v == 0.0;
    if (zero) tag("point has y = 0");
  };
  auto points = [&] {
    if (p.contains("at")) point(p.at("at"));
    if (p.contains("points")) {
      for (const auto& z : p.at("points")) point(z);
    }
    if (!p.contains("at") && !p.contains("points") && !p.contains("random")) tag("needs 'at', 'points' or 'random'");
  };
  try {
    if (t.kind == "tensor" || t.kind == "curvature") {
      const auto name = str("name");
      const auto& names = t.kind == "tensor" ? tensor_names() : curvature_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) tag("unknown name '" + name + "'");
      point(need("at"));
    } else if (t.kind == "laplacian") {
      builtins::form(str("form"), n);
      if (p.contains("expected")) builtins::form(p.at("expected").get<std::string>(), n);
      points();
    } else if (t.kind == "harmonic") {
      builtins::form(str("form"), n);
      if (s.dim() != 2 && s.dim() != 3) tag("quadrature supports n in {2, 3}");
    } else if (t.kind == "integrate") {
      const auto what = str("integrand");
      if (what == "inner") {
        const auto a = builtins::form(str("form"), n);
        const auto b = builtins::form(p.value("other", p.at("form").get<std::string>()), n);
        if (a.degree != b.degree) tag("forms have different degrees");
      } else if (what == "form") {
        if (builtins::form(str("form"), n).degree != 0) tag("integrand 'form' needs a degree-0 form");
      } else if (what != "volume") {
        tag("integrand must be volume, form or inner");
      }
    } else if (t.kind == "check") {
      const auto name = str("check");
      const auto& names = checks::names();
      if (std::find(names.begin(), names.end(), name) == names.end()) tag("unknown check '" + name + "'");
      if (p.contains("count") && (!p.at("count").is_number_integer() || p.at("count").get<long>() < 1)) {
        tag("'count' must be a positive integer");
      }
      if (p.contains("p")) {
        const int deg = p.at("p").get<int>();
        if (deg < 0 || deg > n) tag("'p' out of range");
        if (name == "adjointness" && deg + 1 > n) tag("adjointness needs p + 1 <= n");
        if (name == "expansion" && deg < 1) tag("expansion needs p >= 1");
      }
      if (p.contains("field")) builtins::vector_field(p.at("field").get<std::string>(), n);
    } else {
      tag("unknown kind");
    }
  } catch (const json::exception& e) {
    tag(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    tag(e.what());
  }
}

}  // namespace

Scenario Scenario::parse(const json& doc) {
  if (!doc.is_object()) config("scenario must be a JSON object");
  if (!doc.contains("metric")) config("scenario has no 'metric'");
  Scenario sc{doc.at("metric"), builtins::metric_from_json(doc.at("metric")), {}, {}, 0, {}, "json", doc.dump()};
  const int n = sc.metric.dim();
  try {
    sc.seed = doc.value("seed", static_cast<std::uint64_t>(0));
    sc.grid = grid_from_json(doc.contains("grid") ? doc.at("grid") : json(), n);
    if (doc.contains("output")) {
      const auto& o = doc.at("output");
      if (o.is_string()) {
        sc.output_path = o.get<std::string>();
      } else {
        sc.output_path = o.value("path", "");
        sc.format = o.value("format", "json");
      }
    }
    if (sc.format != "json" && sc.format != "csv") config("output format must be json or csv");
    if (!doc.contains("tasks") || !doc.at("tasks").is_array() || doc.at("tasks").empty()) {
      config("scenario needs a non-empty 'tasks' array");
    }
    for (const auto& t : doc.at("tasks")) {
      Task task;
      task.kind = t.at("kind").get<std::string>();
      task.params = t.value("params", json::object());
      if (t.contains("tolerance")) {
        const double tol = t.at("tolerance").get<double>();
        if (!(tol >= 0.0)) config(task_tag(sc.tasks.size(), task.kind) + ": tolerance must be >= 0");
        task.tolerance = tol;
      }
      sc.tasks.push_back(std::move(task));
    }
  } catch (const json::exception& e) {
    config(std::string("scenario: ") + e.what());
  }
  if (sc.grid.base.size() >= 1) {
    for (int c : sc.grid.base) {
      if (c < 8) config("grid axes need at least 8 nodes");
    }
    for (int c : sc.grid.fiber) {
      if (c < 8) config("grid axes need at least 8 nodes");
    }
  }
  for (std::size_t i = 0; i < sc.tasks.size(); ++i) validate_task(sc.metric, sc.tasks[i], i);
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) config("cannot read scenario '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    config("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  return parse(doc);
}

namespace {

std::vector<TangentPoint> task_points(const FinslerStructure& s, const json& p, std::uint64_t seed) {
  std::vector<TangentPoint> pts;
  if (p.contains("at")) pts.push_back(point_from_json(p.at("at"), s.dim()));
  if (p.contains("points")) {
    for (const auto& z : p.at("points")) pts.push_back(point_from_json(z, s.dim()));
  }
  if (p.contains("random")) {
    for (const auto& z : checks::random_points(s, p.at("random").get<std::size_t>(), seed)) pts.push_back(z);
  }
  return pts;
}

json harmonic_json(const HarmonicReport& h) {
  return {{"laplacian_norm", h.laplacian_norm}, {"dH_norm", h.dH_norm},     {"deltaH_norm", h.deltaH_norm},
          {"form_norm", h.form_norm},           {"energy_defect", h.energy_defect}, {"derived_tol", h.derived_tol},
          {"harmonic", h.harmonic},             {"equivalence_holds", h.equivalence_holds}};
}

void run_task(const Scenario& sc, const Task& t, std::uint64_t seed, TaskResult& r) {
  const auto& s = sc.metric;
  const auto& p = t.params;
  const int n = s.dim();
  if (t.kind == "tensor" || t.kind == "curvature") {
    const TangentPoint z = point_from_json(p.at("at"), n);
    const TensorValue v = t.kind == "tensor" ? named_tensor(s, p.at("name"), z) : named_curvature(s, p.at("name"), z);
    r.result = tensor_json(v);
    if (p.contains("expected")) {
      TensorValue e = v;
      e.data = p.at("expected").get<std::vector<double>>();
      if (e.data.size() != v.data.size()) throw Error(ErrorKind::DomainError, "expected has the wrong size");
      r.measure = max_abs_diff(v, e);
    }
  } else if (t.kind == "laplacian") {
    const auto phi = builtins::form(p.at("form"), n);
    const auto lap = horizontal_laplacian(s, phi);
    std::optional<HorizontalForm> ex;
    if (phi.degree >= 1) ex = laplacian_expansion_p(s, phi);
    std::optional<HorizontalForm> expected;
    if (p.contains("expected")) expected = builtins::form(p.at("expected"), n);
    json rows = json::array();
    double worst = 0.0;
    for (const auto& z : task_points(s, p, seed)) {
      const TensorValue a = form_values(s, lap, z);
      json row = {{"x", z.x}, {"y", z.y}, {"laplacian", a.data}};
      if (ex) {
        const double d = max_abs_diff(a, form_values(s, *ex, z)) / std::max(1.0, a.max_abs());
        row["expansion_difference"] = d;
        worst = std::max(worst, d);
      }
      if (expected) {
        const double d = max_abs_diff(a, form_values(s, *expected, z));
        row["expected_difference"] = d;
        worst = std::max(worst, d);
      }
      rows.push_back(std::move(row));
    }
    r.result = {{"form", phi.label}, {"degree", phi.degree}, {"points", rows}};
    if (ex || expected) r.measure = worst;
    if (p.value("norms", false)) {
      const auto h = is_h_harmonic(s, phi, QuadratureGrid::make(s, sc.grid), t.tolerance.value_or(1e-8));
      r.result["summary"] = harmonic_json(h);
    }
  } else if (t.kind == "harmonic") {
    const auto phi = builtins::form(p.at("form"), n);
    const double tol = t.tolerance.value_or(1e-8);
    const auto h = is_h_harmonic(s, phi, QuadratureGrid::make(s, sc.grid), tol);
    r.result = harmonic_json(h);
    r.result["form"] = phi.label;
    bool ok = h.equivalence_holds;
    if (p.contains("expect_harmonic")) ok = ok && h.harmonic == p.at("expect_harmonic").get<bool>();
    r.pass = ok;
    r.measure = h.laplacian_norm;
    r.tolerance = tol;
    return;
  } else if (t.kind == "integrate") {
    const auto grid = QuadratureGrid::make(s, sc.grid);
    const std::string what = p.at("integrand");
    double v = 0.0;
    if (what == "volume") {
      v = integrate_scalar(s, [](const TangentPoint&) { return 1.0; }, grid);
    } else if (what == "form") {
      const auto f = builtins::form(p.at("form"), n);
      v = integrate_many(s, grid, std::max(2, f.geometry_depth()), 1, [&](const LocalExpansion& e, std::span<double> out) {
            out[0] = f.evaluate(e, 0)[0].value();
          })[0];
    } else {
      const auto a = builtins::form(p.at("form"), n);
      const auto b = builtins::form(p.value("other", p.at("form").get<std::string>()), n);
      v = global_inner_product(s, a, b, grid);
    }
    r.result = {{"value", v}, {"grid", grid_to_json(sc.grid)}};
    if (p.contains("expected")) {
      const double e = p.at("expected").get<double>();
      r.measure = std::abs(v - e) / std::max(1.0, std::abs(e));
    }
  } else if (t.kind == "check") {
    const std::string name = p.at("check");
    r.tolerance = t.tolerance.value_or(default_check_tolerance(name));
    if (name == "bochner" && p.contains("field")) {
      const auto X = builtins::vector_field(p.at("field"), n);
      const auto b = bochner_integral(s, X, QuadratureGrid::make(s, sc.grid));
      r.result = {{"field", X.label},
                  {"K_integral", b.K_integral},
                  {"grad_norm_integral", b.grad_norm_integral},
                  {"sum", b.sum},
                  {"divergence_integral", b.divergence_integral}};
      r.measure = std::abs(b.sum);
    } else {
      const auto o = checks::run(name, s, p, seed, sc.grid);
      r.result = {{"items", o.items}, {"max_residual", o.max_residual}, {"detail", o.detail}};
      r.measure = o.max_residual;
    }
  }
  if (!r.tolerance && t.tolerance) r.tolerance = t.tolerance;
  if (r.measure && r.tolerance) r.pass = *r.measure <= *r.tolerance;
}

}  // namespace

Report run_scenario(const Scenario& sc) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.scenario_sha256 = sha256_hex(sc.canonical);
  rep.seed = sc.seed;
  rep.metric = sc.metric.label();
  rep.grid = sc.grid;
  for (std::size_t i = 0; i < sc.tasks.size(); ++i) {
    const Task& t = sc.tasks[i];
    TaskResult r;
    r.index = i;
    r.kind = t.kind;
    r.params = t.params;
    r.tolerance = t.tolerance;
    const auto ti = std::chrono::steady_clock::now();
    const std::uint64_t seed = t.params.value("seed", builtins::sub_seed(sc.seed, i));
    try {
      run_task(sc, t, seed, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.error = Error(ErrorKind::TaskError, task_tag(i, t.kind) + ": " + e.what()).what();
    }
    r.wall_time_s = seconds_since(ti);
    rep.all_pass = rep.all_pass && r.pass;
    rep.tasks.push_back(std::move(r));
  }
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

json Report::to_json(bool timing) const {
  json tasks_json = json::array();
  for (const auto& t : tasks) {
    json j = {{"index", t.index},
              {"kind", t.kind},
              {"params", t.params},
              {"result", t.result},
              {"status", !t.error.empty() ? "error" : (t.pass ? "pass" : "fail")},
              {"pass", t.pass}};
    j["measure"] = t.measure ? json(*t.measure) : json();
    j["tolerance"] = t.tolerance ? json(*t.tolerance) : json();
    if (!t.error.empty()) j["error"] = t.error;
    if (timing) j["wall_time_s"] = t.wall_time_s;
    tasks_json.push_back(std::move(j));
  }
  json out = {{"engine", {{"name", "finsler-forms"}, {"version", kEngineVersion}, {"tolerances", engine_tolerances()}}},
              {"scenario_sha256", scenario_sha256},
              {"seed", seed},
              {"metric", metric},
              {"grid", grid_to_json(grid)},
              {"tasks", tasks_json},
              {"all_pass", all_pass}};
  if (timing) out["wall_time_s"] = wall_time_s;
  return out;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  os << "index,kind,status,measure,tolerance,error\n";
  for (const auto& t : tasks) {
    std::string err = t.error;
    for (auto& c : err) {
      if (c == '"') c = '\'';
    }
    os << t.index << ',' << t.kind << ',' << (!t.error.empty() ? "error" : (t.pass ? "pass" : "fail")) << ','
       << (t.measure ? format_double(*t.measure) : "") << ',' << (t.tolerance ? format_double(*t.tolerance) : "")
       << ",\"" << err << "\"\n";
  }
  return os.str();
}

}  // namespace finsler
