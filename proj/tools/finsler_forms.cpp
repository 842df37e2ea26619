// finsler-forms: scenario runner and single-shot queries.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "finsler/builtins.hpp"
#include "finsler/checks.hpp"
#include "finsler/error.hpp"
#include "finsler/jets.hpp"
#include "finsler/scenario.hpp"

using nlohmann::json;
using namespace finsler;

namespace {

struct Common {
  std::string metric = "euclidean";
  std::string at;
  std::string grid = "default";
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::optional<double> tol;
  bool no_timing = false;
};

void add_common(CLI::App* sub, Common& c, bool with_point) {
  sub->add_option("--metric", c.metric, "built-in metric id or path to a metric JSON file");
  if (with_point) sub->add_option("--at", c.at, "x then y, comma separated");
  sub->add_option("--grid", c.grid, "default, doubled, or e.g. 32x32/64");
  sub->add_option("--out", c.out, "write output here instead of stdout");
  sub->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", c.seed);
  sub->add_option("--tol", c.tol, "tolerance the measured residual is compared against");
  sub->add_flag("--no-timing", c.no_timing, "omit wall-time fields from JSON");
}

json metric_spec(const std::string& text) {
  if (std::filesystem::is_regular_file(text)) {
    std::ifstream in(text);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ConfigError, "metric file '" + text + "': " + e.what());
    }
  }
  return text;
}

json point_json(const std::string& text) {
  if (text.empty()) throw Error(ErrorKind::ConfigError, "--at is required");
  return text;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write '" + c.out + "'");
  f << text;
}

std::string tensor_csv(const json& t) {
  std::ostringstream os;
  const auto shape = t.at("shape").get<std::vector<int>>();
  const auto data = t.at("data").get<std::vector<double>>();
  os << "index,value\n";
  for (std::size_t f = 0; f < data.size(); ++f) {
    std::string idx;
    std::size_t rest = f;
    for (std::size_t k = shape.size(); k-- > 0;) {
      idx = std::to_string(rest % static_cast<std::size_t>(shape[k])) + idx;
      rest /= static_cast<std::size_t>(shape[k]);
    }
    os << (idx.empty() ? "-" : idx) << ',' << format_double(data[f]) << '\n';
  }
  return os.str();
}

std::string laplacian_csv(const json& result) {
  std::ostringstream os;
  const auto& rows = result.at("points");
  if (rows.empty()) return "";
  const std::size_t n = rows[0].at("x").size();
  const std::size_t m = rows[0].at("laplacian").size();
  for (std::size_t i = 0; i < n; ++i) os << 'x' << i << ',';
  for (std::size_t i = 0; i < n; ++i) os << 'y' << i << ',';
  for (std::size_t f = 0; f < m; ++f) os << "lap" << f << (f + 1 < m ? "," : "\n");
  for (const auto& r : rows) {
    for (double v : r.at("x")) os << format_double(v) << ',';
    for (double v : r.at("y")) os << format_double(v) << ',';
    const auto& l = r.at("laplacian");
    for (std::size_t f = 0; f < m; ++f) os << format_double(l[f].get<double>()) << (f + 1 < m ? "," : "\n");
  }
  return os.str();
}

// One-task scenario through the same validation and report path as `run`.
int single(const Common& c, const std::string& kind, json params) {
  json task = {{"kind", kind}, {"params", std::move(params)}};
  if (c.tol) task["tolerance"] = *c.tol;
  json doc = {{"metric", metric_spec(c.metric)}, {"grid", c.grid}, {"seed", c.seed}, {"tasks", json::array({task})}};
  const Scenario sc = Scenario::parse(doc);
  const Report rep = run_scenario(sc);
  const auto& t = rep.tasks.front();
  if (c.format == "csv") {
    if (t.error.empty() && (kind == "tensor" || kind == "curvature")) {
      emit(c, tensor_csv(t.result));
    } else if (t.error.empty() && kind == "laplacian") {
      emit(c, laplacian_csv(t.result));
      if (t.result.contains("summary")) std::cerr << t.result.at("summary").dump(2) << '\n';
    } else {
      emit(c, rep.to_csv());
    }
  } else {
    emit(c, rep.to_json(!c.no_timing).dump(2) + "\n");
  }
  if (!t.error.empty()) std::cerr << t.error << '\n';
  return rep.exit_code();
}

int run_file(const std::string& path, Common c, bool format_given, bool out_given) {
  const Scenario sc = Scenario::load(path);
  if (!format_given) c.format = sc.format;
  if (!out_given) c.out = sc.output_path;
  const Report rep = run_scenario(sc);
  emit(c, c.format == "csv" ? rep.to_csv() : rep.to_json(!c.no_timing).dump(2) + "\n");
  for (const auto& t : rep.tasks) {
    if (!t.error.empty()) std::cerr << t.error << '\n';
  }
  return rep.exit_code();
}

std::vector<int> parse_orders(const std::string& text, int n) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stoi(item));
  if (text.empty()) v.assign(static_cast<std::size_t>(n), 0);
  if (static_cast<int>(v.size()) != n) throw Error(ErrorKind::ConfigError, "orders need " + std::to_string(n) + " entries");
  return v;
}

int diagnostics(const Common& c, const std::string& xo, const std::string& yo, double step) {
  const FinslerStructure s = builtins::metric_from_json(metric_spec(c.metric));
  const int n = s.dim();
  JetRequest req{[s](std::span<const Jet> x, std::span<const Jet> y) { return s.norm_squared(x, y); },
                 parse_point(point_json(c.at), n), parse_orders(xo, n), parse_orders(yo, n)};
  const double jet = partial(req);
  const double fd = fd_partial(req, step);
  const double rel = std::abs(jet - fd) / (1.0 + std::abs(jet));
  json out = {{"target", "F^2"},
              {"metric", s.label()},
              {"x", req.point.x},
              {"y", req.point.y},
              {"x_orders", req.x_orders},
              {"y_orders", req.y_orders},
              {"partial", jet},
              {"fd_partial", fd},
              {"relative_difference", rel}};
  const double tol = c.tol.value_or(1e-6);
  out["tolerance"] = tol;
  out["pass"] = rel <= tol;
  if (c.format == "csv") {
    emit(c, "partial,fd_partial,relative_difference\n" + format_double(jet) + "," + format_double(fd) + "," +
                format_double(rel) + "\n");
  } else {
    emit(c, out.dump(2) + "\n");
  }
  return rel <= tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler geometry engine: Cartan connection, horizontal Hodge operators, SM quadrature"};
  app.require_subcommand(1);
  Common c;

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_path;
  run->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  auto* run_out = run->add_option("--out", c.out);
  auto* run_fmt = run->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}));
  run->add_flag("--no-timing", c.no_timing, "omit wall-time fields from JSON");

  std::string name;
  auto* tensor = app.add_subcommand("tensor", "g, ginv, C, T, ell, G, N, Gamma or Cv at a point");
  tensor->add_option("name", name)->required()->check(CLI::IsMember(tensor_names()));
  add_common(tensor, c, true);

  auto* curv = app.add_subcommand("curvature", "Rhh, P, P-printed, Q, Rflag, Rflag-contracted or Ricci at a point");
  curv->add_option("name", name)->required()->check(CLI::IsMember(curvature_names()));
  add_common(curv, c, true);

  std::string form, other, expected, integrand = "inner";
  std::size_t random = 0;
  bool norms = false;
  auto* lap = app.add_subcommand("laplacian", "horizontal Laplacian of a built-in form at points");
  lap->add_option("form", form)->required();
  lap->add_option("--random", random, "add this many seeded points of SM");
  lap->add_option("--expected", expected, "form id the Laplacian should equal");
  lap->add_flag("--norms", norms, "also integrate the L2 norms over the grid");
  add_common(lap, c, true);

  auto* harm = app.add_subcommand("harmonic", "h-harmonicity test with the norms of d, delta and Delta");
  harm->add_option("form", form)->required();
  add_common(harm, c, false);

  std::optional<double> expected_value;
  auto* integ = app.add_subcommand("integrate", "integral over SM against the canonical volume");
  integ->add_option("integrand", integrand)->check(CLI::IsMember({"volume", "form", "inner"}));
  integ->add_option("--form", form);
  integ->add_option("--other", other);
  integ->add_option("--expected", expected_value);
  add_common(integ, c, false);

  std::string check_name, field;
  std::size_t count = 10;
  int degree = 1;
  bool sphere_fields = false;
  auto* check = app.add_subcommand("check", "seeded verification suite");
  check->add_option("name", check_name)->required()->check(CLI::IsMember(checks::names()));
  check->add_option("--count", count);
  check->add_option("--p", degree);
  check->add_option("--field", field, "bochner only: integrate one vector field");
  check->add_flag("--sphere-fields", sphere_fields);
  add_common(check, c, false);

  auto* list = app.add_subcommand("list", "catalog of built-in ids");

  std::string xo, yo;
  double step = 0.0;
  auto* diag = app.add_subcommand("diagnostics", "jet partial of F^2 against its finite-difference oracle");
  diag->add_option("--x-orders", xo, "e.g. 1,0");
  diag->add_option("--y-orders", yo, "e.g. 0,2");
  diag->add_option("--step", step, "finite-difference step, default per coordinate");
  add_common(diag, c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_file(scenario_path, c, run_fmt->count() > 0, run_out->count() > 0);
    if (*list) {
      emit(c, list_builtins().dump(2) + "\n");
      return 0;
    }
    if (*diag) return diagnostics(c, xo, yo, step);
    if (*tensor || *curv) return single(c, *tensor ? "tensor" : "curvature", {{"name", name}, {"at", point_json(c.at)}});
    if (*lap) {
      json p = {{"form", form}, {"norms", norms}};
      if (!c.at.empty()) p["at"] = c.at;
      if (random > 0) p["random"] = random;
      if (!expected.empty()) p["expected"] = expected;
      return single(c, "laplacian", p);
    }
    if (*harm) return single(c, "harmonic", {{"form", form}});
    if (*integ) {
      json p = {{"integrand", integrand}};
      if (!form.empty()) p["form"] = form;
      if (!other.empty()) p["other"] = other;
      if (expected_value) p["expected"] = *expected_value;
      return single(c, "integrate", p);
    }
    if (*check) {
      json p = {{"check", check_name}, {"count", count}, {"sphere_fields", sphere_fields}};
      if (check->count("--p") > 0) p["p"] = degree;
      if (!field.empty()) p["field"] = field;
      return single(c, "check", p);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ConfigError: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
