#include "finsler/builtins.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "finsler/error.hpp"

namespace finsler::builtins {

namespace {

using nlohmann::json;

std::vector<Jet> identity(int n) {
  std::vector<Jet> a(static_cast<std::size_t>(n * n), Jet(0.0));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] = Jet(1.0);
  return a;
}

BaseField constant_matrix(std::vector<double> m) {
  return [m](std::span<const Jet>) {
    std::vector<Jet> out;
    for (double v : m) out.emplace_back(v);
    return out;
  };
}

BaseField constant_covector(std::vector<double> b) { return constant_matrix(std::move(b)); }

// F^2 = sqrt(|y|^4 + k sum y_i^4), strongly convex for k > -1/2.
Jet quartic_f2(std::span<const Jet> y, const Jet& k) {
  Jet q(0.0), s(0.0);
  for (const auto& yi : y) {
    const Jet y2 = yi * yi;
    q += y2;
    s += y2 * y2;
  }
  return sqrt(q * q + k * s);
}

FinslerStructure sphere_metric(double margin, std::string label) {
  return FinslerStructure::riemannian(
             2,
             [](std::span<const Jet> x) {
               const Jet s = sin(x[0]);
               return std::vector<Jet>{Jet(1.0), Jet(0.0), Jet(0.0), s * s};
             },
             ChartSpec::sphere(margin), false, std::move(label))
      .with_invariant_axes({false, true});
}

struct MetricMaker {
  CatalogEntry entry;
  FinslerStructure (*make)();
};

const std::vector<MetricMaker>& metric_makers() {
  static const std::vector<MetricMaker> m = {
      {{"euclidean", "flat torus [0,2pi)^2, F = |y|"},
       [] { return FinslerStructure::euclidean(2, ChartSpec::torus(2), "euclidean"); }},
      {{"euclidean-3d", "flat torus [0,2pi)^3"},
       [] { return FinslerStructure::euclidean(3, ChartSpec::torus(3), "euclidean-3d"); }},
      {{"riemannian-sphere", "round 2-sphere, (theta, phi) chart, a = diag(1, sin^2 theta), pole margin 1e-3"},
       [] { return sphere_metric(1e-3, "riemannian-sphere"); }},
      {{"riemannian-sphere-band", "round 2-sphere restricted to pi/6 <= theta <= 5pi/6"},
       [] { return sphere_metric(std::numbers::pi / 6.0, "riemannian-sphere-band"); }},
      {{"conformal-torus", "torus with a = exp(2 sigma) I, sigma = 0.2 sin x1 cos x2"},
       [] {
         return FinslerStructure::riemannian(
             2,
             [](std::span<const Jet> x) {
               const Jet e = exp(0.4 * sin(x[0]) * cos(x[1]));
               return std::vector<Jet>{e, Jet(0.0), Jet(0.0), e};
             },
             ChartSpec::torus(2), false, "conformal-torus");
       }},
      {{"randers-torus", "constant Randers torus, a = I, b = (0.5, 0)"},
       [] {
         return FinslerStructure::randers(2, constant_matrix({1, 0, 0, 1}), constant_covector({0.5, 0.0}),
                                          ChartSpec::torus(2), true, "randers-torus");
       }},
      {{"randers-wave", "Randers torus, a = I, b = 0.3 (sin x2, cos x1)"},
       [] {
         return FinslerStructure::randers(
             2, constant_matrix({1, 0, 0, 1}),
             [](std::span<const Jet> x) { return std::vector<Jet>{0.3 * sin(x[1]), 0.3 * cos(x[0])}; },
             ChartSpec::torus(2), false, "randers-wave");
       }},
      {{"quartic-torus", "Minkowski torus, F^2 = sqrt(|y|^4 + 0.5 (y1^4 + y2^4))"},
       [] {
         return FinslerStructure::custom(
             2, "quartic", [](std::span<const Jet>, std::span<const Jet> y) { return quartic_f2(y, Jet(0.5)); },
             ChartSpec::torus(2), true, "quartic-torus");
       }},
      {{"wavy-quartic-torus", "F^2 = sqrt(|y|^4 + k(x) (y1^4 + y2^4)), k = 0.5 + 0.2 sin(x1 + x2)"},
       [] {
         return FinslerStructure::custom(
             2, "wavy-quartic",
             [](std::span<const Jet> x, std::span<const Jet> y) {
               return quartic_f2(y, 0.5 + 0.2 * sin(x[0] + x[1]));
             },
             ChartSpec::torus(2), false, "wavy-quartic-torus");
       }},
  };
  return m;
}

using FormMaker = HorizontalForm (*)(int);

struct FormEntry {
  CatalogEntry entry;
  FormMaker make;
};

HorizontalForm coordinate_form(int dim, std::vector<int> idx, std::string label,
                               std::function<Jet(std::span<const Jet>)> coef) {
  const int p = static_cast<int>(idx.size());
  if (dim < p || idx.back() >= dim) throw Error(ErrorKind::ConfigError, "form " + label + " needs dim >= " +
                                                                           std::to_string(idx.back() + 1));
  const auto all = increasing_indices(dim, p);
  std::size_t slot = 0;
  while (all[slot] != idx) ++slot;
  const std::size_t count = all.size();
  return HorizontalForm::from_components(
      dim, p,
      [slot, count, coef](std::span<const Jet> x, std::span<const Jet>) {
        std::vector<Jet> c(count, Jet(0.0));
        c[slot] = coef(x);
        return c;
      },
      std::move(label));
}

Jet one(std::span<const Jet>) { return Jet(1.0); }

const std::vector<FormEntry>& form_makers() {
  static const std::vector<FormEntry> f = {
      {{"one", "constant function 1 (degree 0)"},
       [](int dim) {
         return HorizontalForm::from_components(
             dim, 0, [](std::span<const Jet>, std::span<const Jet>) { return std::vector<Jet>{Jet(1.0)}; }, "one");
       }},
      {{"sin-x1", "sin(x1) (degree 0)"},
       [](int dim) {
         return HorizontalForm::from_components(
             dim, 0, [](std::span<const Jet> x, std::span<const Jet>) { return std::vector<Jet>{sin(x[0])}; },
             "sin-x1");
       }},
      {{"dx1", "dx1"}, [](int dim) { return coordinate_form(dim, {0}, "dx1", one); }},
      {{"dx2", "dx2"}, [](int dim) { return coordinate_form(dim, {1}, "dx2", one); }},
      {{"dx1^dx2", "dx1 ^ dx2"}, [](int dim) { return coordinate_form(dim, {0, 1}, "dx1^dx2", one); }},
      {{"sin-x1-dx1", "sin(x1) dx1"},
       [](int dim) { return coordinate_form(dim, {0}, "sin-x1-dx1", [](std::span<const Jet> x) { return sin(x[0]); }); }},
      {{"sin-x1-dx2", "sin(x1) dx2"},
       [](int dim) { return coordinate_form(dim, {1}, "sin-x1-dx2", [](std::span<const Jet> x) { return sin(x[0]); }); }},
      {{"cos-x1-dx1", "cos(x1) dx1"},
       [](int dim) { return coordinate_form(dim, {0}, "cos-x1-dx1", [](std::span<const Jet> x) { return cos(x[0]); }); }},
      {{"sin-x1-dx1^dx2", "sin(x1) dx1 ^ dx2"},
       [](int dim) {
         return coordinate_form(dim, {0, 1}, "sin-x1-dx1^dx2", [](std::span<const Jet> x) { return sin(x[0]); });
       }},
      {{"cos-x1-dx1^dx2", "cos(x1) dx1 ^ dx2"},
       [](int dim) {
         return coordinate_form(dim, {0, 1}, "cos-x1-dx1^dx2", [](std::span<const Jet> x) { return cos(x[0]); });
       }},
  };
  return f;
}

struct FieldEntry {
  CatalogEntry entry;
  VectorField (*make)(int);
};

VectorField coordinate_field(int dim, int axis, std::string label, std::function<Jet(std::span<const Jet>)> coef) {
  if (axis >= dim) throw Error(ErrorKind::ConfigError, "field " + label + " needs dim >= " + std::to_string(axis + 1));
  return {dim,
          [dim, axis, coef](std::span<const Jet> x) {
            std::vector<Jet> c(static_cast<std::size_t>(dim), Jet(0.0));
            c[static_cast<std::size_t>(axis)] = coef(x);
            return c;
          },
          std::move(label)};
}

const std::vector<FieldEntry>& field_makers() {
  static const std::vector<FieldEntry> f = {
      {{"e1", "constant d/dx1"}, [](int dim) { return coordinate_field(dim, 0, "e1", one); }},
      {{"e2", "constant d/dx2"}, [](int dim) { return coordinate_field(dim, 1, "e2", one); }},
      {{"sin-x1-e1", "sin(x1) d/dx1"},
       [](int dim) { return coordinate_field(dim, 0, "sin-x1-e1", [](std::span<const Jet> x) { return sin(x[0]); }); }},
      {{"sin-x1-e2", "sin(x1) d/dx2"},
       [](int dim) { return coordinate_field(dim, 1, "sin-x1-e2", [](std::span<const Jet> x) { return sin(x[0]); }); }},
      {{"d-phi", "d/dphi on the sphere chart (same as e2)"},
       [](int dim) { return coordinate_field(dim, 1, "d-phi", one); }},
  };
  return f;
}

struct Mode {
  double amplitude;
  std::vector<int> k;
  double phase;
};

std::vector<Mode> draw_modes(std::mt19937_64& rng, int dim, int count) {
  std::uniform_int_distribution<int> freq(-2, 2);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Mode> modes;
  for (int m = 0; m < count; ++m) {
    Mode md{amp(rng), std::vector<int>(static_cast<std::size_t>(dim)), phase(rng)};
    for (auto& k : md.k) k = freq(rng);
    modes.push_back(std::move(md));
  }
  return modes;
}

// True when x[a] is the a-th coordinate variable of a common jet space.
bool coordinate_jets(std::span<const Jet> x) {
  if (x.empty() || x[0].is_constant()) return false;
  const JetSpace* sp = x[0].space();
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a].space() != sp || x[a].order() != x[0].order() || x[a].order() < 1) return false;
    const auto lin = static_cast<std::size_t>(sp->shifted(0, static_cast<int>(a)));
    for (std::size_t i = 1; i < x[a].size(); ++i) {
      if (x[a][i] != (i == lin ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

Jet fourier(const std::vector<Mode>& modes, std::span<const Jet> x) {
  if (!coordinate_jets(x)) {
    Jet s(0.0);
    for (const auto& m : modes) {
      Jet arg(m.phase);
      for (std::size_t a = 0; a < m.k.size(); ++a) {
        if (m.k[a] != 0) arg += static_cast<double>(m.k[a]) * x[a];
      }
      s += m.amplitude * cos(arg);
    }
    return s;
  }
  // Taylor coefficients of cos(theta + k.h) directly: k^e / e! cos^(|e|)(theta).
  const JetSpace& sp = *x[0].space();
  const int order = x[0].order();
  const std::size_t dim = x.size();
  Jet r(sp, order, 0.0);
  // cos^(d)(theta) = cycle[d % 4]
  std::vector<std::array<double, 4>> cycle;
  for (const auto& m : modes) {
    double t = m.phase;
    for (std::size_t a = 0; a < dim; ++a) t += m.k[a] * x[a].value();
    const double c = std::cos(t), s = std::sin(t);
    cycle.push_back({c, -s, -c, s});
  }
  for (int idx = 0; idx < sp.size(order); ++idx) {
    const auto e = sp.exponents(idx);
    bool base_only = true;
    for (std::size_t v = dim; v < e.size(); ++v) base_only = base_only && e[v] == 0;
    if (!base_only) continue;
    const int d = sp.degree(idx);
    double c = 0.0;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      double w = modes[mi].amplitude;
      for (std::size_t a = 0; a < dim && w != 0.0; ++a) {
        for (int p = 1; p <= e[a]; ++p) w *= modes[mi].k[a] / static_cast<double>(p);
      }
      if (w != 0.0) c += w * cycle[mi][static_cast<std::size_t>(d % 4)];
    }
    r[static_cast<std::size_t>(idx)] = c;
  }
  return r;
}

}  // namespace

const std::vector<CatalogEntry>& metrics() {
  static const std::vector<CatalogEntry> c = [] {
    std::vector<CatalogEntry> v;
    for (const auto& m : metric_makers()) v.push_back(m.entry);
    return v;
  }();
  return c;
}

const std::vector<CatalogEntry>& forms() {
  static const std::vector<CatalogEntry> c = [] {
    std::vector<CatalogEntry> v;
    for (const auto& m : form_makers()) v.push_back(m.entry);
    v.push_back({"random:<degree>:<seed>", "seeded trigonometric form"});
    return v;
  }();
  return c;
}

const std::vector<CatalogEntry>& vector_fields() {
  static const std::vector<CatalogEntry> c = [] {
    std::vector<CatalogEntry> v;
    for (const auto& m : field_makers()) v.push_back(m.entry);
    v.push_back({"random:<seed>", "seeded trigonometric vector field"});
    return v;
  }();
  return c;
}

const std::vector<CatalogEntry>& expressions() {
  static const std::vector<CatalogEntry> c = {
      {"quartic", "F^2 = sqrt(|y|^4 + 0.5 sum y_i^4), any dim"},
      {"wavy-quartic", "F^2 = sqrt(|y|^4 + (0.5 + 0.2 sin(x1 + x2)) sum y_i^4), dim >= 2"},
  };
  return c;
}

FinslerStructure metric(const std::string& id) {
  for (const auto& m : metric_makers()) {
    if (m.entry.id == id) return m.make();
  }
  throw Error(ErrorKind::ConfigError, "unknown metric id '" + id + "'");
}

namespace {

// "random:<degree>:<seed>" / "random:<seed>"
std::vector<std::uint64_t> random_args(const std::string& id, std::size_t count) {
  std::vector<std::uint64_t> out;
  std::size_t pos = id.find(':');
  while (pos != std::string::npos) {
    const std::size_t next = id.find(':', pos + 1);
    const std::string part = id.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad number '" + part + "' in '" + id + "'");
    }
    pos = next;
  }
  if (out.size() != count) throw Error(ErrorKind::ConfigError, "malformed random id '" + id + "'");
  return out;
}

}  // namespace

HorizontalForm form(const std::string& id, int dim) {
  if (id.rfind("random:", 0) == 0) {
    const auto a = random_args(id, 2);
    return random_form(dim, static_cast<int>(a[0]), a[1]);
  }
  for (const auto& f : form_makers()) {
    if (f.entry.id == id) return f.make(dim);
  }
  throw Error(ErrorKind::ConfigError, "unknown form id '" + id + "'");
}

VectorField vector_field(const std::string& id, int dim) {
  if (id.rfind("random:", 0) == 0) return random_vector_field(dim, random_args(id, 1)[0]);
  if (id.rfind("random-sphere:", 0) == 0) return random_vector_field(dim, random_args(id, 1)[0], true);
  for (const auto& f : field_makers()) {
    if (f.entry.id == id) return f.make(dim);
  }
  throw Error(ErrorKind::ConfigError, "unknown vector field id '" + id + "'");
}

ChartSpec chart_from_json(const json& j, int dim) {
  if (j.is_null()) return ChartSpec::torus(dim);
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "torus") return ChartSpec::torus(dim);
    if (s == "sphere") {
      if (dim != 2) throw Error(ErrorKind::ConfigError, "sphere chart needs dim 2");
      return ChartSpec::sphere();
    }
    throw Error(ErrorKind::ConfigError, "unknown chart '" + s + "'");
  }
  ChartSpec c;
  try {
    for (const auto& b : j.at("bounds")) c.bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
    c.periodic = j.value("periodic", std::vector<bool>(c.bounds.size(), false));
    c.excluded_margin = j.value("excluded_margin", std::vector<double>(c.bounds.size(), 0.0));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("chart: ") + e.what());
  }
  if (c.dim() != dim) throw Error(ErrorKind::ConfigError, "chart has " + std::to_string(c.dim()) + " axes, dim is " +
                                                              std::to_string(dim));
  c.validate();
  return c;
}

FinslerStructure metric_from_json(const json& j) {
  if (j.is_string()) return metric(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "metric must be an id or an object");
  if (j.contains("builtin")) return metric(j.at("builtin").get<std::string>());
  try {
    const std::string family = j.at("family").get<std::string>();
    const int n = j.at("dim").get<int>();
    if (n < 1) throw Error(ErrorKind::ConfigError, "dim must be positive");
    const ChartSpec chart = chart_from_json(j.contains("chart") ? j.at("chart") : json(), n);
    const std::string label = j.value("label", family);
    auto matrix = [&](const char* key) {
      std::vector<double> m;
      if (!j.contains(key)) {
        for (const auto& e : identity(n)) m.push_back(e.value());
        return m;
      }
      const auto& rows = j.at(key);
      if (rows.size() != static_cast<std::size_t>(n)) throw Error(ErrorKind::ConfigError, std::string(key) + " must be n x n");
      for (const auto& r : rows) {
        if (r.size() != static_cast<std::size_t>(n)) throw Error(ErrorKind::ConfigError, std::string(key) + " must be n x n");
        for (const auto& v : r) m.push_back(v.get<double>());
      }
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < a; ++b) {
          if (m[static_cast<std::size_t>(a * n + b)] != m[static_cast<std::size_t>(b * n + a)]) {
            throw Error(ErrorKind::ConfigError, std::string(key) + " must be symmetric");
          }
        }
      }
      return m;
    };
    if (family == "euclidean") return FinslerStructure::euclidean(n, chart, label);
    if (family == "riemannian") return FinslerStructure::riemannian(n, constant_matrix(matrix("a")), chart, true, label);
    if (family == "randers") {
      auto b = j.at("b").get<std::vector<double>>();
      if (b.size() != static_cast<std::size_t>(n)) throw Error(ErrorKind::ConfigError, "b must have dim entries");
      return FinslerStructure::randers(n, constant_matrix(matrix("a")), constant_covector(std::move(b)), chart, true,
                                       label);
    }
    if (family == "custom") {
      const std::string expr = j.at("expression").get<std::string>();
      if (expr == "quartic") {
        const double k = j.value("k", 0.5);
        if (!(k > -0.5)) throw Error(ErrorKind::ConfigError, "quartic k must exceed -0.5");
        return FinslerStructure::custom(
            n, expr, [k](std::span<const Jet>, std::span<const Jet> y) { return quartic_f2(y, Jet(k)); }, chart, true,
            label);
      }
      if (expr == "wavy-quartic") {
        if (n < 2) throw Error(ErrorKind::ConfigError, "wavy-quartic needs dim >= 2");
        return FinslerStructure::custom(
            n, expr,
            [](std::span<const Jet> x, std::span<const Jet> y) { return quartic_f2(y, 0.5 + 0.2 * sin(x[0] + x[1])); },
            chart, false, label);
      }
      throw Error(ErrorKind::ConfigError, "unknown custom expression '" + expr + "'");
    }
    throw Error(ErrorKind::ConfigError, "unknown metric family '" + family + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("metric: ") + e.what());
  }
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

HorizontalForm random_form(int dim, int degree, std::uint64_t seed) {
  if (degree < 0 || degree > dim) throw Error(ErrorKind::ConfigError, "random form degree out of range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tilt(-0.3, 0.3);
  const std::size_t count = increasing_indices(dim, degree).size();
  std::vector<std::vector<Mode>> modes;
  std::vector<std::vector<double>> slope;
  for (std::size_t c = 0; c < count; ++c) {
    modes.push_back(draw_modes(rng, dim, 3));
    std::vector<double> s(static_cast<std::size_t>(dim));
    for (auto& v : s) v = tilt(rng);
    slope.push_back(std::move(s));
  }
  return HorizontalForm::from_components(
      dim, degree,
      [modes, slope](std::span<const Jet> x, std::span<const Jet> u) {
        std::vector<Jet> out;
        out.reserve(modes.size());
        for (std::size_t c = 0; c < modes.size(); ++c) {
          Jet w(1.0);
          for (std::size_t a = 0; a < u.size(); ++a) w += slope[c][a] * u[a];
          out.push_back(fourier(modes[c], x) * w);
        }
        return out;
      },
      "random:" + std::to_string(degree) + ":" + std::to_string(seed));
}

VectorField random_vector_field(int dim, std::uint64_t seed, bool sphere_chart) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Mode>> modes;
  for (int i = 0; i < dim; ++i) modes.push_back(draw_modes(rng, dim, 3));
  if (sphere_chart) {
    for (auto& comp : modes) {
      for (auto& m : comp) m.k[0] = 0;
    }
  }
  return {dim,
          [modes, sphere_chart](std::span<const Jet> x) {
            std::vector<Jet> out;
            for (const auto& comp : modes) {
              Jet v = fourier(comp, x);
              if (sphere_chart) {
                const Jet s = sin(x[0]);
                v = v * (s * s) * (1.0 + 0.3 * cos(x[0]));
              }
              out.push_back(std::move(v));
            }
            return out;
          },
          (sphere_chart ? "random-sphere:" : "random:") + std::to_string(seed)};
}

}  // namespace finsler::builtins
