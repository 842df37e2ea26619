#include "finsler/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "finsler/builtins.hpp"
#include "finsler/curvature.hpp"
#include "finsler/error.hpp"

namespace finsler::checks {

using nlohmann::json;

void Outcome::add(double residual, json item) {
  if (!(residual <= max_residual)) max_residual = std::isnan(residual) ? residual : std::max(max_residual, residual);
  ++items;
  item["residual"] = residual;
  detail.push_back(std::move(item));
}

namespace {

double rel(double d, double scale) { return std::abs(d) / std::max(1.0, std::abs(scale)); }

double tensor_rel(const TensorValue& a, const TensorValue& b) {
  return max_abs_diff(a, b) / std::max(1.0, std::max(a.max_abs(), b.max_abs()));
}

TensorValue scaled(TensorValue t, double s) {
  for (auto& v : t.data) v *= s;
  return t;
}

TangentPoint with_y(const TangentPoint& z, double lambda) {
  TangentPoint w = z;
  for (auto& v : w.y) v *= lambda;
  return w;
}

json point_json(const TangentPoint& z) { return {{"x", z.x}, {"y", z.y}}; }

double max_abs(const TensorValue& t) { return t.max_abs(); }

}  // namespace

std::vector<SpherePoint> random_points(const FinslerStructure& s, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& c = s.chart();
  const int n = s.dim();
  std::vector<SpherePoint> out;
  out.reserve(count);
  while (out.size() < count) {
    std::vector<double> x(static_cast<std::size_t>(n)), u(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      auto [lo, hi] = c.bounds[static_cast<std::size_t>(a)];
      if (!c.periodic[static_cast<std::size_t>(a)]) {
        const double m = c.excluded_margin[static_cast<std::size_t>(a)];
        const double clear = 0.1 * (hi - lo - 2.0 * m);
        lo += m + clear;
        hi -= m + clear;
      }
      x[static_cast<std::size_t>(a)] = lo + (hi - lo) * unit(rng);
    }
    double norm = 0.0;
    for (auto& v : u) {
      v = normal(rng);
      norm += v * v;
    }
    if (norm < 1e-6) continue;
    out.push_back(normalize_to_indicatrix(s, x, u));
  }
  return out;
}

Outcome homogeneity(const FinslerStructure& s, std::size_t points, std::uint64_t seed) {
  Outcome o;
  const int n = s.dim();
  for (const auto& z : random_points(s, points, seed)) {
    const TangentPoint& p = z;
    const double F = eval_F(s, p.x, p.y);
    const TensorValue g = fundamental_tensor(s, p);
    const TensorValue gi = inverse_metric(s, p);
    const TensorValue C = cartan_tensor(s, p);
    const TensorValue T = cartan_trace(s, p);
    const TensorValue l = hilbert_form(s, p);
    double worst = 0.0;
    json item = point_json(p);
    for (double lambda : {0.5, 2.0, 7.0}) {
      const TangentPoint w = with_y(p, lambda);
      worst = std::max(worst, rel(eval_F(s, w.x, w.y) - lambda * F, lambda * F));
      worst = std::max(worst, tensor_rel(fundamental_tensor(s, w), g));
      worst = std::max(worst, tensor_rel(cartan_tensor(s, w), scaled(C, 1.0 / lambda)));
    }
    double gyy = 0.0, ly = 0.0, ty = 0.0, cy = 0.0, id = 0.0, lg = 0.0;
    for (int i = 0; i < n; ++i) {
      ly += l(i) * p.y[i];
      ty += T(i) * p.y[i];
      double gy = 0.0;
      for (int j = 0; j < n; ++j) {
        gyy += g(i, j) * p.y[i] * p.y[j];
        gy += g(i, j) * p.y[j];
        double c = 0.0, prod = 0.0;
        for (int k = 0; k < n; ++k) {
          c += C(k, i, j) * p.y[k];
          prod += gi(i, k) * g(k, j);
        }
        cy = std::max(cy, std::abs(c));
        id = std::max(id, std::abs(prod - (i == j ? 1.0 : 0.0)));
      }
      lg = std::max(lg, std::abs(l(i) - gy / F));
    }
    const double cscale = std::max(1.0, max_abs(C));
    worst = std::max({worst, rel(gyy - F * F, F * F), rel(ly - F, F), std::abs(ty) / std::max(1.0, max_abs(T)),
                      cy / cscale, id, lg / std::max(1.0, max_abs(l))});
    o.add(worst, std::move(item));
  }
  return o;
}

SphereReduction sphere_reduction(const FinslerStructure& sphere, std::size_t points, std::uint64_t seed) {
  SphereReduction r;
  for (const auto& z : random_points(sphere, points, seed)) {
    const TangentPoint& p = z;
    const double th = p.x[0];
    const double s = std::sin(th), c = std::cos(th);
    const auto conn = cartan_coefficients(sphere, p);
    const auto curv = curvature(sphere, p);
    double closed = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          double expect = 0.0;
          if (i == 0 && j == 1 && k == 1) expect = -s * c;
          if (i == 1 && (j + k == 1)) expect = c / s;
          closed = std::max(closed, std::abs(conn.Gamma(i, j, k) - expect));
          for (int l = 0; l < 2; ++l) {
            // R^h_kij = K (delta^h_i g_kj - delta^h_j g_ki), K = 1, g = diag(1, s^2)
            auto g = [&](int a, int b) { return a != b ? 0.0 : (a == 0 ? 1.0 : s * s); };
            const double rexp = (i == k ? g(j, l) : 0.0) - (i == l ? g(j, k) : 0.0);
            closed = std::max(closed, std::abs(curv.R_hh(i, j, k, l) - rexp));
          }
        }
        const double ric = i != j ? 0.0 : (i == 0 ? 1.0 : s * s);
        closed = std::max(closed, std::abs(curv.Ricci(i, j) - ric));
      }
    }
    r.closed_forms.add(closed, point_json(p));
    const double vanish = std::max({cartan_tensor(sphere, p).max_abs(), cartan_trace(sphere, p).max_abs(),
                                    curv.P_hv.max_abs(), curv.P_hv_printed.max_abs(), curv.Q_vv.max_abs(),
                                    conn.Cv.max_abs()});
    r.vanishing.add(vanish, point_json(p));
  }
  return r;
}

namespace {

VectorField seeded_field(int n, std::uint64_t seed, bool sphere) {
  return builtins::random_vector_field(n, seed, sphere);
}

}  // namespace

Outcome ricci_identity(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, bool sphere_fields) {
  Outcome o;
  const auto pts = random_points(s, fields, builtins::sub_seed(seed, 0));
  for (std::size_t k = 0; k < fields; ++k) {
    const auto X = seeded_field(s.dim(), builtins::sub_seed(seed, k + 1), sphere_fields);
    const TensorValue r = ricci_identity_residual(s, X.as_tensor(), pts[k]);
    o.add(r.max_abs(), {{"field", X.label}, {"point", point_json(pts[k])}});
  }
  return o;
}

Outcome adjointness(const FinslerStructure& s, int p, std::size_t pairs, std::uint64_t seed, const GridSpec& spec) {
  const int n = s.dim();
  std::vector<std::pair<HorizontalForm, HorizontalForm>> fp;
  for (std::size_t k = 0; k < pairs; ++k) {
    fp.emplace_back(builtins::random_form(n, p, builtins::sub_seed(seed, 2 * k)),
                    builtins::random_form(n, p + 1, builtins::sub_seed(seed, 2 * k + 1)));
  }
  const auto grid = QuadratureGrid::make(s, spec);
  const auto res = adjointness_defects(s, fp, grid);
  Outcome o;
  for (std::size_t k = 0; k < pairs; ++k) {
    o.add(res[k].defect, {{"phi", fp[k].first.label},
                          {"psi", fp[k].second.label},
                          {"lhs", res[k].lhs},
                          {"rhs", res[k].rhs}});
  }
  return o;
}

Outcome divergence(const FinslerStructure& s, std::size_t forms, std::uint64_t seed, const GridSpec& spec) {
  std::vector<HorizontalForm> f;
  for (std::size_t k = 0; k < forms; ++k) f.push_back(builtins::random_form(s.dim(), 1, builtins::sub_seed(seed, k)));
  const auto res = divergence_integral_checks(s, f, QuadratureGrid::make(s, spec));
  Outcome o;
  for (std::size_t k = 0; k < forms; ++k) {
    json item = {{"form", f[k].label}, {"integral", res[k].integral}, {"norm", res[k].norm}};
    if (!res[k].warning.empty()) item["warning"] = res[k].warning;
    o.add(res[k].defect, std::move(item));
  }
  return o;
}

Outcome laplacian_expansion(const FinslerStructure& s, int p, std::size_t forms, std::uint64_t seed,
                            std::size_t points_per_form) {
  Outcome o;
  for (std::size_t k = 0; k < forms; ++k) {
    const auto phi = builtins::random_form(s.dim(), p, builtins::sub_seed(seed, k));
    const auto lap = horizontal_laplacian(s, phi);
    const auto ex = laplacian_expansion_p(s, phi);
    for (const auto& z : random_points(s, points_per_form, builtins::sub_seed(seed, 1000 + k))) {
      const TensorValue a = form_values(s, lap, z);
      const TensorValue b = form_values(s, ex, z);
      o.add(tensor_rel(a, b), {{"form", phi.label}, {"point", point_json(z)}, {"scale", a.max_abs()}});
    }
  }
  return o;
}

Outcome energy(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, bool sphere_fields) {
  Outcome o;
  const auto pts = random_points(s, fields, builtins::sub_seed(seed, 0));
  for (std::size_t k = 0; k < fields; ++k) {
    const auto X = seeded_field(s.dim(), builtins::sub_seed(seed, k + 1), sphere_fields);
    const auto r = energy_identity_residual(s, X, pts[k]);
    o.add(std::max(std::abs(r.difference), std::abs(r.norm_identity)),
          {{"field", X.label}, {"point", point_json(pts[k])}, {"de12", r.difference}, {"de13", r.norm_identity}});
  }
  return o;
}

Outcome weitzenbock(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, bool sphere_fields) {
  Outcome o;
  const auto pts = random_points(s, fields, builtins::sub_seed(seed, 0));
  for (std::size_t k = 0; k < fields; ++k) {
    const auto X = seeded_field(s.dim(), builtins::sub_seed(seed, k + 1), sphere_fields);
    const TensorValue w = weitzenbock_residual(s, X, pts[k]);
    const TensorValue lap =
        scaled(form_values(s, horizontal_laplacian(s, associate_one_form(s, X).horizontal), pts[k]), -1.0);
    o.add(tensor_rel(w, lap), {{"field", X.label}, {"point", point_json(pts[k])}});
  }
  return o;
}

Outcome divergence_energy(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, const GridSpec& spec,
                          bool sphere_fields) {
  Outcome o;
  const auto grid = QuadratureGrid::make(s, spec);
  for (std::size_t k = 0; k < fields; ++k) {
    const auto X = seeded_field(s.dim(), builtins::sub_seed(seed, k + 1), sphere_fields);
    const Bochner b = bochner_integral(s, X, grid);
    o.add(std::abs(b.divergence_integral),
          {{"field", X.label}, {"K_integral", b.K_integral}, {"grad_norm_integral", b.grad_norm_integral}});
  }
  return o;
}

Outcome laplacian_against(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& expected,
                          std::size_t points, std::uint64_t seed) {
  Outcome o;
  const auto lap = horizontal_laplacian(s, phi);
  for (const auto& z : random_points(s, points, seed)) {
    o.add(max_abs_diff(form_values(s, lap, z), form_values(s, expected, z)), {{"point", point_json(z)}});
  }
  return o;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"homogeneity", "ricci-identity", "adjointness", "divergence",
                                             "expansion",   "energy",         "weitzenbock", "bochner",
                                             "sphere-reduction"};
  return n;
}

Outcome run(const std::string& name, const FinslerStructure& s, const json& params, std::uint64_t seed,
            const GridSpec& grid) {
  const auto count = params.value("count", static_cast<std::size_t>(10));
  const bool sphere = params.value("sphere_fields", false);
  if (name == "homogeneity") return homogeneity(s, count, seed);
  if (name == "ricci-identity") return ricci_identity(s, count, seed, sphere);
  if (name == "adjointness") return adjointness(s, params.value("p", 1), count, seed, grid);
  if (name == "divergence") return divergence(s, count, seed, grid);
  if (name == "expansion") return laplacian_expansion(s, params.value("p", 1), count, seed);
  if (name == "energy") return energy(s, count, seed, sphere);
  if (name == "weitzenbock") return weitzenbock(s, count, seed, sphere);
  if (name == "bochner") return divergence_energy(s, count, seed, grid, sphere);
  if (name == "sphere-reduction") {
    const auto r = sphere_reduction(s, count, seed);
    Outcome o;
    o.add(r.closed_forms.max_residual, {{"part", "closed_forms"}, {"items", r.closed_forms.items}});
    o.add(r.vanishing.max_residual, {{"part", "vanishing"}, {"items", r.vanishing.items}});
    return o;
  }
  throw Error(ErrorKind::ConfigError, "unknown check '" + name + "'");
}

}  // namespace finsler::checks
