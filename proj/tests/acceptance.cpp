// End-to-end acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [criterion ...]     e.g. `acceptance 4 9`; no arguments runs all ten.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/builtins.hpp"
#include "finsler/checks.hpp"
#include "finsler/curvature.hpp"
#include "finsler/metric.hpp"

using namespace finsler;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Line {
  bool pass = true;
  std::ostringstream note;

  // Records value <= bound (or >= bound when `at_least`).
  void bound(const std::string& what, double value, double limit, bool at_least = false) {
    const bool ok = at_least ? value >= limit : value <= limit;
    pass = pass && ok && !std::isnan(value);
    note << (note.tellp() > 0 ? "; " : "") << what << '=' << std::scientific << std::setprecision(2) << value
         << (at_least ? ">=" : "<=") << limit << (ok ? "" : " !");
  }
  void flag(const std::string& what, bool ok) {
    pass = pass && ok;
    note << (note.tellp() > 0 ? "; " : "") << what << (ok ? "" : " !");
  }
};

FinslerStructure M(const char* id) { return builtins::metric(id); }

void homogeneity(Line& l) {
  double worst = 0.0;
  for (const auto& e : builtins::metrics()) worst = std::max(worst, checks::homogeneity(M(e.id.c_str()), 100, kSeed).max_residual);
  l.bound(std::to_string(builtins::metrics().size()) + " families x 100 points", worst, 1e-10);
}

void sphere_reduction(Line& l) {
  const auto r = checks::sphere_reduction(M("riemannian-sphere"), 100, kSeed);
  l.bound("Gamma/R/Ricci closed forms", r.closed_forms.max_residual, 1e-6);
  l.bound("C,P,Q,T", r.vanishing.max_residual, 1e-8);
}

void ricci_identity(Line& l) {
  l.bound("flat", checks::ricci_identity(M("euclidean"), 50, kSeed).max_residual, 1e-5);
  l.bound("randers", checks::ricci_identity(M("randers-torus"), 50, kSeed).max_residual, 1e-5);
  l.bound("randers-wave", checks::ricci_identity(M("randers-wave"), 50, kSeed).max_residual, 1e-5);
  l.bound("sphere", checks::ricci_identity(M("riemannian-sphere"), 50, kSeed, true).max_residual, 1e-5);
}

void adjointness(Line& l) {
  const auto grid = GridSpec::defaults(2);
  for (const char* id : {"euclidean", "randers-torus"}) {
    for (int p : {0, 1}) {
      const std::string tag = std::string(id == std::string("euclidean") ? "flat" : "randers") + " p" + std::to_string(p);
      l.bound(tag, checks::adjointness(M(id), p, 10, kSeed + p, grid).max_residual, 1e-4);
      l.bound(tag + " doubled", checks::adjointness(M(id), p, 10, kSeed + p, grid.doubled()).max_residual, 2.5e-5);
    }
  }
}

void harmonic_equivalence(Line& l) {
  for (const char* id : {"euclidean", "randers-torus"}) {
    const auto s = M(id);
    const auto grid = QuadratureGrid::make(s, GridSpec::defaults(2));
    const auto h = is_h_harmonic(s, builtins::form("dx1", 2), grid, 1e-8);
    l.bound(std::string(id) + " dx1 max norm", std::max({h.laplacian_norm, h.dH_norm, h.deltaH_norm}), 1e-8);
    const auto n = is_h_harmonic(s, builtins::form("sin-x1-dx1", 2), grid, 1e-8);
    l.bound(std::string(id) + " |Delta sin dx1|", n.laplacian_norm, 0.1, true);
    l.bound(std::string(id) + " max(|d|,|delta|)", std::max(n.dH_norm, n.deltaH_norm), 0.1, true);
    l.flag("equivalence", h.equivalence_holds && n.equivalence_holds);
  }
}

void divergence(Line& l) {
  const auto grid = GridSpec::defaults(2);
  for (const char* id : {"euclidean", "randers-torus", "randers-wave"}) {
    l.bound(id, checks::divergence(M(id), 10, kSeed, grid).max_residual, 1e-5);
  }
}

void expansion(Line& l) {
  for (const char* id : {"euclidean", "randers-torus", "randers-wave"}) {
    for (int p : {1, 2}) {
      l.bound(std::string(id) + " p" + std::to_string(p), checks::laplacian_expansion(M(id), p, 10, kSeed + p).max_residual,
              1e-5);
    }
  }
}

void flat_hodge(Line& l) {
  const auto s = M("euclidean");
  const auto phi = builtins::form("sin-x1-dx1", 2);
  l.bound("Delta sin dx1 - sin dx1", checks::laplacian_against(s, phi, phi, 100, kSeed).max_residual, 1e-6);
  const auto grid = QuadratureGrid::make(s, GridSpec::defaults(2));
  for (const char* id : {"dx1", "dx2"}) {
    l.bound(std::string("|Delta ") + id + "|", is_h_harmonic(s, builtins::form(id, 2), grid, 1e-10).laplacian_norm, 1e-10);
  }
}

void energy(Line& l) {
  l.bound("flat", checks::energy(M("euclidean"), 50, kSeed).max_residual, 1e-5);
  l.bound("randers", checks::energy(M("randers-torus"), 50, kSeed).max_residual, 1e-5);
  l.bound("randers-wave", checks::energy(M("randers-wave"), 50, kSeed).max_residual, 1e-5);
  l.bound("sphere", checks::energy(M("riemannian-sphere"), 50, kSeed, true).max_residual, 1e-5);
  const auto grid = GridSpec::defaults(2);
  l.bound("int(dZ-dY) flat", checks::divergence_energy(M("euclidean"), 3, kSeed, grid).max_residual, 1e-5);
  l.bound("int(dZ-dY) randers", checks::divergence_energy(M("randers-torus"), 3, kSeed, grid).max_residual, 1e-5);
  l.bound("int(dZ-dY) randers-wave", checks::divergence_energy(M("randers-wave"), 2, kSeed, grid).max_residual, 1e-5);
}

void parallel_fields(Line& l) {
  for (const char* id : {"euclidean", "randers-torus"}) {
    const auto s = M(id);
    const auto grid = QuadratureGrid::make(s, GridSpec::defaults(2));
    double K = 0.0, grad = 0.0, sum = 0.0, lap = 0.0;
    for (const char* x : {"e1", "e2"}) {
      const auto X = builtins::vector_field(x, 2);
      for (const auto& z : checks::random_points(s, 20, kSeed)) {
        K = std::max(K, std::abs(k_scalar(s, X, z)));
        grad = std::max(grad, h_covariant_derivative(s, X.as_tensor(), z).max_abs());
      }
      sum = std::max(sum, std::abs(bochner_integral(s, X, grid).sum));
      lap = std::max(lap, is_h_harmonic(s, associate_one_form(s, X).horizontal, grid, 1e-8).laplacian_norm);
    }
    const std::string tag = id == std::string("euclidean") ? "flat" : "randers";
    l.bound(tag + " |K|", K, 1e-8);
    l.bound(tag + " |grad X|", grad, 1e-8);
    l.bound(tag + " |Delta X|", lap, 1e-8);
    l.bound(tag + " Bochner sum", sum, 1e-8);
  }
  const auto sphere = M("riemannian-sphere");
  const double k = k_scalar(sphere, builtins::vector_field("d-phi", 2),
                            TangentPoint{{std::numbers::pi / 2, 0.0}, {0.6, 0.8}});
  l.bound("sphere K(d_phi)-1", std::abs(k - 1.0), 1e-6);
  const auto band = M("riemannian-sphere-band");
  const auto grid = QuadratureGrid::make(band, GridSpec::defaults(2));
  double lowest = INFINITY, flux = 0.0;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto b = bochner_integral(band, builtins::random_vector_field(2, builtins::sub_seed(kSeed, i), true), grid);
    lowest = std::min(lowest, b.sum);
    flux = std::max(flux, std::abs(b.divergence_integral));
  }
  l.bound("band Bochner sum", lowest, -1e-6, true);
  l.note << "; band boundary flux |int(dZ-dY)|=" << flux << " (open chart, not asserted)";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Line&)>>> criteria = {
      {"homogeneity and Euler identities", homogeneity},
      {"Riemannian reduction on the round sphere", sphere_reduction},
      {"Ricci identity", ricci_identity},
      {"adjointness of d_H and delta_H", adjointness},
      {"harmonic <=> closed and co-closed", harmonic_equivalence},
      {"divergence integral", divergence},
      {"composed vs expanded Laplacian", expansion},
      {"flat-torus Hodge oracle", flat_hodge},
      {"energy identities", energy},
      {"K = 0 => parallel; sphere K > 0", parallel_fields},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  bool all = true;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Line l;
    const auto t = std::chrono::steady_clock::now();
    try {
      criteria[i].second(l);
    } catch (const std::exception& e) {
      l.flag(std::string("threw: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    std::printf("[%s] %2d %s (%.1fs): %s\n", l.pass ? "PASS" : "FAIL", id, criteria[i].first, secs, l.note.str().c_str());
    std::fflush(stdout);
    all = all && l.pass;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s in %.1fs\n", all ? "all criteria pass" : "some criteria FAIL", total);
  return all ? 0 : 1;
}
