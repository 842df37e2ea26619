#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/forms.hpp"
#include "finsler/quadrature.hpp"

namespace finsler::builtins {

struct CatalogEntry {
  std::string id;
  std::string description;
};

/// Stable, sorted-by-registration catalogs.
const std::vector<CatalogEntry>& metrics();
const std::vector<CatalogEntry>& forms();
const std::vector<CatalogEntry>& vector_fields();
/// Expression ids accepted by the "custom" JSON family.
const std::vector<CatalogEntry>& expressions();

/// Throws ConfigError for an unknown id.
FinslerStructure metric(const std::string& id);
HorizontalForm form(const std::string& id, int dim);
VectorField vector_field(const std::string& id, int dim);

/// {"family": "euclidean|riemannian|randers|custom", "dim", "a", "b", "expression", "chart": {...}},
/// or {"builtin": id}, or a bare id string.
FinslerStructure metric_from_json(const nlohmann::json& j);
ChartSpec chart_from_json(const nlohmann::json& j, int dim);

/// Seeded trigonometric degree-p form on the torus chart: each independent
/// component is a short Fourier sum in x times an affine factor in y/F.
HorizontalForm random_form(int dim, int degree, std::uint64_t seed);
/// Seeded trigonometric vector field X^i(x) with integer frequencies <= 2.
/// On the sphere chart components carry a sin^2(theta) factor.
VectorField random_vector_field(int dim, std::uint64_t seed, bool sphere_chart = false);

/// Derived stream seed for the k-th item of a suite.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k);

}  // namespace finsler::builtins
