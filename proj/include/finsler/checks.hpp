#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/forms.hpp"
#include "finsler/quadrature.hpp"

namespace finsler::checks {

/// Worst residual of a seeded suite plus per-item detail for reports.
struct Outcome {
  double max_residual = 0.0;
  std::size_t items = 0;
  nlohmann::json detail = nlohmann::json::array();

  void add(double residual, nlohmann::json item);
};

/// Seeded points of SM inside the usable chart; non-periodic axes keep an
/// extra 10% clearance from the margin.
std::vector<SpherePoint> random_points(const FinslerStructure& s, std::size_t count, std::uint64_t seed);

/// F, g, C, l, T homogeneity and Euler identities, relative residuals.
Outcome homogeneity(const FinslerStructure& s, std::size_t points, std::uint64_t seed);

/// Round-sphere closed forms: Gamma, R^h_kij, Ricci; and the vanishing of C, P, Q, T.
struct SphereReduction {
  Outcome closed_forms;
  Outcome vanishing;
};
SphereReduction sphere_reduction(const FinslerStructure& sphere, std::size_t points, std::uint64_t seed);

/// One seeded vector field per item, residual at one seeded point each.
Outcome ricci_identity(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, bool sphere_fields = false);

/// (d phi, psi) vs (phi, delta psi) for seeded pairs of degrees p and p+1.
Outcome adjointness(const FinslerStructure& s, int p, std::size_t pairs, std::uint64_t seed, const GridSpec& grid);

Outcome divergence(const FinslerStructure& s, std::size_t forms, std::uint64_t seed, const GridSpec& grid);

/// Composed Laplacian vs the expanded formula, seeded degree-p forms at seeded points.
Outcome laplacian_expansion(const FinslerStructure& s, int p, std::size_t forms, std::uint64_t seed,
                            std::size_t points_per_form = 2);

/// Pointwise energy identities for seeded vector fields.
Outcome energy(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, bool sphere_fields = false);

/// Weitzenbock residual vs the composed Laplacian of the associated form.
Outcome weitzenbock(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, bool sphere_fields = false);

/// |integral of (delta Z - delta Y)| for seeded vector fields.
Outcome divergence_energy(const FinslerStructure& s, std::size_t fields, std::uint64_t seed, const GridSpec& grid,
                          bool sphere_fields = false);

/// Maximum |(Delta phi) - expected| over seeded points, for an expected form.
Outcome laplacian_against(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& expected,
                          std::size_t points, std::uint64_t seed);

/// Names accepted by run().
const std::vector<std::string>& names();

/// Dispatch by name with params {count, p, seed}; throws ConfigError on an unknown name.
Outcome run(const std::string& name, const FinslerStructure& s, const nlohmann::json& params, std::uint64_t seed,
            const GridSpec& grid);

}  // namespace finsler::checks
