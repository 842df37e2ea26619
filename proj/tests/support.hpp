#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "finsler/builtins.hpp"
#include "finsler/checks.hpp"
#include "finsler/curvature.hpp"
#include "finsler/metric.hpp"

namespace test {

using namespace finsler;

inline constexpr double pi = std::numbers::pi;

inline TangentPoint at(std::vector<double> x, std::vector<double> y) { return {std::move(x), std::move(y)}; }

inline double max_abs(const TensorValue& t) { return t.max_abs(); }

inline double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

inline FinslerStructure flat() { return builtins::metric("euclidean"); }
inline FinslerStructure randers() { return builtins::metric("randers-torus"); }
inline FinslerStructure sphere() { return builtins::metric("riemannian-sphere"); }

}  // namespace test
