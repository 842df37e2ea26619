#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "finsler/quadrature.hpp"

namespace finsler {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Tolerances the engine itself applies, embedded in every report.
nlohmann::json engine_tolerances();

struct Task {
  std::string kind;  ///< tensor | curvature | laplacian | harmonic | integrate | check
  nlohmann::json params;
  std::optional<double> tolerance;
};

struct Scenario {
  nlohmann::json metric_spec;
  FinslerStructure metric;
  std::vector<Task> tasks;
  GridSpec grid;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string format = "json";
  /// Canonical serialization the report hash is taken over.
  std::string canonical;

  /// Validates everything (metric, grid, every task's params) before any
  /// computation. Throws ConfigError.
  static Scenario parse(const nlohmann::json& doc);
  static Scenario load(const std::string& path);
};

struct TaskResult {
  std::size_t index = 0;
  std::string kind;
  nlohmann::json params;
  nlohmann::json result;
  /// Residual or defect compared against the tolerance; null when the task
  /// only reports values.
  std::optional<double> measure;
  std::optional<double> tolerance;
  bool pass = true;
  std::string error;
  double wall_time_s = 0.0;
};

struct Report {
  std::string scenario_sha256;
  std::uint64_t seed = 0;
  std::string metric;
  GridSpec grid;
  std::vector<TaskResult> tasks;
  bool all_pass = true;
  double wall_time_s = 0.0;

  /// Wall-time fields are omitted when `timing` is false.
  nlohmann::json to_json(bool timing = true) const;
  /// One row per task: index,kind,status,measure,tolerance,error.
  std::string to_csv() const;
  int exit_code() const { return all_pass ? 0 : 1; }
};

/// Runs tasks in order. A task whose operation throws is recorded as failed
/// with a TaskError naming its index; later tasks still run.
Report run_scenario(const Scenario& sc);

/// Metric families, form and vector-field ids, checks, default grids.
nlohmann::json list_builtins();

std::string sha256_hex(std::string_view data);

/// Grid from "default", "doubled", "32x32/64" or {"base": [...], "fiber": [...]}.
GridSpec grid_from_json(const nlohmann::json& j, int dim);
GridSpec parse_grid(const std::string& text, int dim);
nlohmann::json grid_to_json(const GridSpec& g);

/// Comma-separated 2n numbers: x then y.
TangentPoint parse_point(const std::string& text, int dim);
TangentPoint point_from_json(const nlohmann::json& j, int dim);

/// Tensor/curvature by name at a point.
TensorValue named_tensor(const FinslerStructure& s, const std::string& name, const TangentPoint& z);
TensorValue named_curvature(const FinslerStructure& s, const std::string& name, const TangentPoint& z);
const std::vector<std::string>& tensor_names();
const std::vector<std::string>& curvature_names();

nlohmann::json tensor_json(const TensorValue& t);
/// 17 significant digits.
std::string format_double(double v);

}  // namespace finsler
