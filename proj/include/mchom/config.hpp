#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mchom/fine_solver.hpp"
#include "mchom/grid.hpp"
#include "mchom/macro_solver.hpp"
#include "mchom/media.hpp"

namespace mchom {

/// Scalar field on the unit square:
///   gaussian: amplitude * exp(-rate * |x - center|^2)
///   constant: value
///   zero
struct FieldSpec {
  std::string kind = "zero";
  double amplitude = 1.0;
  double rate = 40.0;
  Point center{0.5, 0.5};
  double value = 0.0;

  std::function<double(Point)> function() const;
};

/// Time factor of the source:
///   constant: scale
///   power:    scale * t^exponent
struct TimeProfileSpec {
  std::string kind = "constant";
  double scale = 1.0;
  double exponent = 0.0;

  std::function<double(double)> function() const;
};

struct MediumSpec {
  std::string kind = "crossed";  // crossed | layered | homogeneous | raster
  CrossedGeometry crossed;
  LayeredGeometry layered;
  double value = 1.0;            // homogeneous
  std::filesystem::path raster;
};

struct RunConfig {
  std::string name = "run";
  MediumSpec medium;
  int nx = 400;
  int ny = 400;
  int M = 40;
  int layers = -1;  // < 0: oversampling_layers(1/M)
  RegionExtension extension = RegionExtension::Mirror;
  MacroLoad load = MacroLoad::Block;
  std::vector<double> alphas{1.5};
  double tau = 0.02;
  double final_time = 1.0;
  FieldSpec source{"gaussian"};
  TimeProfileSpec source_time;
  FieldSpec initial_value;
  FieldSpec initial_velocity;
  BoundaryCondition boundary = BoundaryCondition::Dirichlet0;
  std::string mode = "full";
  std::filesystem::path output = "out";
  std::vector<double> snapshots{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  /// Per-continuum values of A for the zero-order track; the medium's
  /// geometry supplies the labels.
  std::vector<double> zero_order_values{1.0, 1e4};

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  TransientSettings transient() const;
  SourceTerm source_term() const;
  int effective_layers() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

const std::vector<std::string>& run_modes();

}  // namespace mchom
