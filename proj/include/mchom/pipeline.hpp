#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mchom/config.hpp"
#include "mchom/macro_solver.hpp"
#include "mchom/metrics_io.hpp"
#include "mchom/upscale.hpp"

namespace mchom {

/// 16 hex digits of FNV-1a over the compact JSON dump.
std::string content_hash(const nlohmann::json& j);

/// Artifact file names. Each embeds the hash of exactly the config fields
/// that determine the artifact, so reruns find finished stages.
struct ArtifactNames {
  std::string medium;
  std::string fine;
  std::string cells;
  std::string effective;
  std::string macro;
  std::string errors;
  std::string zero_order;
};

ArtifactNames artifact_names(const RunConfig& config);

struct ZeroOrderResult {
  std::vector<ZeroOrderBlock> blocks;
  BlockTrajectory trajectory;
  /// Reference U_i per [snapshot][continuum * blocks + block] from scalar
  /// fractional ODE solves with masked block averages of the source.
  std::vector<std::vector<double>> reference;
  /// max over snapshots of |U - U_ref| / max_t |U_ref|, per continuum * blocks + block.
  std::vector<double> relative_error;
  double max_relative_error = 0.0;
  /// Largest off-diagonal |gamma_ijk| and |beta_ij| relative to the diagonal.
  double max_offdiagonal = 0.0;
};

/// Runs stages against an output directory. Each stage method recomputes
/// and stores its own artifact; prerequisites are loaded when present and
/// computed otherwise, except that compare only reads stored trajectories.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config, int jobs = 1);

  const RunConfig& config() const { return config_; }
  const StructuredMesh& mesh() const { return mesh_; }
  const CoarsePartition& partition() const { return part_; }
  std::filesystem::path path(const std::string& name) const { return config_.output / name; }
  const ArtifactNames& names() const { return names_; }

  MediumField generate_media();
  Trajectory solve_fine();
  CellLibrary solve_cells();
  std::vector<EffectiveBlock> upscale(UpscaleReport* report = nullptr);
  Trajectory solve_macro();
  ErrorTable compare();
  /// All stages in order, reusing every artifact already on disk.
  ErrorTable full();
  ZeroOrderResult zero_order();

 private:
  MediumField medium();
  Trajectory fine();
  CellLibrary cells();
  std::vector<EffectiveBlock> effective();
  Trajectory macro();

  RunConfig config_;
  int jobs_;
  StructuredMesh mesh_;
  CoarsePartition part_;
  ArtifactNames names_;
  std::optional<MediumField> medium_;
};

/// Sorted snapshot times the error tables report.
std::vector<double> report_times(const RunConfig& config);

}  // namespace mchom
