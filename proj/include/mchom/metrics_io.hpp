#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mchom/fem.hpp"
#include "mchom/fine_solver.hpp"
#include "mchom/grid.hpp"
#include "mchom/media.hpp"

namespace mchom {

/// (1/|K cap Omega_i|) int_{K cap Omega_i} u per coarse block K, integrating
/// the P1 field elementwise. Blocks without continuum i get NaN.
std::vector<double> block_continuum_average(const StructuredMesh& mesh, const CoarsePartition& part,
                                            const MediumField& medium, const Vector& field, int i);

/// (1/|K|) int_K U per coarse block for a nodal field on the coarse mesh.
std::vector<double> coarse_block_average(const CoarsePartition& part, const Vector& coarse_field);

/// sqrt(sum_K |coarse_K - fine_K|^2 / sum_K |fine_K|^2) in percent. Blocks
/// where either value is NaN are skipped; an all-zero reference has no
/// defined error and yields nullopt.
std::optional<double> relative_error_percent(std::span<const double> coarse,
                                             std::span<const double> fine);

struct ErrorTable {
  int continua = 2;
  std::vector<double> times;
  std::vector<std::vector<double>> percent;  // [row][continuum]
};

/// Errors of every continuum at each requested time, from stored snapshots.
ErrorTable compare_trajectories(const StructuredMesh& mesh, const CoarsePartition& part,
                                const MediumField& medium, const Trajectory& fine,
                                const Trajectory& macro, const std::vector<double>& times);

/// CSV with a version comment, a `t,e1_percent,...` header and 4-decimal values.
void write_error_table(const std::filesystem::path& path, const ErrorTable& table);
ErrorTable read_error_table(const std::filesystem::path& path);
std::string format_error_table(const ErrorTable& table);

/// Field text format: version comment, `nx ny`, then (nx+1)(ny+1) nodal
/// values row-major (x fastest), 17 significant digits.
void write_field(const std::filesystem::path& path, int nx, int ny, const Vector& values);
std::pair<std::pair<int, int>, Vector> read_field(const std::filesystem::path& path);

/// Legacy ASCII VTK unstructured grid with named point data.
void write_vtk(const std::filesystem::path& path, const TriangleMesh& mesh,
               const std::vector<std::pair<std::string, Vector>>& point_data);

/// Binary trajectory: the line `mchom-trajectory v1`, then int32 nx, ny,
/// components, snapshot count, then per snapshot a float64 time followed by
/// the stacked float64 values, all little-endian.
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace mchom
