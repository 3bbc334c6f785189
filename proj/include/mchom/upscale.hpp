#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "mchom/cells.hpp"
#include "mchom/fem.hpp"
#include "mchom/grid.hpp"
#include "mchom/media.hpp"

namespace mchom {

/// One coarse block with its own node numbering, row-major over the block's
/// fine nodes (x fastest). Cell solutions restricted to the block use the
/// same numbering.
struct RveMesh {
  int block = 0;
  TriangleMesh mesh;
  std::vector<double> coefficient;
  std::vector<int> labels;
  int continua = 1;

  double area() const;
};

RveMesh build_rve_mesh(const StructuredMesh& mesh, const CoarsePartition& part,
                       const MediumField& medium, int block);

/// All 3N cell solutions of one region, restricted to the center block.
struct CellSolutions {
  std::vector<Vector> average;                 // phi_i
  std::vector<std::array<Vector, 2>> gradient;  // phi_i^m
  std::vector<double> average_energy;          // over the whole oversampled region
  std::vector<std::array<double, 2>> gradient_energy;
  double max_constraint_residual = 0.0;
  double max_stationarity_residual = 0.0;
};

CellSolutions solve_cells(const CellProblem& problem, const CoarsePartition& part);

/// Effective tensors of one block. Matrices are indexed (j, i), i.e. the
/// first index is the test continuum. Raw tensors are integrals over the
/// RVE; the hatted ones carry the scaling by |R| and eps = H.
struct EffectiveBlock {
  int block = 0;
  int continua = 1;
  double eps = 0.0;
  double area = 0.0;

  DenseMatrix C;                                     // int phi_i phi_j
  std::vector<DenseMatrix> Cp;                       // int phi_i phi_j psi_p
  DenseMatrix B;                                     // int kappa grad phi_i . grad phi_j
  std::array<DenseMatrix, 2> Bm;                     // int kappa grad phi_i^m . grad phi_j
  std::array<DenseMatrix, 2> Bn;                     // int kappa grad phi_i . grad phi_j^n
  std::array<std::array<DenseMatrix, 2>, 2> Bmn;     // [m][n]: int kappa grad phi_i^m . grad phi_j^n

  DenseMatrix C_hat;
  std::vector<DenseMatrix> Cp_hat;
  DenseMatrix B_hat;
  std::array<DenseMatrix, 2> Bm_hat;
  std::array<std::array<DenseMatrix, 2>, 2> Bmn_hat;

  /// |R|^-1 int g phi_j for the spatial source factor g; f_j(t) = load * h(t).
  Vector load;
  /// The same moment as a macroscopic field: the RVE translated so its
  /// center sits at x, sampled at the edge midpoints of the block's two
  /// coarse triangles. [triangle][edge q, between local vertices q and q+1].
  /// Empty when the block was built without a partition.
  std::array<std::array<Vector, 3>, 2> point_load;

  // Mixed-order moments kept for inspection only: int phi_i^m phi_j psi_p,
  // int phi_i phi_j^n psi_p and int phi_i^m phi_j^n psi_p.
  std::array<std::vector<DenseMatrix>, 2> Cm_p;
  std::array<std::vector<DenseMatrix>, 2> Cn_p;
  std::array<std::array<std::vector<DenseMatrix>, 2>, 2> Cmn_p;

  /// Reaction coefficient B_hat / eps^2, i.e. B / |R|.
  DenseMatrix reaction() const { return B_hat / (eps * eps); }
};

EffectiveBlock compute_effective(const RveMesh& rve, const CellSolutions& cells, double eps,
                                 const std::function<double(Point)>& source_space);

/// |R|^-1 int f phi_j with the barycenter rule.
Vector load_moments(const RveMesh& rve, const std::vector<Vector>& average,
                    const std::function<double(Point)>& f);

/// point_load entries for block `rve.block`.
std::array<std::array<Vector, 3>, 2> point_load_moments(const RveMesh& rve, const std::vector<Vector>& average,
                                                       const CoarsePartition& part,
                                                       const std::function<double(Point)>& f);

/// Largest relative violation of B_ji = B_ij and B^{mn}_ji = B^{nm}_ij.
double symmetry_defect(const EffectiveBlock& block);

/// Largest |sum_p C_jip - C_ji| relative to max |C|.
double mass_split_defect(const EffectiveBlock& block);

struct UpscaleOptions {
  int layers = -1;  // < 0: oversampling_layers(H)
  int jobs = 1;
  RegionExtension extension = RegionExtension::Mirror;
};

struct UpscaleReport {
  std::size_t blocks = 0;
  std::size_t classes = 0;
  double max_constraint_residual = 0.0;
  double max_stationarity_residual = 0.0;
  double max_symmetry_defect = 0.0;
  double max_mass_split_defect = 0.0;
};

/// Cell solutions for every coarse block. Blocks whose regions have equal
/// signatures share one entry of `solutions`.
struct CellLibrary {
  int continua = 1;
  int layers = 0;
  RegionExtension extension = RegionExtension::Mirror;
  std::vector<int> block_class;
  std::vector<CellSolutions> solutions;

  const CellSolutions& of_block(int b) const { return solutions.at(block_class.at(b)); }
};

CellLibrary solve_cell_library(const StructuredMesh& mesh, const CoarsePartition& part,
                               const MediumField& medium, const UpscaleOptions& options);

/// Effective tensors from stored cell solutions.
std::vector<EffectiveBlock> effective_blocks(const StructuredMesh& mesh, const CoarsePartition& part,
                                             const MediumField& medium, const CellLibrary& library,
                                             const std::function<double(Point)>& source_space,
                                             int jobs = 1, UpscaleReport* report = nullptr);

/// solve_cell_library followed by effective_blocks.
std::vector<EffectiveBlock> upscale(const StructuredMesh& mesh, const CoarsePartition& part,
                                    const MediumField& medium,
                                    const std::function<double(Point)>& source_space,
                                    const UpscaleOptions& options, UpscaleReport* report = nullptr);

/// Binary cell library: the line `mchom-cells v1`, int32 continua, layers,
/// extension, class count, block count, the int32 block classes, then per
/// class the restricted node count, the float64 vectors phi_i, phi_i^1,
/// phi_i^2 for each i, the energies and the two residuals.
void save_cell_library(const std::filesystem::path& path, const CellLibrary& library);
CellLibrary load_cell_library(const std::filesystem::path& path);

/// Constants of the zero-order model on one block. phi_i = C_i psi_i / A.
struct ZeroOrderBlock {
  int block = 0;
  std::vector<double> C;
  std::vector<double> gamma;  // C_i^2 int psi_i^3 / A^2
  std::vector<double> beta;   // C_i int psi_i
  std::vector<double> b;      // int g phi_i for the spatial source factor g

  /// Full gamma_{ijk} = int C_i C_j psi_i psi_j psi_k / A^2, indexed [i][j][k],
  /// and beta_{ij} = int A phi_i phi_j; only the diagonals survive.
  std::vector<std::vector<std::vector<double>>> gamma_full;
  std::vector<std::vector<double>> beta_full;
};

ZeroOrderBlock zero_order_constants(const RveMesh& rve,
                                    const std::function<double(Point)>& source_space);

/// Effective-block file: a comment header describing the columns, then one
/// whitespace-separated record per block with 17 significant digits.
void save_effective_blocks(const std::filesystem::path& path,
                           const std::vector<EffectiveBlock>& blocks);
std::vector<EffectiveBlock> load_effective_blocks(const std::filesystem::path& path);

}  // namespace mchom
