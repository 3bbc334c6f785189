#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mchom/fem.hpp"
#include "mchom/grid.hpp"
#include "mchom/media.hpp"

namespace mchom {

enum class BasisKind { Average, Gradient };

/// One constrained cell solution on an oversampled region.
struct CellBasis {
  int block = 0;
  int continuum = 0;
  BasisKind kind = BasisKind::Average;
  int direction = -1;  // 0 or 1 for the gradient kind
  Vector values;       // nodal values on the region's local nodes
  /// beta_{ij}^p (or beta_{ij}^{mp}) indexed [p * N + j], with beta = -lambda of the KKT solve.
  Vector multipliers;
  double constraint_residual = 0.0;
  double stationarity_residual = 0.0;
  double energy = 0.0;  // int_{R+} kappa |grad phi|^2
};

/// c_{mj} = int_{R} x_m psi_j / int_{R} psi_j over the fine triangles of one block.
double centroid(const StructuredMesh& mesh, const CoarsePartition& part, const MediumField& medium,
                int block, int continuum, int direction);

/// Minimizes int_{R+} kappa |grad phi|^2 over P1 functions on the oversampled
/// region (natural boundary) subject to one average constraint per member
/// block p and continuum j:
///
///   average kind:  avg_{R^p cap Omega_j} phi = delta_ij
///   gradient kind: avg_{R^p cap Omega_j} phi = delta_ij avg_{R^p cap Omega_j} (x_m - c_{mj})
///
/// The KKT matrix is factorized once and shared by all right-hand sides.
class CellProblem {
 public:
  CellProblem(const StructuredMesh& mesh, const CoarsePartition& part, const MediumField& medium,
              int block, int layers, RegionExtension extension = RegionExtension::Clip);
  ~CellProblem();
  CellProblem(CellProblem&&) noexcept;
  CellProblem& operator=(CellProblem&&) noexcept;

  const OversampledRegion& region() const;
  int continua() const;
  /// Local triangle ids of the center block (the RVE).
  const std::vector<int>& rve_elements() const;
  const std::vector<double>& local_coefficient() const;
  const std::vector<int>& local_labels() const;
  const SparseMatrix& constraints() const;
  const SparseMatrix& stiffness() const;

  double centroid(int continuum, int direction) const;
  Vector average_rhs(int i) const;
  Vector gradient_rhs(int i, int m) const;

  CellBasis solve_average(int i) const;
  CellBasis solve_gradient(int i, int m) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Hash of everything a cell problem depends on up to translation: region
/// shape, block layout, center position, and the local coefficient/labels.
/// Two regions with equal signatures have translated copies of the same
/// cell solutions.
struct RegionSignature {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  friend bool operator==(const RegionSignature&, const RegionSignature&) = default;
  friend auto operator<=>(const RegionSignature&, const RegionSignature&) = default;
};

RegionSignature region_signature(const StructuredMesh& mesh, const CoarsePartition& part,
                                 const MediumField& medium, const OversampledRegion& region);

}  // namespace mchom
