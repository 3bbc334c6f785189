#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mchom/grid.hpp"

namespace mchom {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Triangles of a parent mesh renumbered onto their own node set.
struct SubMesh {
  TriangleMesh mesh;
  std::vector<int> global_nodes;     // local -> parent node
  std::vector<int> global_elements;  // local -> parent triangle
};

SubMesh extract_submesh(const TriangleMesh& mesh, std::span<const int> elements);

/// P1 element matrices on one triangle (counter-clockwise vertices).
Eigen::Matrix3d local_stiffness(const Point& a, const Point& b, const Point& c);
Eigen::Matrix3d local_mass(const Point& a, const Point& b, const Point& c);

/// Gradients of the three barycentric P1 basis functions.
std::array<Eigen::Vector2d, 3> p1_gradients(const Point& a, const Point& b, const Point& c);

/// K_ij = sum_T coeff_T * int_T grad(phi_i) . grad(phi_j); coeff > 0 per triangle.
SparseMatrix assemble_stiffness(const TriangleMesh& mesh, std::span<const double> coefficient);

/// M_ij = sum_T weight_T * int_T phi_i phi_j (exact P1 integration); weight >= 0.
SparseMatrix assemble_weighted_mass(const TriangleMesh& mesh, std::span<const double> weight);

/// b_i = int f phi_i with the one-point barycenter rule.
Vector assemble_load(const TriangleMesh& mesh, const std::function<double(Point)>& f);

/// int_T u over each triangle for a nodal P1 field.
double integrate_p1(const TriangleMesh& mesh, const Vector& nodal);

bool is_symmetric(const SparseMatrix& m, double rel_tol = 1e-12);

struct DirichletCondition {
  std::vector<int> nodes;
  std::vector<double> values;

  static DirichletCondition homogeneous(std::span<const int> nodes);
};

struct ConstrainedSystem {
  SparseMatrix matrix;
  Vector rhs;
};

/// Symmetric elimination: fixed rows and columns are zeroed with a unit
/// diagonal, and the known values are lifted into the right-hand side.
ConstrainedSystem apply_dirichlet(const SparseMatrix& matrix, const Vector& rhs,
                                  const DirichletCondition& bc);

/// Right-hand side part of apply_dirichlet, for a matrix that is reused.
Vector apply_dirichlet_rhs(const SparseMatrix& original, Vector rhs, const DirichletCondition& bc);

/// Factorizes once; every solve is checked against ||Ax-b|| <= 1e-10 ||b||.
class SpdSolver {
 public:
  explicit SpdSolver(const SparseMatrix& matrix);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  Vector solve(const Vector& rhs) const;
  Eigen::Index size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve_spd(const SparseMatrix& matrix, const Vector& rhs);

struct SaddleSolution {
  Vector solution;
  Vector multipliers;
  double constraint_residual = 0.0;    // ||C u - g||_inf
  double stationarity_residual = 0.0;  // relative ||A u + C^T lambda - f||
};

/// Solves [[A, C^T], [C, 0]] (u, lambda) = (f, g) as one indefinite sparse
/// system. A may be singular as long as ker(A) meets ker(C) only at zero.
/// Row labels are used to name dependent constraints in error messages.
class SaddlePointSolver {
 public:
  SaddlePointSolver(const SparseMatrix& A, const SparseMatrix& C,
                    std::vector<std::string> row_labels = {});
  ~SaddlePointSolver();
  SaddlePointSolver(SaddlePointSolver&&) noexcept;
  SaddlePointSolver& operator=(SaddlePointSolver&&) noexcept;

  SaddleSolution solve(const Vector& g) const;
  SaddleSolution solve(const Vector& f, const Vector& g) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SaddleSolution solve_saddle(const SparseMatrix& A, const SparseMatrix& C, const Vector& g,
                            std::vector<std::string> row_labels = {});

/// Throws DegeneracyError naming the first row of C that is zero or lies in
/// the span of the rows before it.
void check_constraint_rank(const SparseMatrix& C, const std::vector<std::string>& row_labels);

}  // namespace mchom
