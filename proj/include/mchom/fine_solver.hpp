#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mchom/caputo.hpp"
#include "mchom/fem.hpp"
#include "mchom/grid.hpp"
#include "mchom/media.hpp"

namespace mchom {

/// f(x, t) = space(x) * time(t). Every source used here separates this way,
/// which lets coarse load moments be computed once per block.
struct SourceTerm {
  std::function<double(Point)> space = [](Point) { return 0.0; };
  std::function<double(double)> time = [](double) { return 1.0; };

  double operator()(Point x, double t) const { return space(x) * time(t); }
};

enum class BoundaryCondition { Dirichlet0, Neumann0 };

struct TransientSettings {
  /// One order for all continua, or one order per continuum.
  std::vector<double> alphas;
  double tau = 0.02;
  double final_time = 1.0;
  BoundaryCondition boundary = BoundaryCondition::Dirichlet0;
  /// Snapshot times besides t = 0; each must be a multiple of tau.
  std::vector<double> snapshot_times;

  int steps() const;
  /// Step indices of the snapshots, t = 0 first. Throws on misaligned times.
  std::vector<int> snapshot_steps() const;
  void validate() const;
};

/// Snapshots of one or more nodal fields; `fields[s]` stacks the components.
struct Trajectory {
  int nx = 0;
  int ny = 0;
  int components = 1;
  std::vector<double> times;
  std::vector<Vector> fields;

  std::size_t nodes_per_component() const {
    return static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
  }
  /// Snapshot closest to t; throws if none lies within 1e-9.
  const Vector& at(double t) const;
  Vector component(double t, int c) const;
};

/// Advances
///
///   sum_p M_p D^{alpha_p} u + K u = F
///
/// with u^{n-1/2} = (u^n + u^{n-1})/2 in the K term and F sampled at
/// t_{n-1/2}. The implicit matrix sum_p (sigma_p a_0 / tau) M_p + K/2 is
/// factorized once.
class FractionalStepper {
 public:
  FractionalStepper(std::vector<CaputoScheme> schemes, std::vector<SparseMatrix> masses,
                    const SparseMatrix& stiffness, std::optional<DirichletCondition> bc, Vector u0,
                    Vector psi);

  /// `load` is F^{n-1/2} for the step being taken.
  void advance(const Vector& load);

  int step_index() const { return n_; }
  double time() const { return n_ * schemes_.front().tau(); }
  const Vector& current() const { return u_; }

 private:
  std::vector<CaputoScheme> schemes_;
  std::vector<SparseMatrix> masses_;
  SparseMatrix stiffness_;
  SparseMatrix system_;
  std::optional<DirichletCondition> bc_;
  std::optional<SpdSolver> solver_;
  FractionalHistory history_;
  Vector u_;
  Vector psi_;
  int n_ = 0;
};

/// Reference solution of the single- or mixed-order diffusion-wave equation
/// on the fine grid. Mixed orders weight the mass by the continuum
/// indicators; equal orders collapse to the single-order path.
Trajectory solve_fine(const StructuredMesh& mesh, const MediumField& medium,
                      const TransientSettings& settings, const SourceTerm& source,
                      const std::function<double(Point)>& initial_value,
                      const std::function<double(Point)>& initial_velocity);

/// Node values of a function on a mesh.
Vector interpolate(const TriangleMesh& mesh, const std::function<double(Point)>& f);

}  // namespace mchom
