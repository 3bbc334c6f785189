#pragma once

#include <functional>
#include <vector>

#include "mchom/fem.hpp"
#include "mchom/fine_solver.hpp"
#include "mchom/grid.hpp"
#include "mchom/media.hpp"
#include "mchom/upscale.hpp"

namespace mchom {

/// Coarse operators over N continua with unknowns ordered continuum-major:
/// index i * nodes + a for continuum i at coarse node a.
struct MacroOperators {
  int continua = 1;
  int nodes = 0;
  /// One mass per order: the C_hat block operator, or C_hat_{..p} per order p.
  std::vector<SparseMatrix> masses;
  SparseMatrix diffusion;  // B_hat^{mn}_ji grad_m U_i grad_n V_j
  SparseMatrix reaction;   // eps^-2 B_hat_ji U_i V_j
  Vector load;             // f_j moments against the coarse basis, at h(t) = 1

  SparseMatrix stiffness() const { return diffusion + reaction; }
};

/// How the load moments f_j enter the coarse load vector.
enum class MacroLoad {
  Block,     // f_j constant on each coarse block
  Midpoint,  // f_j as a field (EffectiveBlock::point_load), edge-midpoint rule
};

/// `per_order_masses` selects the mixed-order split of the mass by continuum.
MacroOperators assemble_macro_operators(const CoarsePartition& part,
                                        const std::vector<EffectiveBlock>& blocks,
                                        bool per_order_masses, MacroLoad load = MacroLoad::Block);

/// Coarse node values from a fine field: continuum-i masked averages per
/// block, then the mean over the blocks touching each node. Stacked
/// continuum-major like the macro unknowns.
Vector macro_initial_conditions(const StructuredMesh& mesh, const CoarsePartition& part,
                                const MediumField& medium, const Vector& fine_field);

/// Time-steps the multicontinuum model with the same scheme as the fine
/// solver. Orders: one shared order, or one order per continuum.
Trajectory solve_macro(const CoarsePartition& part, const std::vector<EffectiveBlock>& blocks,
                       const TransientSettings& settings,
                       const std::function<double(double)>& time_profile, const Vector& U0,
                       const Vector& V0, MacroLoad load = MacroLoad::Block);

/// Block values stacked continuum-major (i * blocks + b), one vector per snapshot.
struct BlockTrajectory {
  int blocks = 0;
  int continua = 1;
  std::vector<double> times;
  std::vector<Vector> values;

  double value(std::size_t snapshot, int continuum, int block) const {
    return values.at(snapshot)[continuum * blocks + block];
  }
};

/// Per-block, per-continuum solutions of gamma_i D^{alpha_i} U_i + beta_i U_i = b_i h(t),
/// starting from rest.
BlockTrajectory solve_zero_order(const std::vector<ZeroOrderBlock>& blocks,
                                 const TransientSettings& settings,
                                 const std::function<double(double)>& time_profile);

}  // namespace mchom
