#include "mchom/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mchom/errors.hpp"
#include "mchom/metrics_io.hpp"

namespace mchom {

namespace {

using Triplet = Eigen::Triplet<double>;

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

SparseMatrix from_triplets(Eigen::Index n, const std::vector<Triplet>& trips) {
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// Shared time loop: snapshots at the configured steps, load scaled by h(t_{n-1/2}).
template <class Record>
void run_stepper(FractionalStepper& stepper, const TransientSettings& settings,
                 const std::function<double(double)>& time_profile, const Vector& load, Record record) {
  const std::vector<int> snaps = settings.snapshot_steps();
  auto maybe_record = [&] {
    if (std::binary_search(snaps.begin(), snaps.end(), stepper.step_index())) record(stepper);
  };
  maybe_record();
  for (int n = 1; n <= settings.steps(); ++n) {
    stepper.advance(time_profile((n - 0.5) * settings.tau) * load);
    maybe_record();
  }
}

}  // namespace

MacroOperators assemble_macro_operators(const CoarsePartition& part,
                                        const std::vector<EffectiveBlock>& blocks,
                                        bool per_order_masses, MacroLoad load_rule) {
  const StructuredMesh& coarse = part.coarse;
  if (static_cast<int>(blocks.size()) != part.num_blocks()) {
    throw std::invalid_argument(fmt::format("assemble_macro_operators: {} effective blocks for {} coarse blocks",
                                            blocks.size(), part.num_blocks()));
  }
  const int N = blocks.front().continua;
  const int nn = static_cast<int>(coarse.num_nodes());
  const Eigen::Index dim = static_cast<Eigen::Index>(N) * nn;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].block != static_cast<int>(b) || blocks[b].continua != N) {
      throw std::invalid_argument(fmt::format("assemble_macro_operators: block record {} is out of order", b));
    }
    if (load_rule == MacroLoad::Midpoint && blocks[b].point_load[0][0].size() != N) {
      throw std::invalid_argument(fmt::format("assemble_macro_operators: block {} has no point loads", b));
    }
  }

  const int orders = per_order_masses ? N : 1;
  std::vector<std::vector<Triplet>> mass(orders);
  std::vector<Triplet> diffusion;
  std::vector<Triplet> reaction;
  Vector load = Vector::Zero(dim);

  for (std::size_t t = 0; t < coarse.num_triangles(); ++t) {
    const EffectiveBlock& eb = blocks[StructuredMesh::cell_of_triangle(static_cast<int>(t))];
    const auto& tri = coarse.triangles[t];
    const Point& a = coarse.points[tri[0]];
    const Point& b = coarse.points[tri[1]];
    const Point& c = coarse.points[tri[2]];
    const double area = coarse.area(t);
    const Eigen::Matrix3d m_local = local_mass(a, b, c);
    const auto grads = p1_gradients(a, b, c);
    const DenseMatrix react = eb.reaction();

    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < N; ++i) {
        for (int r = 0; r < 3; ++r) {      // test node, continuum j
          for (int s = 0; s < 3; ++s) {    // trial node, continuum i
            const Eigen::Index row = static_cast<Eigen::Index>(j) * nn + tri[r];
            const Eigen::Index col = static_cast<Eigen::Index>(i) * nn + tri[s];
            double d = 0.0;
            for (int m = 0; m < 2; ++m) {
              for (int n = 0; n < 2; ++n) d += eb.Bmn_hat[m][n](j, i) * grads[s][m] * grads[r][n];
            }
            diffusion.emplace_back(row, col, area * d);
            reaction.emplace_back(row, col, react(j, i) * m_local(r, s));
            if (per_order_masses) {
              for (int p = 0; p < N; ++p) mass[p].emplace_back(row, col, eb.Cp_hat[p](j, i) * m_local(r, s));
            } else {
              mass[0].emplace_back(row, col, eb.C_hat(j, i) * m_local(r, s));
            }
          }
        }
      }
      const int k = static_cast<int>(t % 2);
      for (int r = 0; r < 3; ++r) {
        double f = eb.load[j];
        if (load_rule == MacroLoad::Midpoint) {
          // Edge-midpoint rule; the hat function of vertex r is 1/2 on its two edges.
          f = 0.5 * (eb.point_load[k][r][j] + eb.point_load[k][(r + 2) % 3][j]);
        }
        load[static_cast<Eigen::Index>(j) * nn + tri[r]] += f * area / 3.0;
      }
    }
  }

  MacroOperators ops;
  ops.continua = N;
  ops.nodes = nn;
  for (const auto& m : mass) ops.masses.push_back(from_triplets(dim, m));
  ops.diffusion = from_triplets(dim, diffusion);
  ops.reaction = from_triplets(dim, reaction);
  ops.load = load;
  return ops;
}

Vector macro_initial_conditions(const StructuredMesh& mesh, const CoarsePartition& part,
                                const MediumField& medium, const Vector& fine_field) {
  const StructuredMesh& coarse = part.coarse;
  const int nn = static_cast<int>(coarse.num_nodes());
  Vector out = Vector::Zero(static_cast<Eigen::Index>(medium.continua) * nn);
  for (int i = 0; i < medium.continua; ++i) {
    const auto avg = block_continuum_average(mesh, part, medium, fine_field, i);
    for (int ny = 0; ny <= part.M; ++ny) {
      for (int nx = 0; nx <= part.M; ++nx) {
        double sum = 0.0;
        int count = 0;
        for (int by = std::max(ny - 1, 0); by <= std::min(ny, part.M - 1); ++by) {
          for (int bx = std::max(nx - 1, 0); bx <= std::min(nx, part.M - 1); ++bx) {
            const double v = avg[part.block_id(bx, by)];
            if (std::isnan(v)) continue;
            sum += v;
            ++count;
          }
        }
        if (count == 0) {
          throw DegeneracyError(fmt::format("initial averaging: continuum {} absent around coarse node ({}, {})",
                                            i + 1, nx, ny));
        }
        out[static_cast<Eigen::Index>(i) * nn + coarse.node_index(nx, ny)] = sum / count;
      }
    }
  }
  return out;
}

Trajectory solve_macro(const CoarsePartition& part, const std::vector<EffectiveBlock>& blocks,
                       const TransientSettings& settings,
                       const std::function<double(double)>& time_profile, const Vector& U0,
                       const Vector& V0, MacroLoad load) {
  settings.validate();
  const int N = blocks.at(0).continua;
  if (settings.alphas.size() > 1 && static_cast<int>(settings.alphas.size()) != N) {
    throw ConfigError(fmt::format("alpha: {} orders given for {} continua", settings.alphas.size(), N));
  }
  const bool mixed = settings.alphas.size() > 1 && !all_equal(settings.alphas);
  MacroOperators ops = assemble_macro_operators(part, blocks, mixed, load);
  const Eigen::Index dim = static_cast<Eigen::Index>(N) * ops.nodes;
  if (U0.size() != dim || V0.size() != dim) throw std::invalid_argument("solve_macro: initial data size mismatch");

  std::vector<CaputoScheme> schemes;
  if (mixed) {
    for (double a : settings.alphas) schemes.emplace_back(a, settings.tau, settings.steps());
  } else {
    schemes.emplace_back(settings.alphas.front(), settings.tau, settings.steps());
  }
  std::optional<DirichletCondition> bc;
  if (settings.boundary == BoundaryCondition::Dirichlet0) {
    std::vector<int> nodes;
    for (int i = 0; i < N; ++i) {
      for (int n : part.coarse.boundary_nodes) nodes.push_back(i * ops.nodes + n);
    }
    bc = DirichletCondition::homogeneous(nodes);
  }
  FractionalStepper stepper(std::move(schemes), std::move(ops.masses), ops.stiffness(), bc, U0, V0);

  Trajectory traj;
  traj.nx = part.M;
  traj.ny = part.M;
  traj.components = N;
  run_stepper(stepper, settings, time_profile, ops.load, [&](const FractionalStepper& s) {
    traj.times.push_back(s.step_index() * settings.tau);
    traj.fields.push_back(s.current());
  });
  return traj;
}

BlockTrajectory solve_zero_order(const std::vector<ZeroOrderBlock>& blocks,
                                 const TransientSettings& settings,
                                 const std::function<double(double)>& time_profile) {
  settings.validate();
  if (blocks.empty()) throw std::invalid_argument("solve_zero_order: no blocks");
  const int N = static_cast<int>(blocks.front().gamma.size());
  const int nb = static_cast<int>(blocks.size());
  if (settings.alphas.size() > 1 && static_cast<int>(settings.alphas.size()) != N) {
    throw ConfigError(fmt::format("alpha: {} orders given for {} continua", settings.alphas.size(), N));
  }
  const bool mixed = settings.alphas.size() > 1 && !all_equal(settings.alphas);
  const Eigen::Index dim = static_cast<Eigen::Index>(N) * nb;

  const int orders = mixed ? N : 1;
  std::vector<std::vector<Triplet>> mass(orders);
  std::vector<Triplet> stiff;
  Vector load(dim);
  for (int i = 0; i < N; ++i) {
    for (int b = 0; b < nb; ++b) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * nb + b;
      mass[mixed ? i : 0].emplace_back(k, k, blocks[b].gamma[i]);
      stiff.emplace_back(k, k, blocks[b].beta[i]);
      load[k] = blocks[b].b[i];
    }
  }
  std::vector<CaputoScheme> schemes;
  std::vector<SparseMatrix> masses;
  for (int p = 0; p < orders; ++p) {
    schemes.emplace_back(settings.alphas[mixed ? p : 0], settings.tau, settings.steps());
    masses.push_back(from_triplets(dim, mass[p]));
  }
  FractionalStepper stepper(std::move(schemes), std::move(masses), from_triplets(dim, stiff), std::nullopt,
                            Vector::Zero(dim), Vector::Zero(dim));
  BlockTrajectory traj;
  traj.blocks = nb;
  traj.continua = N;
  run_stepper(stepper, settings, time_profile, load, [&](const FractionalStepper& s) {
    traj.times.push_back(s.step_index() * settings.tau);
    traj.values.push_back(s.current());
  });
  return traj;
}

}  // namespace mchom
