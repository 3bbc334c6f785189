#include "mchom/fine_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mchom/errors.hpp"

namespace mchom {

namespace {

constexpr double kTimeMatch = 1e-9;

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

int TransientSettings::steps() const {
  return static_cast<int>(std::lround(final_time / tau));
}

void TransientSettings::validate() const {
  if (alphas.empty()) throw ConfigError("alpha: at least one fractional order is required");
  for (double a : alphas) {
    if (!(a > 1.0 && a < 2.0)) throw ConfigError(fmt::format("alpha: {} is outside (1,2)", a));
  }
  if (!(tau > 0.0)) throw ConfigError("tau: must be positive");
  if (!(final_time > 0.0)) throw ConfigError("T: must be positive");
  if (std::abs(steps() * tau - final_time) > kTimeMatch * std::max(1.0, final_time)) {
    throw ConfigError(fmt::format("tau: T={} is not a multiple of tau={}", final_time, tau));
  }
  (void)snapshot_steps();
}

std::vector<int> TransientSettings::snapshot_steps() const {
  std::vector<int> out{0};
  for (double t : snapshot_times) {
    const double k = t / tau;
    const long r = std::lround(k);
    if (std::abs(k - r) > 1e-6 || r < 0 || r > steps()) {
      throw ConfigError(fmt::format("snapshots: t={} is not a step time in [0, T]", t));
    }
    out.push_back(static_cast<int>(r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const Vector& Trajectory::at(double t) const {
  for (std::size_t s = 0; s < times.size(); ++s) {
    if (std::abs(times[s] - t) <= kTimeMatch * std::max(1.0, std::abs(t))) return fields[s];
  }
  throw std::out_of_range(fmt::format("trajectory has no snapshot at t={}", t));
}

Vector Trajectory::component(double t, int c) const {
  const auto n = static_cast<Eigen::Index>(nodes_per_component());
  return at(t).segment(c * n, n);
}

FractionalStepper::FractionalStepper(std::vector<CaputoScheme> schemes,
                                     std::vector<SparseMatrix> masses,
                                     const SparseMatrix& stiffness,
                                     std::optional<DirichletCondition> bc, Vector u0, Vector psi)
    : schemes_(std::move(schemes)),
      masses_(std::move(masses)),
      stiffness_(stiffness),
      bc_(std::move(bc)),
      u_(std::move(u0)),
      psi_(std::move(psi)) {
  if (schemes_.empty() || schemes_.size() != masses_.size()) {
    throw std::invalid_argument("FractionalStepper: one mass matrix per order");
  }
  for (const auto& s : schemes_) {
    if (s.tau() != schemes_.front().tau()) {
      throw std::invalid_argument("FractionalStepper: orders must share the time step");
    }
  }
  system_ = 0.5 * stiffness_;
  for (std::size_t p = 0; p < schemes_.size(); ++p) {
    system_ += schemes_[p].implicit_coefficient() * masses_[p];
  }
  system_.makeCompressed();
  if (bc_) {
    const Vector zero = Vector::Zero(system_.rows());
    solver_.emplace(apply_dirichlet(system_, zero, *bc_).matrix);
    for (std::size_t k = 0; k < bc_->nodes.size(); ++k) u_[bc_->nodes[k]] = bc_->values[k];
  } else {
    solver_.emplace(system_);
  }
}

void FractionalStepper::advance(const Vector& load) {
  const int n = n_ + 1;
  if (n > schemes_.front().steps()) throw std::out_of_range("FractionalStepper: past final step");
  Vector rhs = load - 0.5 * (stiffness_ * u_);
  for (std::size_t p = 0; p < schemes_.size(); ++p) {
    const CaputoScheme& s = schemes_[p];
    const Vector weighted = s.implicit_coefficient() * u_ + s.sigma() * history_term(s, history_, n, psi_);
    rhs += masses_[p] * weighted;
  }
  if (bc_) rhs = apply_dirichlet_rhs(system_, std::move(rhs), *bc_);
  Vector next = solver_->solve(rhs);
  history_.push_step(next, u_, schemes_.front().tau());
  u_ = std::move(next);
  n_ = n;
}

Vector interpolate(const TriangleMesh& mesh, const std::function<double(Point)>& f) {
  Vector v(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) v[static_cast<Eigen::Index>(k)] = f(mesh.points[k]);
  return v;
}

Trajectory solve_fine(const StructuredMesh& mesh, const MediumField& medium,
                      const TransientSettings& settings, const SourceTerm& source,
                      const std::function<double(Point)>& initial_value,
                      const std::function<double(Point)>& initial_velocity) {
  settings.validate();
  if (medium.size() != mesh.num_triangles()) {
    throw std::invalid_argument("solve_fine: medium does not match the mesh");
  }
  const bool mixed = settings.alphas.size() > 1 && !all_equal(settings.alphas);
  if (settings.alphas.size() > 1 && static_cast<int>(settings.alphas.size()) != medium.continua) {
    throw ConfigError(fmt::format("alpha: {} orders given for {} continua", settings.alphas.size(),
                                  medium.continua));
  }
  const int steps = settings.steps();

  std::vector<CaputoScheme> schemes;
  std::vector<SparseMatrix> masses;
  if (mixed) {
    for (int p = 0; p < medium.continua; ++p) {
      schemes.emplace_back(settings.alphas[p], settings.tau, steps);
      masses.push_back(assemble_weighted_mass(mesh, characteristic(medium, p)));
    }
  } else {
    schemes.emplace_back(settings.alphas.front(), settings.tau, steps);
    masses.push_back(assemble_weighted_mass(mesh, std::vector<double>(mesh.num_triangles(), 1.0)));
  }
  const SparseMatrix K = assemble_stiffness(mesh, medium.value);
  std::optional<DirichletCondition> bc;
  if (settings.boundary == BoundaryCondition::Dirichlet0) {
    bc = DirichletCondition::homogeneous(mesh.boundary_nodes);
  }

  const Vector space_load = assemble_load(mesh, source.space);
  FractionalStepper stepper(std::move(schemes), std::move(masses), K, bc,
                            interpolate(mesh, initial_value), interpolate(mesh, initial_velocity));

  Trajectory traj;
  traj.nx = mesh.nx;
  traj.ny = mesh.ny;
  traj.components = 1;
  const std::vector<int> snaps = settings.snapshot_steps();
  auto record = [&] {
    if (std::binary_search(snaps.begin(), snaps.end(), stepper.step_index())) {
      traj.times.push_back(stepper.step_index() * settings.tau);
      traj.fields.push_back(stepper.current());
    }
  };
  record();
  for (int n = 1; n <= steps; ++n) {
    stepper.advance(source.time((n - 0.5) * settings.tau) * space_load);
    record();
    spdlog::debug("fine step {}/{}: max |u| = {:.6e}", n, steps, stepper.current().cwiseAbs().maxCoeff());
  }
  return traj;
}

}  // namespace mchom
