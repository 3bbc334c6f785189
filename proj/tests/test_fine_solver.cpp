#include <doctest.h>

#include <cmath>

#include "mchom/fine_solver.hpp"
#include "mchom/media.hpp"

using namespace mchom;

namespace {

TransientSettings settings(std::vector<double> alphas, double tau, double T, BoundaryCondition bc,
                           std::vector<double> snaps) {
  TransientSettings s;
  s.alphas = std::move(alphas);
  s.tau = tau;
  s.final_time = T;
  s.boundary = bc;
  s.snapshot_times = std::move(snaps);
  return s;
}

SourceTerm gaussian() {
  SourceTerm f;
  f.space = [](Point p) { return std::exp(-40.0 * ((p.x - 0.5) * (p.x - 0.5) + (p.y - 0.5) * (p.y - 0.5))); };
  return f;
}

const auto zero = [](Point) { return 0.0; };

}  // namespace

TEST_CASE("zero data stays zero") {
  const auto mesh = build_fine_mesh(20, 20);
  const auto medium = homogeneous_field(mesh, 1.0);
  const auto traj = solve_fine(mesh, medium, settings({1.5}, 0.02, 1.0, BoundaryCondition::Dirichlet0, {0.2, 0.6, 1.0}),
                               SourceTerm{}, zero, zero);
  CHECK(traj.times.size() == 4);
  CHECK(traj.times.front() == 0.0);
  for (const auto& f : traj.fields) CHECK(f.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("misaligned snapshot times are rejected") {
  auto s = settings({1.5}, 0.02, 1.0, BoundaryCondition::Dirichlet0, {0.105});
  CHECK_THROWS(s.snapshot_steps());
  s = settings({2.0}, 0.02, 1.0, BoundaryCondition::Dirichlet0, {0.1});
  CHECK_THROWS(s.validate());
}

TEST_CASE("runs are bitwise reproducible and symmetric under x <-> y") {
  const auto mesh = build_fine_mesh(40, 40);
  const auto medium = crossed_field(mesh, {0.25, 0.05, 0.1, 1e-4, 1.0});
  const auto s = settings({1.5}, 0.02, 0.4, BoundaryCondition::Dirichlet0, {0.2, 0.4});
  const auto a = solve_fine(mesh, medium, s, gaussian(), zero, zero);
  const auto b = solve_fine(mesh, medium, s, gaussian(), zero, zero);
  for (std::size_t k = 0; k < a.fields.size(); ++k) CHECK((a.fields[k].array() == b.fields[k].array()).all());

  const Vector& u = a.at(0.4);
  double peak = u.cwiseAbs().maxCoeff();
  CHECK(peak > 0.0);
  double asym = 0.0;
  for (int j = 0; j <= 40; ++j) {
    for (int i = 0; i <= 40; ++i) asym = std::max(asym, std::abs(u[mesh.node_index(i, j)] - u[mesh.node_index(j, i)]));
  }
  CHECK(asym <= 1e-10 * peak);
}

TEST_CASE("equal orders per continuum reproduce the single-order run") {
  const auto mesh = build_fine_mesh(40, 40);
  const auto medium = crossed_field(mesh, {0.25, 0.05, 0.1, 1e-4, 1.0});
  const auto single = solve_fine(mesh, medium, settings({1.4}, 0.05, 0.5, BoundaryCondition::Neumann0, {0.5}),
                                 gaussian(), zero, zero);
  const auto mixed = solve_fine(mesh, medium, settings({1.4, 1.4}, 0.05, 0.5, BoundaryCondition::Neumann0, {0.5}),
                                gaussian(), zero, zero);
  CHECK((single.at(0.5).array() == mixed.at(0.5).array()).all());
}

TEST_CASE("time stepping stays bounded as tau is refined") {
  const auto mesh = build_fine_mesh(20, 20);
  const auto medium = homogeneous_field(mesh, 1.0);
  const auto u0 = [](Point p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
  std::vector<Vector> finals;
  for (double tau : {0.08, 0.04, 0.02, 0.01}) {
    const auto traj = solve_fine(mesh, medium, settings({1.7}, tau, 0.96, BoundaryCondition::Dirichlet0, {0.32, 0.96}),
                                 SourceTerm{}, u0, zero);
    double peak = 0.0;
    for (const auto& f : traj.fields) peak = std::max(peak, f.cwiseAbs().maxCoeff());
    CHECK(peak <= 1.0 + 1e-12);
    finals.push_back(traj.at(0.96));
  }
  // Successive refinements move the solution by less and less.
  for (std::size_t k = 2; k < finals.size(); ++k) {
    CHECK((finals[k] - finals[k - 1]).norm() < (finals[k - 1] - finals[k - 2]).norm());
  }
}

TEST_CASE("spatially uniform Neumann problem tracks t^2") {
  // With u = t^2 everywhere the gradient vanishes and D^alpha t^2 = 2 t^{2-alpha} / Gamma(3-alpha).
  const double alpha = 1.5;
  const auto mesh = build_fine_mesh(8, 8);
  const auto medium = crossed_field(mesh, {0.5, 0.125, 0.25, 1e-4, 1.0});
  SourceTerm f;
  f.space = [](Point) { return 1.0; };
  f.time = [alpha](double t) { return 2.0 * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha); };
  double errors[2];
  int k = 0;
  for (double tau : {0.02, 0.01}) {
    const auto traj = solve_fine(mesh, medium, settings({alpha}, tau, 1.0, BoundaryCondition::Neumann0, {0.5, 1.0}),
                                 f, zero, zero);
    errors[k++] = (traj.at(1.0).array() - 1.0).abs().maxCoeff();
    CHECK((traj.at(1.0).array() - traj.at(1.0)[0]).abs().maxCoeff() <= 1e-10);
  }
  CHECK(errors[1] < errors[0]);
  CHECK(std::log2(errors[0] / errors[1]) == doctest::Approx(3.0 - alpha).epsilon(0.15));
}

TEST_CASE("crossed-medium runs stay bounded over 50 steps for every tau") {
  const auto mesh = build_fine_mesh(400, 400);
  const auto medium = crossed_field(mesh, {});
  for (double tau : {0.08, 0.04, 0.02}) {
    std::vector<double> snaps;
    for (int n = 1; n <= 50; ++n) snaps.push_back(n * tau);
    const auto traj =
        solve_fine(mesh, medium, settings({1.5}, tau, 50 * tau, BoundaryCondition::Dirichlet0, snaps), gaussian(), zero, zero);
    REQUIRE(traj.fields.size() == 51);
    double peak = 0.0;
    for (const auto& f : traj.fields) {
      REQUIRE(f.allFinite());
      peak = std::max(peak, f.cwiseAbs().maxCoeff());
    }
    INFO("tau " << tau << " peak " << peak);
    CHECK(peak > 0.0);
    CHECK(peak <= 1.0);
  }
}
