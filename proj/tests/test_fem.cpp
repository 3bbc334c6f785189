#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "mchom/errors.hpp"
#include "mchom/fem.hpp"
#include "mchom/media.hpp"

using namespace mchom;

namespace {

SparseMatrix sparse(const DenseMatrix& d) { return d.sparseView(); }

TriangleMesh reference_triangle() {
  TriangleMesh m;
  m.points = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  return m;
}

DenseMatrix random_spd(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  DenseMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  }
  return a * a.transpose() + n * DenseMatrix::Identity(n, n);
}

}  // namespace

TEST_CASE("reference triangle element matrices") {
  const Eigen::Matrix3d k = local_stiffness({0, 0}, {1, 0}, {0, 1});
  Eigen::Matrix3d expected_k;
  expected_k << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  CHECK((k - expected_k).cwiseAbs().maxCoeff() <= 1e-15);

  const Eigen::Matrix3d m = local_mass({0, 0}, {1, 0}, {0, 1});
  Eigen::Matrix3d expected_m;
  expected_m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  expected_m *= 0.5 / 12.0;
  CHECK((m - expected_m).cwiseAbs().maxCoeff() <= 1e-15);

  const DenseMatrix assembled = DenseMatrix(assemble_stiffness(reference_triangle(), std::vector<double>{1.0}));
  CHECK((assembled - expected_k).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(local_stiffness({0, 0}, {0, 1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("stiffness has constants in its kernel and scales with the coefficient") {
  const auto mesh = build_fine_mesh(1, 1);
  const std::vector<double> unit(2, 1.0);
  const SparseMatrix k = assemble_stiffness(mesh, unit);
  const Vector ones = Vector::Ones(4);
  CHECK((k * ones).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(is_symmetric(k));

  const auto fine = build_fine_mesh(6, 6);
  const auto medium = crossed_field(fine, {0.5, 1.0 / 6, 0.0, 1e-4, 1.0});
  const SparseMatrix a = assemble_stiffness(fine, medium.value);
  std::vector<double> scaled = medium.value;
  for (double& v : scaled) v *= 7.5;
  const SparseMatrix b = assemble_stiffness(fine, scaled);
  CHECK(DenseMatrix(b - 7.5 * a).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(is_symmetric(a));
  CHECK_THROWS_AS(assemble_stiffness(fine, std::vector<double>(fine.num_triangles(), 0.0)), std::invalid_argument);
}

TEST_CASE("weighted mass totals") {
  const auto mesh = build_fine_mesh(40, 40);
  const SparseMatrix m = assemble_weighted_mass(mesh, std::vector<double>(mesh.num_triangles(), 1.0));
  CHECK(Vector::Ones(m.rows()).dot(m * Vector::Ones(m.cols())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_symmetric(m));

  const auto medium = crossed_field(mesh, {0.25, 0.05, 0.1, 1e-4, 1.0});
  const auto psi = characteristic(medium, 0);
  double omega1 = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) omega1 += psi[t] * mesh.area(t);
  const SparseMatrix mp = assemble_weighted_mass(mesh, psi);
  CHECK(Vector::Ones(mp.rows()).dot(mp * Vector::Ones(mp.cols())) == doctest::Approx(omega1).epsilon(1e-12));

  std::vector<double> negative(mesh.num_triangles(), 1.0);
  negative[3] = -1.0;
  CHECK_THROWS_AS(assemble_weighted_mass(mesh, negative), std::invalid_argument);
}

TEST_CASE("Galerkin energy of a linear field") {
  const auto mesh = build_fine_mesh(9, 9);
  const auto medium = crossed_field(mesh, {1.0 / 3, 1.0 / 9, 0.0, 0.25, 4.0});
  const SparseMatrix k = assemble_stiffness(mesh, medium.value);
  Vector u(mesh.num_nodes());
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) u[n] = 2.0 * mesh.points[n].x - 3.0 * mesh.points[n].y + 1.0;
  double exact = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) exact += medium.value[t] * 13.0 * mesh.area(t);
  CHECK(std::abs(u.dot(k * u) - exact) <= 1e-10 * exact);
}

TEST_CASE("load vector and P1 integration") {
  const auto mesh = build_fine_mesh(10, 10);
  const Vector one = assemble_load(mesh, [](Point) { return 1.0; });
  CHECK(one.sum() == doctest::Approx(1.0).epsilon(1e-12));
  Vector lin(mesh.num_nodes());
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) lin[n] = mesh.points[n].x + 2 * mesh.points[n].y;
  CHECK(integrate_p1(mesh, lin) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("submesh extraction") {
  const auto mesh = build_fine_mesh(4, 4);
  const std::vector<int> elems{0, 1, 2, 3};
  const SubMesh s = extract_submesh(mesh, elems);
  CHECK(s.mesh.num_triangles() == 4);
  CHECK(s.mesh.num_nodes() == 6);
  CHECK_THROWS_AS(extract_submesh(mesh, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("SPD solves") {
  SparseMatrix id(3, 3);
  id.setIdentity();
  const Vector b = Vector::LinSpaced(3, 1.0, 3.0);
  CHECK((solve_spd(id, b) - b).norm() == 0.0);

  DenseMatrix d(2, 2);
  d << 2, 0, 0, 4;
  const Vector x = solve_spd(sparse(d), (Vector(2) << 2, 4).finished());
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  std::mt19937 rng(7);
  const DenseMatrix a = random_spd(50, rng);
  Vector xs(50);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : xs) v = u(rng);
  const Vector rec = solve_spd(sparse(a), a * xs);
  CHECK((rec - xs).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Dirichlet elimination") {
  const auto mesh = build_fine_mesh(8, 8);
  const SparseMatrix k = assemble_stiffness(mesh, std::vector<double>(mesh.num_triangles(), 1.0));
  // Linear boundary data is reproduced exactly by the discrete harmonic extension.
  DirichletCondition bc;
  bc.nodes = mesh.boundary_nodes;
  for (int n : bc.nodes) bc.values.push_back(mesh.points[n].x - 0.5 * mesh.points[n].y);
  const auto sys = apply_dirichlet(k, Vector::Zero(mesh.num_nodes()), bc);
  CHECK(is_symmetric(sys.matrix));
  const Vector u = solve_spd(sys.matrix, sys.rhs);
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
    CHECK(u[n] == doctest::Approx(mesh.points[n].x - 0.5 * mesh.points[n].y).epsilon(1e-10));
  }
  const Vector rhs = apply_dirichlet_rhs(k, Vector::Zero(mesh.num_nodes()), bc);
  CHECK((rhs - sys.rhs).norm() <= 1e-14);
}

TEST_CASE("saddle point: identity with the sum constraint") {
  const int n = 6;
  SparseMatrix a(n, n);
  a.setIdentity();
  SparseMatrix c = sparse(DenseMatrix::Ones(1, n));
  const auto s = solve_saddle(a, c, Vector::Constant(1, n));
  CHECK((s.solution - Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.multipliers[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.constraint_residual <= 1e-10);
}

TEST_CASE("saddle point: satisfied constraints have zero multipliers") {
  std::mt19937 rng(3);
  const DenseMatrix a = random_spd(10, rng);
  DenseMatrix c = DenseMatrix::Zero(2, 10);
  c(0, 1) = 1.0;
  c(1, 4) = 2.0;
  Vector f = Vector::LinSpaced(10, -1.0, 2.0);
  const Vector free = a.ldlt().solve(f);
  const Vector g = c * free;
  const SaddlePointSolver solver(sparse(a), sparse(c));
  const auto s = solver.solve(f, g);
  CHECK((s.solution - free).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(s.multipliers.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("saddle point agrees with a dense KKT solve, singular A allowed") {
  const auto mesh = build_fine_mesh(5, 5);
  const SparseMatrix a = assemble_stiffness(mesh, std::vector<double>(mesh.num_triangles(), 1.0));
  const int n = static_cast<int>(mesh.num_nodes());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix c(3, n);
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < n; ++k) c(r, k) = u(rng);
  }
  const Vector g = (Vector(3) << 1.0, -2.0, 0.5).finished();
  DenseMatrix kkt = DenseMatrix::Zero(n + 3, n + 3);
  kkt.topLeftCorner(n, n) = DenseMatrix(a);
  kkt.topRightCorner(n, 3) = c.transpose();
  kkt.bottomLeftCorner(3, n) = c;
  Vector rhs = Vector::Zero(n + 3);
  rhs.tail(3) = g;
  const Vector ref = kkt.fullPivLu().solve(rhs);
  const auto s = solve_saddle(a, sparse(c), g);
  CHECK((s.solution - ref.head(n)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((s.multipliers - ref.tail(3)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(s.constraint_residual <= 1e-10);
  CHECK(s.stationarity_residual <= 1e-8);
}

TEST_CASE("dependent or empty constraints are reported by name") {
  SparseMatrix a(3, 3);
  a.setIdentity();
  DenseMatrix c(2, 3);
  c << 1, 1, 0, 2, 2, 0;
  try {
    solve_saddle(a, sparse(c), Vector::Ones(2), {"first", "second"});
    FAIL("expected a degeneracy error");
  } catch (const DegeneracyError& e) {
    CHECK(std::string(e.what()).find("second") != std::string::npos);
  }
  DenseMatrix z = DenseMatrix::Zero(1, 3);
  CHECK_THROWS_AS(solve_saddle(a, sparse(z), Vector::Ones(1), {"empty"}), DegeneracyError);
}
