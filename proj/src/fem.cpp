#include "mchom/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "mchom/errors.hpp"

namespace mchom {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kSpdTolerance = 1e-10;
constexpr double kConstraintTolerance = 1e-10;
constexpr double kStationarityTolerance = 1e-8;
constexpr double kSaddleRegularization = 1e-10;

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

template <typename LocalFn>
SparseMatrix assemble(const TriangleMesh& mesh, std::span<const double> coeff, LocalFn&& local) {
  if (mesh.num_triangles() == 0) throw std::invalid_argument("assembly over an empty element set");
  if (coeff.size() != mesh.num_triangles()) {
    throw std::invalid_argument("assembly: one coefficient per triangle required");
  }
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (coeff[t] == 0.0) continue;
    const auto& tri = mesh.triangles[t];
    const Eigen::Matrix3d k =
        coeff[t] * local(mesh.points[tri[0]], mesh.points[tri[1]], mesh.points[tri[2]]);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) trips.emplace_back(tri[a], tri[b], k(a, b));
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double bn = b.norm();
  const double rn = (a * x - b).norm();
  return bn > 0.0 ? rn / bn : rn;
}

}  // namespace

SubMesh extract_submesh(const TriangleMesh& mesh, std::span<const int> elements) {
  if (elements.empty()) throw std::invalid_argument("extract_submesh: empty element subset");
  SubMesh sub;
  std::unordered_map<int, int> local;
  local.reserve(elements.size() * 2);
  for (int e : elements) {
    Triangle lt{};
    for (int k = 0; k < 3; ++k) {
      const int g = mesh.triangles.at(e)[k];
      auto [it, inserted] = local.try_emplace(g, static_cast<int>(sub.global_nodes.size()));
      if (inserted) {
        sub.global_nodes.push_back(g);
        sub.mesh.points.push_back(mesh.points[g]);
      }
      lt[k] = it->second;
    }
    sub.mesh.triangles.push_back(lt);
    sub.global_elements.push_back(e);
  }
  return sub;
}

std::array<Eigen::Vector2d, 3> p1_gradients(const Point& a, const Point& b, const Point& c) {
  const double twice_area = 2.0 * signed_area(a, b, c);
  return {Eigen::Vector2d((b.y - c.y) / twice_area, (c.x - b.x) / twice_area),
          Eigen::Vector2d((c.y - a.y) / twice_area, (a.x - c.x) / twice_area),
          Eigen::Vector2d((a.y - b.y) / twice_area, (b.x - a.x) / twice_area)};
}

Eigen::Matrix3d local_stiffness(const Point& a, const Point& b, const Point& c) {
  const double area = signed_area(a, b, c);
  if (!(area > 0.0)) throw std::invalid_argument("local_stiffness: degenerate or clockwise triangle");
  const auto g = p1_gradients(a, b, c);
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = area * g[i].dot(g[j]);
  }
  return k;
}

Eigen::Matrix3d local_mass(const Point& a, const Point& b, const Point& c) {
  const double area = signed_area(a, b, c);
  if (!(area > 0.0)) throw std::invalid_argument("local_mass: degenerate or clockwise triangle");
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (area / 12.0) * m;
}

SparseMatrix assemble_stiffness(const TriangleMesh& mesh, std::span<const double> coefficient) {
  for (double c : coefficient) {
    if (!(c > 0.0)) throw std::invalid_argument("assemble_stiffness: coefficient must be positive");
  }
  return assemble(mesh, coefficient, local_stiffness);
}

SparseMatrix assemble_weighted_mass(const TriangleMesh& mesh, std::span<const double> weight) {
  for (double w : weight) {
    if (w < 0.0 || std::isnan(w)) {
      throw std::invalid_argument("assemble_weighted_mass: weight must be non-negative");
    }
  }
  return assemble(mesh, weight, local_mass);
}

Vector assemble_load(const TriangleMesh& mesh, const std::function<double(Point)>& f) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double v = f(mesh.barycenter(t)) * mesh.area(t) / 3.0;
    for (int k : mesh.triangles[t]) b[k] += v;
  }
  return b;
}

double integrate_p1(const TriangleMesh& mesh, const Vector& nodal) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    s += mesh.area(t) * (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
  }
  return s;
}

bool is_symmetric(const SparseMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const SparseMatrix d = m - SparseMatrix(m.transpose());
  double dmax = 0.0;
  double mmax = 0.0;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  }
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) mmax = std::max(mmax, std::abs(it.value()));
  }
  return dmax <= rel_tol * mmax;
}

DirichletCondition DirichletCondition::homogeneous(std::span<const int> nodes) {
  DirichletCondition bc;
  bc.nodes.assign(nodes.begin(), nodes.end());
  bc.values.assign(nodes.size(), 0.0);
  return bc;
}

Vector apply_dirichlet_rhs(const SparseMatrix& original, Vector rhs, const DirichletCondition& bc) {
  if (bc.nodes.size() != bc.values.size()) {
    throw std::invalid_argument("apply_dirichlet: nodes and values differ in length");
  }
  Vector lift = Vector::Zero(original.cols());
  bool any = false;
  for (std::size_t k = 0; k < bc.nodes.size(); ++k) {
    if (bc.values[k] != 0.0) any = true;
    lift[bc.nodes[k]] = bc.values[k];
  }
  if (any) rhs -= original * lift;
  for (std::size_t k = 0; k < bc.nodes.size(); ++k) rhs[bc.nodes[k]] = bc.values[k];
  return rhs;
}

ConstrainedSystem apply_dirichlet(const SparseMatrix& matrix, const Vector& rhs,
                                  const DirichletCondition& bc) {
  std::vector<char> fixed(matrix.rows(), 0);
  for (int n : bc.nodes) fixed.at(n) = 1;
  std::vector<Triplet> trips;
  trips.reserve(matrix.nonZeros());
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      if (!fixed[it.row()] && !fixed[it.col()]) trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int n : bc.nodes) trips.emplace_back(n, n, 1.0);
  ConstrainedSystem sys;
  sys.matrix.resize(matrix.rows(), matrix.cols());
  sys.matrix.setFromTriplets(trips.begin(), trips.end(), [](double, double b) { return b; });
  sys.matrix.makeCompressed();
  sys.rhs = apply_dirichlet_rhs(matrix, rhs, bc);
  return sys;
}

struct SpdSolver::Impl {
  SparseMatrix matrix;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool direct_ok = false;
};

SpdSolver::SpdSolver(const SparseMatrix& matrix) : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("SpdSolver: matrix not square");
  impl_->matrix = matrix;
  impl_->ldlt.compute(matrix);
  impl_->direct_ok = impl_->ldlt.info() == Eigen::Success;
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Eigen::Index SpdSolver::size() const { return impl_->matrix.rows(); }

Vector SpdSolver::solve(const Vector& rhs) const {
  if (rhs.size() != impl_->matrix.rows()) throw std::invalid_argument("SpdSolver: size mismatch");
  if (rhs.squaredNorm() == 0.0) return Vector::Zero(rhs.size());
  double res = std::numeric_limits<double>::infinity();
  if (impl_->direct_ok) {
    Vector x = impl_->ldlt.solve(rhs);
    res = relative_residual(impl_->matrix, x, rhs);
    if (res <= kSpdTolerance) return x;
    // One step of iterative refinement usually recovers the last digits.
    x += impl_->ldlt.solve(Vector(rhs - impl_->matrix * x));
    res = relative_residual(impl_->matrix, x, rhs);
    if (res <= kSpdTolerance) return x;
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(kSpdTolerance * 0.1);
  cg.setMaxIterations(static_cast<int>(std::max<Eigen::Index>(1000, 10 * rhs.size())));
  cg.compute(impl_->matrix);
  if (cg.info() == Eigen::Success) {
    Vector x = cg.solve(rhs);
    res = relative_residual(impl_->matrix, x, rhs);
    if (res <= kSpdTolerance) return x;
  }
  throw SolverError("SPD solve failed to meet the residual contract", res);
}

Vector solve_spd(const SparseMatrix& matrix, const Vector& rhs) { return SpdSolver(matrix).solve(rhs); }

void check_constraint_rank(const SparseMatrix& C, const std::vector<std::string>& labels) {
  auto name = [&](Eigen::Index r) {
    return r < static_cast<Eigen::Index>(labels.size()) ? labels[r] : fmt::format("row {}", r);
  };
  const Eigen::Index m = C.rows();
  SparseMatrix rows = C;
  Vector norms(m);
  for (Eigen::Index r = 0; r < m; ++r) norms[r] = rows.row(r).norm();
  for (Eigen::Index r = 0; r < m; ++r) {
    if (norms[r] == 0.0) throw DegeneracyError("constraint degeneracy: empty constraint " + name(r));
  }
  const SparseMatrix Ct = C.transpose();
  DenseMatrix gram = DenseMatrix(C * Ct);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) gram(i, j) /= norms[i] * norms[j];
  }
  // Unpivoted Cholesky in row order: a vanishing pivot means row k lies in
  // the span of rows 0..k-1.
  DenseMatrix L = DenseMatrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    double d = gram(k, k) - L.row(k).head(k).squaredNorm();
    if (d < 1e-12) throw DegeneracyError("constraint degeneracy: dependent constraint " + name(k));
    L(k, k) = std::sqrt(d);
    for (Eigen::Index i = k + 1; i < m; ++i) {
      L(i, k) = (gram(i, k) - L.row(i).head(k).dot(L.row(k).head(k))) / L(k, k);
    }
  }
}

// The factorized matrix is [[A, C^T], [C, -delta I]]: quasi-definite, so the
// unpivoted LDL^T exists for any symmetric ordering. Iterative refinement
// against the exact KKT matrix removes the perturbation. SparseLU on the
// exact matrix is the fallback when refinement stalls.
struct SaddlePointSolver::Impl {
  SparseMatrix A;
  SparseMatrix C;
  SparseMatrix kkt;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool ldlt_ok = false;
  double a_norm = 0.0;  // max abs row sum
  mutable std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu;

  void factorize_lu() const {
    lu = std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
    lu->analyzePattern(kkt);
    lu->factorize(kkt);
    if (lu->info() != Eigen::Success) {
      throw DegeneracyError("saddle-point factorization failed: " + lu->lastErrorMessage());
    }
  }
  Vector apply_inverse(const Vector& r) const { return lu ? Vector(lu->solve(r)) : Vector(ldlt.solve(r)); }
};

SaddlePointSolver::SaddlePointSolver(const SparseMatrix& A, const SparseMatrix& C,
                                     std::vector<std::string> row_labels)
    : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols() || C.cols() != A.rows()) {
    throw std::invalid_argument("SaddlePointSolver: incompatible block sizes");
  }
  check_constraint_rank(C, row_labels);
  impl_->A = A;
  impl_->C = C;
  {
    Vector rows = Vector::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
    }
    impl_->a_norm = A.rows() > 0 ? rows.maxCoeff() : 0.0;
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = C.rows();
  std::vector<Triplet> trips;
  trips.reserve(A.nonZeros() + 2 * C.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < C.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(C, k); it; ++it) {
      trips.emplace_back(n + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n + it.row(), it.value());
    }
  }
  impl_->kkt.resize(n + m, n + m);
  impl_->kkt.setFromTriplets(trips.begin(), trips.end());
  impl_->kkt.makeCompressed();

  double amax = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  }
  const double delta = kSaddleRegularization * std::max(amax, 1e-300);
  for (Eigen::Index r = 0; r < m; ++r) trips.emplace_back(n + r, n + r, -delta);
  SparseMatrix regularized(n + m, n + m);
  regularized.setFromTriplets(trips.begin(), trips.end());
  impl_->ldlt.compute(regularized);
  impl_->ldlt_ok = impl_->ldlt.info() == Eigen::Success;
  if (!impl_->ldlt_ok) impl_->factorize_lu();
}

SaddlePointSolver::~SaddlePointSolver() = default;
SaddlePointSolver::SaddlePointSolver(SaddlePointSolver&&) noexcept = default;
SaddlePointSolver& SaddlePointSolver::operator=(SaddlePointSolver&&) noexcept = default;

SaddleSolution SaddlePointSolver::solve(const Vector& g) const {
  return solve(Vector::Zero(impl_->A.rows()), g);
}

SaddleSolution SaddlePointSolver::solve(const Vector& f, const Vector& g) const {
  const Eigen::Index n = impl_->A.rows();
  const Eigen::Index m = impl_->C.rows();
  if (f.size() != n || g.size() != m) throw std::invalid_argument("SaddlePointSolver: rhs size mismatch");
  Vector rhs(n + m);
  rhs << f, g;
  Vector x = impl_->apply_inverse(rhs);

  SaddleSolution sol;
  auto evaluate = [&] {
    sol.solution = x.head(n);
    sol.multipliers = x.tail(m);
    const Vector au = impl_->A * sol.solution;
    const Vector ctl = impl_->C.transpose() * sol.multipliers;
    // Scaled by ||A|| ||u|| so that zero-energy solutions (A u = 0) are not
    // judged against round-off alone.
    const double scale = std::max({impl_->a_norm * sol.solution.norm(), ctl.norm(), f.norm(), 1e-300});
    sol.stationarity_residual = (au + ctl - f).norm() / scale;
    sol.constraint_residual =
        m > 0 ? (impl_->C * sol.solution - g).lpNorm<Eigen::Infinity>() : 0.0;
  };
  evaluate();
  const double gscale = std::max(1.0, m > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0);
  auto converged = [&] {
    return sol.constraint_residual <= kConstraintTolerance * gscale * 1e-2 &&
           sol.stationarity_residual <= kStationarityTolerance * 1e-2;
  };
  for (int sweep = 0; sweep < 4 && !converged(); ++sweep) {
    x += impl_->apply_inverse(Vector(rhs - impl_->kkt * x));
    evaluate();
  }
  if (!converged() && !impl_->lu) {
    impl_->factorize_lu();
    x = impl_->apply_inverse(rhs);
    evaluate();
    for (int sweep = 0; sweep < 3 && !converged(); ++sweep) {
      x += impl_->apply_inverse(Vector(rhs - impl_->kkt * x));
      evaluate();
    }
  }
  if (sol.constraint_residual > kConstraintTolerance * gscale) {
    throw SolverError("saddle solve violates the constraints", sol.constraint_residual);
  }
  if (sol.stationarity_residual > kStationarityTolerance) {
    throw SolverError("saddle solve is not stationary", sol.stationarity_residual);
  }
  return sol;
}

SaddleSolution solve_saddle(const SparseMatrix& A, const SparseMatrix& C, const Vector& g,
                            std::vector<std::string> row_labels) {
  return SaddlePointSolver(A, C, std::move(row_labels)).solve(g);
}

}  // namespace mchom
