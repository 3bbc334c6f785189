#include "mchom/cells.hpp"

#include <bit>
#include <stdexcept>

#include <fmt/format.h>

#include "mchom/errors.hpp"

namespace mchom {

double centroid(const StructuredMesh& mesh, const CoarsePartition& part, const MediumField& medium,
                int block, int continuum, int direction) {
  if (direction < 0 || direction > 1) throw std::invalid_argument("centroid: direction must be 0 or 1");
  double area = 0.0;
  double moment = 0.0;
  for (int t : part.block_elements.at(block)) {
    if (medium.label[t] != continuum) continue;
    const double a = mesh.area(t);
    const Point b = mesh.barycenter(t);
    area += a;
    moment += a * (direction == 0 ? b.x : b.y);
  }
  if (area == 0.0) {
    throw DegeneracyError(
        fmt::format("centroid: continuum {} is empty in block {}", continuum + 1, block));
  }
  return moment / area;
}

struct CellProblem::Impl {
  OversampledRegion region;
  int continua = 1;
  std::vector<double> coefficient;
  std::vector<int> labels;
  SparseMatrix A;
  SparseMatrix C;
  // Mean of x_m over R^p cap Omega_j, indexed [p * N + j].
  std::array<std::vector<double>, 2> mean_coordinate;
  std::array<std::vector<double>, 2> centroid;  // per continuum j
  std::unique_ptr<SaddlePointSolver> solver;

  int row(int p, int j) const { return p * continua + j; }

  CellBasis finish(const SaddleSolution& s, int i, BasisKind kind, int m) const {
    CellBasis basis;
    basis.block = region.center_block;
    basis.continuum = i;
    basis.kind = kind;
    basis.direction = m;
    basis.values = s.solution;
    basis.multipliers = -s.multipliers;
    basis.constraint_residual = s.constraint_residual;
    basis.stationarity_residual = s.stationarity_residual;
    basis.energy = s.solution.dot(A * s.solution);
    return basis;
  }
};

CellProblem::CellProblem(const StructuredMesh& mesh, const CoarsePartition& part,
                         const MediumField& medium, int block, int layers,
                         RegionExtension extension)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.region = build_oversampled_region(mesh, part, block, layers, extension);
  s.continua = medium.continua;
  const auto& local = s.region.local;
  s.coefficient.resize(local.num_triangles());
  s.labels.resize(local.num_triangles());
  for (std::size_t e = 0; e < local.num_triangles(); ++e) {
    s.coefficient[e] = medium.value[s.region.global_elements[e]];
    s.labels[e] = medium.label[s.region.global_elements[e]];
  }
  s.A = assemble_stiffness(local, s.coefficient);

  const int N = s.continua;
  const int P = static_cast<int>(s.region.num_members());
  std::vector<double> row_area(static_cast<std::size_t>(P) * N, 0.0);
  for (auto& mc : s.mean_coordinate) mc.assign(row_area.size(), 0.0);
  std::vector<Eigen::Triplet<double>> trips;
  for (int p = 0; p < P; ++p) {
    for (int e : s.region.member_elements[p]) {
      const int r = s.row(p, s.labels[e]);
      const double a = local.area(e);
      const Point b = local.barycenter(e);
      row_area[r] += a;
      s.mean_coordinate[0][r] += a * b.x;
      s.mean_coordinate[1][r] += a * b.y;
      for (int n : local.triangles[e]) trips.emplace_back(r, n, a / 3.0);
    }
  }
  auto mirrored = [&](int member) {
    const int w = s.region.bx1 - s.region.bx0 + 1;
    const int x = s.region.bx0 + member % w;
    const int y = s.region.by0 + member / w;
    return x < 0 || y < 0 || x >= part.M || y >= part.M;
  };
  std::vector<std::string> labels(row_area.size());
  for (int p = 0; p < P; ++p) {
    for (int j = 0; j < N; ++j) {
      const int r = s.row(p, j);
      labels[r] = fmt::format("RVE {}{} (member {} of oversampled region around block {}), continuum {}",
                              s.region.member_blocks[p], mirrored(p) ? " mirrored" : "", p, block,
                              j + 1);
      if (row_area[r] == 0.0) {
        throw DegeneracyError("constraint degeneracy: empty continuum in " + labels[r]);
      }
      s.mean_coordinate[0][r] /= row_area[r];
      s.mean_coordinate[1][r] /= row_area[r];
    }
  }
  for (auto& t : trips) t = Eigen::Triplet<double>(t.row(), t.col(), t.value() / row_area[t.row()]);
  s.C.resize(static_cast<Eigen::Index>(row_area.size()), static_cast<Eigen::Index>(local.num_nodes()));
  s.C.setFromTriplets(trips.begin(), trips.end());
  s.C.makeCompressed();

  for (int m = 0; m < 2; ++m) {
    s.centroid[m].resize(N);
    for (int j = 0; j < N; ++j) s.centroid[m][j] = s.mean_coordinate[m][s.row(s.region.center_member, j)];
  }
  s.solver = std::make_unique<SaddlePointSolver>(s.A, s.C, std::move(labels));
}

CellProblem::~CellProblem() = default;
CellProblem::CellProblem(CellProblem&&) noexcept = default;
CellProblem& CellProblem::operator=(CellProblem&&) noexcept = default;

const OversampledRegion& CellProblem::region() const { return impl_->region; }
int CellProblem::continua() const { return impl_->continua; }
const std::vector<int>& CellProblem::rve_elements() const {
  return impl_->region.member_elements[impl_->region.center_member];
}
const std::vector<double>& CellProblem::local_coefficient() const { return impl_->coefficient; }
const std::vector<int>& CellProblem::local_labels() const { return impl_->labels; }
const SparseMatrix& CellProblem::constraints() const { return impl_->C; }
const SparseMatrix& CellProblem::stiffness() const { return impl_->A; }

double CellProblem::centroid(int continuum, int direction) const {
  return impl_->centroid.at(direction).at(continuum);
}

Vector CellProblem::average_rhs(int i) const {
  const Impl& s = *impl_;
  if (i < 0 || i >= s.continua) throw std::invalid_argument("average_rhs: continuum out of range");
  Vector g = Vector::Zero(s.C.rows());
  for (std::size_t p = 0; p < s.region.num_members(); ++p) g[s.row(static_cast<int>(p), i)] = 1.0;
  return g;
}

Vector CellProblem::gradient_rhs(int i, int m) const {
  const Impl& s = *impl_;
  if (i < 0 || i >= s.continua) throw std::invalid_argument("gradient_rhs: continuum out of range");
  if (m < 0 || m > 1) throw std::invalid_argument("gradient_rhs: direction must be 0 or 1");
  Vector g = Vector::Zero(s.C.rows());
  for (std::size_t p = 0; p < s.region.num_members(); ++p) {
    const int r = s.row(static_cast<int>(p), i);
    g[r] = s.mean_coordinate[m][r] - s.centroid[m][i];
  }
  return g;
}

CellBasis CellProblem::solve_average(int i) const {
  return impl_->finish(impl_->solver->solve(average_rhs(i)), i, BasisKind::Average, -1);
}

CellBasis CellProblem::solve_gradient(int i, int m) const {
  return impl_->finish(impl_->solver->solve(gradient_rhs(i, m)), i, BasisKind::Gradient, m);
}

namespace {

struct Hasher {
  std::uint64_t a = 14695981039346656037ull;  // FNV-1a
  std::uint64_t b = 0x9e3779b97f4a7c15ull;    // splitmix-style mixing

  void add(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      a ^= (v >> (8 * k)) & 0xffu;
      a *= 1099511628211ull;
    }
    b ^= v + 0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2);
    b = (b ^ (b >> 30)) * 0xbf58476d1ce4e5b9ull;
    b = (b ^ (b >> 27)) * 0x94d049bb133111ebull;
    b ^= b >> 31;
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
};

}  // namespace

RegionSignature region_signature(const StructuredMesh& mesh, const CoarsePartition& part,
                                 const MediumField& medium, const OversampledRegion& region) {
  Hasher h;
  h.add(region.cells_x);
  h.add(region.cells_y);
  h.add(part.cells_per_block_x);
  h.add(part.cells_per_block_y);
  h.add(region.bx1 - region.bx0 + 1);
  h.add(region.center_member);
  h.add(static_cast<int>(region.extension));
  h.add(mesh.hx());
  h.add(mesh.hy());
  h.add(medium.continua);
  for (int t : region.global_elements) {
    h.add(medium.value[t]);
    h.add(medium.label[t]);
  }
  return {h.a, h.b};
}

}  // namespace mchom
