#include "mchom/upscale.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mchom/errors.hpp"

namespace mchom {

double RveMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) a += mesh.area(t);
  return a;
}

RveMesh build_rve_mesh(const StructuredMesh& mesh, const CoarsePartition& part,
                       const MediumField& medium, int block) {
  if (block < 0 || block >= part.num_blocks()) throw std::invalid_argument("build_rve_mesh: bad block id");
  RveMesh rve;
  rve.block = block;
  rve.continua = medium.continua;
  const int i0 = part.block_x(block) * part.cells_per_block_x;
  const int j0 = part.block_y(block) * part.cells_per_block_y;
  const int w = part.cells_per_block_x + 1;
  for (int n : part.block_nodes[block]) rve.mesh.points.push_back(mesh.points[n]);
  auto local = [&](int n) {
    const int i = n % (mesh.nx + 1);
    const int j = n / (mesh.nx + 1);
    return (j - j0) * w + (i - i0);
  };
  for (int t : part.block_elements[block]) {
    const Triangle& g = mesh.triangles[t];
    rve.mesh.triangles.push_back({local(g[0]), local(g[1]), local(g[2])});
    rve.coefficient.push_back(medium.value[t]);
    rve.labels.push_back(medium.label[t]);
  }
  return rve;
}

CellSolutions solve_cells(const CellProblem& problem, const CoarsePartition& part) {
  const OversampledRegion& region = problem.region();
  const int b = region.center_block;
  const int i0 = part.block_x(b) * part.cells_per_block_x;
  const int j0 = part.block_y(b) * part.cells_per_block_y;
  std::vector<int> restrict_map;
  for (int j = 0; j <= part.cells_per_block_y; ++j) {
    for (int i = 0; i <= part.cells_per_block_x; ++i) restrict_map.push_back(region.local_node(i0 + i, j0 + j));
  }
  auto restrict_values = [&](const Vector& v) {
    Vector r(static_cast<Eigen::Index>(restrict_map.size()));
    for (std::size_t k = 0; k < restrict_map.size(); ++k) r[static_cast<Eigen::Index>(k)] = v[restrict_map[k]];
    return r;
  };

  CellSolutions out;
  auto track = [&](const CellBasis& basis) {
    out.max_constraint_residual = std::max(out.max_constraint_residual, basis.constraint_residual);
    out.max_stationarity_residual = std::max(out.max_stationarity_residual, basis.stationarity_residual);
  };
  for (int i = 0; i < problem.continua(); ++i) {
    const CellBasis avg = problem.solve_average(i);
    track(avg);
    out.average.push_back(restrict_values(avg.values));
    out.average_energy.push_back(avg.energy);
    std::array<Vector, 2> grads;
    std::array<double, 2> energies{};
    for (int m = 0; m < 2; ++m) {
      const CellBasis g = problem.solve_gradient(i, m);
      track(g);
      grads[m] = restrict_values(g.values);
      energies[m] = g.energy;
    }
    out.gradient.push_back(std::move(grads));
    out.gradient_energy.push_back(energies);
  }
  return out;
}

namespace {

DenseMatrix bilinear(const SparseMatrix& form, const std::vector<Vector>& test,
                     const std::vector<Vector>& trial) {
  DenseMatrix out(static_cast<Eigen::Index>(test.size()), static_cast<Eigen::Index>(trial.size()));
  for (std::size_t i = 0; i < trial.size(); ++i) {
    const Vector applied = form * trial[i];
    for (std::size_t j = 0; j < test.size(); ++j) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = test[j].dot(applied);
    }
  }
  return out;
}

std::vector<Vector> direction(const CellSolutions& cells, int m) {
  std::vector<Vector> out;
  for (const auto& g : cells.gradient) out.push_back(g[m]);
  return out;
}

}  // namespace

Vector load_moments(const RveMesh& rve, const std::vector<Vector>& average,
                    const std::function<double(Point)>& f) {
  const Vector load = assemble_load(rve.mesh, f);
  const double area = rve.area();
  Vector out(static_cast<Eigen::Index>(average.size()));
  for (std::size_t j = 0; j < average.size(); ++j) out[static_cast<Eigen::Index>(j)] = load.dot(average[j]) / area;
  return out;
}

std::array<std::array<Vector, 3>, 2> point_load_moments(const RveMesh& rve, const std::vector<Vector>& average,
                                                       const CoarsePartition& part,
                                                       const std::function<double(Point)>& f) {
  const StructuredMesh& coarse = part.coarse;
  const Point center{(part.block_x(rve.block) + 0.5) * part.H, (part.block_y(rve.block) + 0.5) * part.H};
  std::array<std::array<Vector, 3>, 2> out;
  for (int k = 0; k < 2; ++k) {
    const auto& tri = coarse.triangles[static_cast<std::size_t>(2 * rve.block + k)];
    for (int q = 0; q < 3; ++q) {
      const Point& a = coarse.points[tri[q]];
      const Point& b = coarse.points[tri[(q + 1) % 3]];
      const Point shift{(a.x + b.x) / 2 - center.x, (a.y + b.y) / 2 - center.y};
      out[k][q] = load_moments(rve, average, [&](Point y) { return f({y.x + shift.x, y.y + shift.y}); });
    }
  }
  return out;
}

EffectiveBlock compute_effective(const RveMesh& rve, const CellSolutions& cells, double eps,
                                 const std::function<double(Point)>& source_space) {
  const int N = rve.continua;
  if (static_cast<int>(cells.average.size()) != N || static_cast<int>(cells.gradient.size()) != N) {
    throw std::invalid_argument("compute_effective: missing cell basis");
  }
  EffectiveBlock eb;
  eb.block = rve.block;
  eb.continua = N;
  eb.eps = eps;
  eb.area = rve.area();

  const SparseMatrix K = assemble_stiffness(rve.mesh, rve.coefficient);
  const SparseMatrix M = assemble_weighted_mass(rve.mesh, std::vector<double>(rve.mesh.num_triangles(), 1.0));
  std::vector<SparseMatrix> Mp;
  for (int p = 0; p < N; ++p) {
    std::vector<double> w(rve.labels.size());
    for (std::size_t t = 0; t < w.size(); ++t) w[t] = rve.labels[t] == p ? 1.0 : 0.0;
    Mp.push_back(assemble_weighted_mass(rve.mesh, w));
  }
  const auto& phi = cells.average;
  const std::array<std::vector<Vector>, 2> dphi{direction(cells, 0), direction(cells, 1)};

  eb.C = bilinear(M, phi, phi);
  eb.B = bilinear(K, phi, phi);
  for (int p = 0; p < N; ++p) eb.Cp.push_back(bilinear(Mp[p], phi, phi));
  for (int m = 0; m < 2; ++m) {
    eb.Bm[m] = bilinear(K, phi, dphi[m]);
    eb.Bn[m] = bilinear(K, dphi[m], phi);
    for (int n = 0; n < 2; ++n) eb.Bmn[m][n] = bilinear(K, dphi[n], dphi[m]);
    for (int p = 0; p < N; ++p) {
      eb.Cm_p[m].push_back(bilinear(Mp[p], phi, dphi[m]));
      eb.Cn_p[m].push_back(bilinear(Mp[p], dphi[m], phi));
      for (int n = 0; n < 2; ++n) eb.Cmn_p[m][n].push_back(bilinear(Mp[p], dphi[n], dphi[m]));
    }
  }

  const double R = eb.area;
  eb.C_hat = eb.C / R;
  for (const auto& c : eb.Cp) eb.Cp_hat.push_back(c / R);
  eb.B_hat = (eps * eps / R) * eb.B;
  for (int m = 0; m < 2; ++m) {
    eb.Bm_hat[m] = (eps / R) * eb.Bm[m];
    for (int n = 0; n < 2; ++n) eb.Bmn_hat[m][n] = eb.Bmn[m][n] / R;
  }
  eb.load = load_moments(rve, phi, source_space);
  return eb;
}

double symmetry_defect(const EffectiveBlock& eb) {
  double scale = eb.B.cwiseAbs().maxCoeff();
  for (int m = 0; m < 2; ++m) {
    scale = std::max(scale, eb.Bm[m].cwiseAbs().maxCoeff());
    for (int n = 0; n < 2; ++n) scale = std::max(scale, eb.Bmn[m][n].cwiseAbs().maxCoeff());
  }
  if (scale == 0.0) return 0.0;
  double d = (eb.B - eb.B.transpose()).cwiseAbs().maxCoeff();
  for (int m = 0; m < 2; ++m) {
    d = std::max(d, (eb.Bn[m] - eb.Bm[m].transpose()).cwiseAbs().maxCoeff());
    for (int n = 0; n < 2; ++n) {
      d = std::max(d, (eb.Bmn[m][n] - eb.Bmn[n][m].transpose()).cwiseAbs().maxCoeff());
    }
  }
  return d / scale;
}

double mass_split_defect(const EffectiveBlock& eb) {
  DenseMatrix sum = DenseMatrix::Zero(eb.C.rows(), eb.C.cols());
  for (const auto& c : eb.Cp) sum += c;
  const double scale = eb.C.cwiseAbs().maxCoeff();
  return scale == 0.0 ? 0.0 : (sum - eb.C).cwiseAbs().maxCoeff() / scale;
}

namespace {

template <class F>
void parallel_for(std::size_t count, int jobs, F&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

CellLibrary solve_cell_library(const StructuredMesh& mesh, const CoarsePartition& part,
                               const MediumField& medium, const UpscaleOptions& options) {
  require_all_continua_per_block(medium, part);
  CellLibrary lib;
  lib.continua = medium.continua;
  lib.layers = options.layers >= 0 ? options.layers : oversampling_layers(part.H);
  lib.extension = options.extension;
  const int nb = part.num_blocks();

  // Group blocks by region signature; the first block of each class is solved.
  std::map<RegionSignature, int> class_of;
  std::vector<int> representative;
  lib.block_class.resize(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const OversampledRegion region = build_oversampled_region(mesh, part, b, lib.layers, lib.extension);
    const auto [it, inserted] =
        class_of.emplace(region_signature(mesh, part, medium, region), static_cast<int>(representative.size()));
    if (inserted) representative.push_back(b);
    lib.block_class[static_cast<std::size_t>(b)] = it->second;
  }
  spdlog::info("cells: {} blocks, {} distinct cell-problem classes, l={}", nb, representative.size(), lib.layers);

  lib.solutions.resize(representative.size());
  std::atomic<std::size_t> done{0};
  parallel_for(representative.size(), options.jobs, [&](std::size_t c) {
    const CellProblem problem(mesh, part, medium, representative[c], lib.layers, lib.extension);
    lib.solutions[c] = solve_cells(problem, part);
    spdlog::debug("cell class {}/{} done", ++done, representative.size());
  });
  return lib;
}

std::vector<EffectiveBlock> effective_blocks(const StructuredMesh& mesh, const CoarsePartition& part,
                                             const MediumField& medium, const CellLibrary& library,
                                             const std::function<double(Point)>& source_space, int jobs,
                                             UpscaleReport* report) {
  const int nb = part.num_blocks();
  if (static_cast<int>(library.block_class.size()) != nb || library.continua != medium.continua) {
    throw std::invalid_argument("effective_blocks: cell library does not match the partition or medium");
  }
  std::vector<EffectiveBlock> blocks(static_cast<std::size_t>(nb));
  parallel_for(blocks.size(), jobs, [&](std::size_t b) {
    const RveMesh rve = build_rve_mesh(mesh, part, medium, static_cast<int>(b));
    const CellSolutions& cells = library.of_block(static_cast<int>(b));
    blocks[b] = compute_effective(rve, cells, part.H, source_space);
    blocks[b].point_load = point_load_moments(rve, cells.average, part, source_space);
  });

  if (report) {
    *report = {};
    report->blocks = blocks.size();
    report->classes = library.solutions.size();
    for (const auto& s : library.solutions) {
      report->max_constraint_residual = std::max(report->max_constraint_residual, s.max_constraint_residual);
      report->max_stationarity_residual = std::max(report->max_stationarity_residual, s.max_stationarity_residual);
    }
    for (const auto& eb : blocks) {
      report->max_symmetry_defect = std::max(report->max_symmetry_defect, symmetry_defect(eb));
      report->max_mass_split_defect = std::max(report->max_mass_split_defect, mass_split_defect(eb));
    }
  }
  return blocks;
}

std::vector<EffectiveBlock> upscale(const StructuredMesh& mesh, const CoarsePartition& part,
                                    const MediumField& medium,
                                    const std::function<double(Point)>& source_space,
                                    const UpscaleOptions& options, UpscaleReport* report) {
  const CellLibrary lib = solve_cell_library(mesh, part, medium, options);
  return effective_blocks(mesh, part, medium, lib, source_space, options.jobs, report);
}

ZeroOrderBlock zero_order_constants(const RveMesh& rve,
                                    const std::function<double(Point)>& source_space) {
  const int N = rve.continua;
  ZeroOrderBlock z;
  z.block = rve.block;
  std::vector<double> vol(N, 0.0), inv(N, 0.0), inv2(N, 0.0), src(N, 0.0);
  for (std::size_t t = 0; t < rve.mesh.num_triangles(); ++t) {
    const double A = rve.coefficient[t];
    if (!(A > 0.0)) throw std::invalid_argument("zero_order_constants: A must be positive");
    const int p = rve.labels[t];
    const double a = rve.mesh.area(t);
    vol[p] += a;
    inv[p] += a / A;
    inv2[p] += a / (A * A);
    src[p] += a * source_space(rve.mesh.barycenter(t)) / A;
  }
  for (int i = 0; i < N; ++i) {
    if (vol[i] == 0.0) {
      throw DegeneracyError(fmt::format("zero-order constants: continuum {} is empty in block {}", i + 1, rve.block));
    }
    const double Ci = vol[i] / inv[i];
    z.C.push_back(Ci);
    z.gamma.push_back(Ci * Ci * inv2[i]);
    z.beta.push_back(Ci * vol[i]);
    z.b.push_back(Ci * src[i]);
  }

  z.gamma_full.assign(N, std::vector<std::vector<double>>(N, std::vector<double>(N, 0.0)));
  z.beta_full.assign(N, std::vector<double>(N, 0.0));
  for (std::size_t t = 0; t < rve.mesh.num_triangles(); ++t) {
    const double A = rve.coefficient[t];
    const double a = rve.mesh.area(t);
    auto psi = [&](int k) { return rve.labels[t] == k ? 1.0 : 0.0; };
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const double phij = z.C[i] * z.C[j] * psi(i) * psi(j) / (A * A);
        z.beta_full[i][j] += a * A * phij;
        for (int k = 0; k < N; ++k) z.gamma_full[i][j][k] += a * phij * psi(k);
      }
    }
  }
  return z;
}

namespace {

constexpr const char* kEffectiveHeader = "# mchom effective-blocks v1";

void put(std::ostream& os, const DenseMatrix& m) {
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index i = 0; i < m.cols(); ++i) os << ' ' << fmt::format("{:.17g}", m(j, i));
  }
}

void put(std::ostream& os, const Vector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) os << ' ' << fmt::format("{:.17g}", v[k]);
}

DenseMatrix take(std::istream& is, int N) {
  DenseMatrix m(N, N);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      if (!(is >> m(j, i))) throw std::runtime_error("effective-block file: truncated record");
    }
  }
  return m;
}

}  // namespace

void save_effective_blocks(const std::filesystem::path& path, const std::vector<EffectiveBlock>& blocks) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  const int N = blocks.empty() ? 0 : blocks.front().continua;
  os << kEffectiveHeader << '\n';
  os << "# matrices are N x N, row-major with row index j (test continuum) and column index i\n";
  os << "# record: block eps area load[N] C_hat Cp_hat[p=0..N-1] B_hat Bm_hat[m=0,1] Bmn_hat[m][n]"
        " C Cp[p] B Bm[m] Bn[n] Bmn[m][n] point_load[triangle][edge][N]\n";
  os << "N " << N << " blocks " << blocks.size() << '\n';
  for (const auto& eb : blocks) {
    if (eb.continua != N) throw std::invalid_argument("save_effective_blocks: mixed continuum counts");
    os << eb.block << ' ' << fmt::format("{:.17g} {:.17g}", eb.eps, eb.area);
    put(os, eb.load);
    put(os, eb.C_hat);
    for (const auto& c : eb.Cp_hat) put(os, c);
    put(os, eb.B_hat);
    for (const auto& b : eb.Bm_hat) put(os, b);
    for (const auto& row : eb.Bmn_hat) for (const auto& b : row) put(os, b);
    put(os, eb.C);
    for (const auto& c : eb.Cp) put(os, c);
    put(os, eb.B);
    for (const auto& b : eb.Bm) put(os, b);
    for (const auto& b : eb.Bn) put(os, b);
    for (const auto& row : eb.Bmn) for (const auto& b : row) put(os, b);
    for (const auto& tri : eb.point_load) {
      for (const auto& v : tri) {
        if (v.size() != N) throw std::invalid_argument("save_effective_blocks: block without point loads");
        put(os, v);
      }
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<EffectiveBlock> load_effective_blocks(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kEffectiveHeader) {
    throw std::runtime_error(path.string() + ": not an effective-block file");
  }
  while (is.peek() == '#') std::getline(is, line);
  std::string key_n, key_b;
  int N = 0;
  std::size_t count = 0;
  if (!(is >> key_n >> N >> key_b >> count) || key_n != "N" || key_b != "blocks") {
    throw std::runtime_error(path.string() + ": bad size line");
  }
  std::vector<EffectiveBlock> blocks(count);
  for (auto& eb : blocks) {
    eb.continua = N;
    if (!(is >> eb.block >> eb.eps >> eb.area)) throw std::runtime_error("effective-block file: truncated record");
    eb.load.resize(N);
    for (int j = 0; j < N; ++j) is >> eb.load[j];
    eb.C_hat = take(is, N);
    for (int p = 0; p < N; ++p) eb.Cp_hat.push_back(take(is, N));
    eb.B_hat = take(is, N);
    for (auto& b : eb.Bm_hat) b = take(is, N);
    for (auto& row : eb.Bmn_hat) for (auto& b : row) b = take(is, N);
    eb.C = take(is, N);
    for (int p = 0; p < N; ++p) eb.Cp.push_back(take(is, N));
    eb.B = take(is, N);
    for (auto& b : eb.Bm) b = take(is, N);
    for (auto& b : eb.Bn) b = take(is, N);
    for (auto& row : eb.Bmn) for (auto& b : row) b = take(is, N);
    for (auto& tri : eb.point_load) {
      for (auto& v : tri) {
        v.resize(N);
        for (int j = 0; j < N; ++j) is >> v[j];
      }
    }
    if (!is) throw std::runtime_error("effective-block file: truncated record");
  }
  return blocks;
}

namespace {

constexpr const char* kCellsMagic = "mchom-cells v1";

void put_i32(std::ostream& os, std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

void put_f64(std::ostream& os, const double* v, std::size_t n) {
  os.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(n * sizeof(double)));
}

std::int32_t get_i32(std::istream& is) {
  std::int32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("cell library truncated");
  return v;
}

void get_f64(std::istream& is, double* v, std::size_t n) {
  if (!is.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(n * sizeof(double)))) {
    throw std::runtime_error("cell library truncated");
  }
}

}  // namespace

void save_cell_library(const std::filesystem::path& path, const CellLibrary& lib) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << kCellsMagic << '\n';
  put_i32(os, lib.continua);
  put_i32(os, lib.layers);
  put_i32(os, static_cast<std::int32_t>(lib.extension));
  put_i32(os, static_cast<std::int32_t>(lib.solutions.size()));
  put_i32(os, static_cast<std::int32_t>(lib.block_class.size()));
  for (int c : lib.block_class) put_i32(os, c);
  for (const auto& s : lib.solutions) {
    const auto n = static_cast<std::size_t>(s.average.front().size());
    put_i32(os, static_cast<std::int32_t>(n));
    for (int i = 0; i < lib.continua; ++i) {
      put_f64(os, s.average[i].data(), n);
      put_f64(os, s.gradient[i][0].data(), n);
      put_f64(os, s.gradient[i][1].data(), n);
    }
    put_f64(os, s.average_energy.data(), s.average_energy.size());
    for (const auto& e : s.gradient_energy) put_f64(os, e.data(), 2);
    put_f64(os, &s.max_constraint_residual, 1);
    put_f64(os, &s.max_stationarity_residual, 1);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

CellLibrary load_cell_library(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string magic;
  if (!std::getline(is, magic) || magic != kCellsMagic) throw std::runtime_error(path.string() + ": not a cell library");
  CellLibrary lib;
  lib.continua = get_i32(is);
  lib.layers = get_i32(is);
  const int ext = get_i32(is);
  const int classes = get_i32(is);
  const int blocks = get_i32(is);
  if (lib.continua < 1 || lib.layers < 0 || ext < 0 || ext > 1 || classes < 1 || blocks < 1) {
    throw std::runtime_error(path.string() + ": bad cell library header");
  }
  lib.extension = static_cast<RegionExtension>(ext);
  for (int b = 0; b < blocks; ++b) {
    const int c = get_i32(is);
    if (c < 0 || c >= classes) throw std::runtime_error(path.string() + ": block class out of range");
    lib.block_class.push_back(c);
  }
  lib.solutions.resize(static_cast<std::size_t>(classes));
  for (auto& s : lib.solutions) {
    const int n = get_i32(is);
    if (n < 1) throw std::runtime_error(path.string() + ": bad node count");
    s.average.resize(lib.continua);
    s.gradient.resize(lib.continua);
    for (int i = 0; i < lib.continua; ++i) {
      s.average[i].resize(n);
      get_f64(is, s.average[i].data(), n);
      for (auto& g : s.gradient[i]) {
        g.resize(n);
        get_f64(is, g.data(), n);
      }
    }
    s.average_energy.resize(lib.continua);
    get_f64(is, s.average_energy.data(), s.average_energy.size());
    s.gradient_energy.resize(lib.continua);
    for (auto& e : s.gradient_energy) get_f64(is, e.data(), 2);
    get_f64(is, &s.max_constraint_residual, 1);
    get_f64(is, &s.max_stationarity_residual, 1);
  }
  return lib;
}

}  // namespace mchom
