#include "mchom/metrics_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace mchom {

namespace {

constexpr const char* kTableVersion = "# mchom error-table v1";
constexpr const char* kFieldVersion = "# mchom field v1";
constexpr const char* kTrajectoryMagic = "mchom-trajectory v1";

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return is;
}

}  // namespace

std::vector<double> block_continuum_average(const StructuredMesh& mesh, const CoarsePartition& part,
                                            const MediumField& medium, const Vector& field, int i) {
  if (field.size() != static_cast<Eigen::Index>(mesh.num_nodes())) {
    throw std::invalid_argument("block_continuum_average: field does not match the mesh");
  }
  if (i < 0 || i >= medium.continua) throw std::invalid_argument("block_continuum_average: continuum out of range");
  std::vector<double> out(static_cast<std::size_t>(part.num_blocks()));
  int empty = 0;
  for (int b = 0; b < part.num_blocks(); ++b) {
    double area = 0.0;
    double integral = 0.0;
    for (int t : part.block_elements[b]) {
      if (medium.label[t] != i) continue;
      const auto& tri = mesh.triangles[t];
      const double a = mesh.area(t);
      area += a;
      integral += a * (field[tri[0]] + field[tri[1]] + field[tri[2]]) / 3.0;
    }
    if (area == 0.0) {
      out[b] = std::numeric_limits<double>::quiet_NaN();
      ++empty;
    } else {
      out[b] = integral / area;
    }
  }
  if (empty > 0) spdlog::warn("continuum {} is absent from {} coarse blocks; they are excluded", i + 1, empty);
  return out;
}

std::vector<double> coarse_block_average(const CoarsePartition& part, const Vector& coarse_field) {
  const StructuredMesh& coarse = part.coarse;
  if (coarse_field.size() != static_cast<Eigen::Index>(coarse.num_nodes())) {
    throw std::invalid_argument("coarse_block_average: field does not match the coarse mesh");
  }
  std::vector<double> out(static_cast<std::size_t>(part.num_blocks()), 0.0);
  for (std::size_t t = 0; t < coarse.num_triangles(); ++t) {
    const auto& tri = coarse.triangles[t];
    const int b = StructuredMesh::cell_of_triangle(static_cast<int>(t));
    out[b] += coarse.area(t) * (coarse_field[tri[0]] + coarse_field[tri[1]] + coarse_field[tri[2]]) / 3.0;
  }
  for (double& v : out) v /= part.block_area();
  return out;
}

std::optional<double> relative_error_percent(std::span<const double> coarse, std::span<const double> fine) {
  if (coarse.size() != fine.size()) throw std::invalid_argument("relative_error_percent: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    if (std::isnan(coarse[k]) || std::isnan(fine[k])) continue;
    num += (coarse[k] - fine[k]) * (coarse[k] - fine[k]);
    den += fine[k] * fine[k];
  }
  if (den == 0.0) return std::nullopt;
  return 100.0 * std::sqrt(num / den);
}

ErrorTable compare_trajectories(const StructuredMesh& mesh, const CoarsePartition& part,
                                const MediumField& medium, const Trajectory& fine,
                                const Trajectory& macro, const std::vector<double>& times) {
  if (macro.components != medium.continua) {
    throw std::invalid_argument(fmt::format("compare: macro trajectory has {} continua, medium has {}",
                                            macro.components, medium.continua));
  }
  ErrorTable table;
  table.continua = medium.continua;
  for (double t : times) {
    const Vector& u = fine.at(t);
    std::vector<double> row;
    for (int i = 0; i < medium.continua; ++i) {
      const auto ref = block_continuum_average(mesh, part, medium, u, i);
      const auto approx = coarse_block_average(part, macro.component(t, i));
      const auto e = relative_error_percent(approx, ref);
      if (!e) throw std::domain_error(fmt::format("relative error undefined at t={}: zero reference", t));
      row.push_back(*e);
    }
    table.times.push_back(t);
    table.percent.push_back(std::move(row));
  }
  return table;
}

std::string format_error_table(const ErrorTable& table) {
  std::string out = std::string(kTableVersion) + "\nt";
  for (int i = 0; i < table.continua; ++i) out += fmt::format(",e{}_percent", i + 1);
  out += '\n';
  for (std::size_t r = 0; r < table.times.size(); ++r) {
    out += fmt::format("{:.4f}", table.times[r]);
    for (double e : table.percent[r]) out += fmt::format(",{:.4f}", e);
    out += '\n';
  }
  return out;
}

void write_error_table(const std::filesystem::path& path, const ErrorTable& table) {
  auto os = open_out(path);
  os << format_error_table(table);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

ErrorTable read_error_table(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line != kTableVersion) {
    throw std::runtime_error(path.string() + ": not an error table");
  }
  if (!std::getline(is, line) || line.rfind("t,", 0) != 0) {
    throw std::runtime_error(path.string() + ": missing column header");
  }
  ErrorTable table;
  table.continua = static_cast<int>(std::count(line.begin(), line.end(), ','));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (static_cast<int>(values.size()) != table.continua + 1) {
      throw std::runtime_error(path.string() + ": ragged row");
    }
    table.times.push_back(values.front());
    table.percent.emplace_back(values.begin() + 1, values.end());
  }
  return table;
}

void write_field(const std::filesystem::path& path, int nx, int ny, const Vector& values) {
  if (values.size() != static_cast<Eigen::Index>(nx + 1) * (ny + 1)) {
    throw std::invalid_argument("write_field: value count does not match the grid");
  }
  auto os = open_out(path);
  os << kFieldVersion << '\n' << nx << ' ' << ny << '\n';
  for (Eigen::Index k = 0; k < values.size(); ++k) os << fmt::format("{:.17g}\n", values[k]);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::pair<std::pair<int, int>, Vector> read_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line != kFieldVersion) throw std::runtime_error(path.string() + ": not a field file");
  int nx = 0;
  int ny = 0;
  if (!(is >> nx >> ny) || nx < 1 || ny < 1) throw std::runtime_error(path.string() + ": bad grid size");
  Vector v(static_cast<Eigen::Index>(nx + 1) * (ny + 1));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(is >> v[k])) throw std::runtime_error(path.string() + ": truncated field");
  }
  return {{nx, ny}, v};
}

void write_vtk(const std::filesystem::path& path, const TriangleMesh& mesh,
               const std::vector<std::pair<std::string, Vector>>& point_data) {
  auto os = open_out(path);
  os << "# vtk DataFile Version 3.0\nmchom field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Point& p : mesh.points) os << fmt::format("{:.17g} {:.17g} 0\n", p.x, p.y);
  os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
  if (!point_data.empty()) os << "POINT_DATA " << mesh.num_nodes() << '\n';
  for (const auto& [name, values] : point_data) {
    if (values.size() != static_cast<Eigen::Index>(mesh.num_nodes())) {
      throw std::invalid_argument("write_vtk: point data '" + name + "' does not match the mesh");
    }
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index k = 0; k < values.size(); ++k) os << fmt::format("{:.17g}\n", values[k]);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

namespace {

static_assert(std::endian::native == std::endian::little, "trajectory I/O assumes little-endian");

template <class T>
void put_raw(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_raw(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("trajectory file truncated");
  return v;
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  auto os = open_out(path, std::ios::binary);
  os << kTrajectoryMagic << '\n';
  put_raw<std::int32_t>(os, traj.nx);
  put_raw<std::int32_t>(os, traj.ny);
  put_raw<std::int32_t>(os, traj.components);
  put_raw<std::int32_t>(os, static_cast<std::int32_t>(traj.times.size()));
  const auto n = static_cast<Eigen::Index>(traj.nodes_per_component()) * traj.components;
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    if (traj.fields[s].size() != n) throw std::invalid_argument("write_trajectory: snapshot size mismatch");
    put_raw<double>(os, traj.times[s]);
    os.write(reinterpret_cast<const char*>(traj.fields[s].data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  auto is = open_in(path, std::ios::binary);
  std::string magic;
  if (!std::getline(is, magic) || magic != kTrajectoryMagic) {
    throw std::runtime_error(path.string() + ": not a trajectory file");
  }
  Trajectory traj;
  traj.nx = get_raw<std::int32_t>(is);
  traj.ny = get_raw<std::int32_t>(is);
  traj.components = get_raw<std::int32_t>(is);
  const int count = get_raw<std::int32_t>(is);
  if (traj.nx < 1 || traj.ny < 1 || traj.components < 1 || count < 0) {
    throw std::runtime_error(path.string() + ": bad trajectory header");
  }
  const auto n = static_cast<Eigen::Index>(traj.nodes_per_component()) * traj.components;
  for (int s = 0; s < count; ++s) {
    traj.times.push_back(get_raw<double>(is));
    Vector v(n);
    if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)))) {
      throw std::runtime_error(path.string() + ": truncated snapshot");
    }
    traj.fields.push_back(std::move(v));
  }
  return traj;
}

}  // namespace mchom
