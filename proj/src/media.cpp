#include "mchom/media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "mchom/errors.hpp"

namespace mchom {

namespace {

bool in_band(double x, double offset, double period, double width) {
  double r = std::fmod(x - offset, period);
  if (r < 0.0) r += period;
  return r < width;
}

void check_two_values(double low, double high) {
  if (!(low > 0.0) || !(high > 0.0)) {
    throw std::invalid_argument("medium values must be strictly positive");
  }
}

void check_resolvable(const StructuredMesh& mesh, double width, double period) {
  const double h = std::max(mesh.hx(), mesh.hy());
  if (width < h * (1.0 - 1e-9)) {
    throw std::invalid_argument(
        fmt::format("channel width {} is not resolvable by fine cell size {}", width, h));
  }
  if (!(period > width)) {
    throw std::invalid_argument(
        fmt::format("channel period {} must exceed the channel width {}", period, width));
  }
}

}  // namespace

double MediumField::contrast() const {
  const auto [lo, hi] = std::minmax_element(value.begin(), value.end());
  return *hi / *lo;
}

MediumField crossed_field(const StructuredMesh& mesh, const CrossedGeometry& g) {
  check_two_values(g.low, g.high);
  check_resolvable(mesh, g.width, g.period);
  MediumField f;
  f.continua = 2;
  f.value.resize(mesh.num_triangles());
  f.label.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Point b = mesh.barycenter(t);
    const bool channel =
        in_band(b.x, g.offset, g.period, g.width) || in_band(b.y, g.offset, g.period, g.width);
    f.label[t] = channel ? 1 : 0;
    f.value[t] = channel ? g.high : g.low;
  }
  return f;
}

MediumField layered_field(const StructuredMesh& mesh, const LayeredGeometry& g) {
  check_two_values(g.low, g.high);
  if (g.stripes < 1) throw std::invalid_argument("layered_field: stripes must be positive");
  const double period = 1.0 / g.stripes;
  check_resolvable(mesh, g.width, period);
  MediumField f;
  f.continua = 2;
  f.value.resize(mesh.num_triangles());
  f.label.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const bool stripe = in_band(mesh.barycenter(t).x, g.offset, period, g.width);
    f.label[t] = stripe ? 1 : 0;
    f.value[t] = stripe ? g.high : g.low;
  }
  return f;
}

MediumField homogeneous_field(const StructuredMesh& mesh, double value) {
  if (!(value > 0.0)) throw std::invalid_argument("homogeneous_field: value must be positive");
  MediumField f;
  f.continua = 1;
  f.value.assign(mesh.num_triangles(), value);
  f.label.assign(mesh.num_triangles(), 0);
  return f;
}

MediumField with_continuum_values(const MediumField& field, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != field.continua) {
    throw std::invalid_argument("with_continuum_values: need one value per continuum");
  }
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("with_continuum_values: values must be positive");
  }
  MediumField out = field;
  for (std::size_t t = 0; t < out.size(); ++t) out.value[t] = values[out.label[t]];
  return out;
}

std::vector<double> characteristic(const MediumField& field, int p) {
  if (p < 0 || p >= field.continua) {
    throw std::invalid_argument(
        fmt::format("characteristic: continuum {} out of range [0,{})", p, field.continua));
  }
  std::vector<double> chi(field.size());
  for (std::size_t t = 0; t < field.size(); ++t) chi[t] = field.label[t] == p ? 1.0 : 0.0;
  return chi;
}

void require_all_continua_per_block(const MediumField& field, const CoarsePartition& part) {
  for (int b = 0; b < part.num_blocks(); ++b) {
    std::vector<bool> seen(field.continua, false);
    for (int t : part.block_elements[b]) seen[field.label[t]] = true;
    for (int p = 0; p < field.continua; ++p) {
      if (!seen[p]) {
        throw DegeneracyError(fmt::format(
            "coarse block {} (bx={}, by={}, H=1/{}) contains no element of continuum {}", b,
            part.block_x(b), part.block_y(b), part.M, p + 1));
      }
    }
  }
}

MediumField load_raster(const std::filesystem::path& path, const StructuredMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_raster: cannot open " + path.string());
  int rx = 0, ry = 0, n = 0;
  if (!(in >> rx >> ry >> n) || rx < 1 || ry < 1 || n < 1) {
    throw std::invalid_argument("load_raster: malformed header in " + path.string());
  }
  if (mesh.nx % rx != 0 || mesh.ny % ry != 0) {
    throw std::invalid_argument(fmt::format(
        "load_raster: raster {}x{} does not divide mesh {}x{}", rx, ry, mesh.nx, mesh.ny));
  }
  std::vector<int> labels(static_cast<std::size_t>(rx) * ry);
  std::vector<double> values(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!(in >> labels[k] >> values[k])) {
      throw std::invalid_argument("load_raster: truncated data in " + path.string());
    }
    if (labels[k] < 1 || labels[k] > n) {
      throw std::invalid_argument(fmt::format("load_raster: label {} outside 1..{}", labels[k], n));
    }
    if (!(values[k] > 0.0)) {
      throw std::invalid_argument("load_raster: coefficient values must be positive");
    }
  }
  MediumField f;
  f.continua = n;
  f.value.resize(mesh.num_triangles());
  f.label.resize(mesh.num_triangles());
  const int sx = mesh.nx / rx;
  const int sy = mesh.ny / ry;
  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j / sy) * rx + i / sx;
      const int c = mesh.cell_index(i, j);
      for (int t : {2 * c, 2 * c + 1}) {
        f.label[t] = labels[k] - 1;
        f.value[t] = values[k];
      }
    }
  }
  return f;
}

void save_raster(const std::filesystem::path& path, const MediumField& field,
                 const StructuredMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_raster: cannot open " + path.string());
  out << fmt::format("{} {} {}\n", mesh.nx, mesh.ny, field.continua);
  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const int c = mesh.cell_index(i, j);
      if (field.label[2 * c] != field.label[2 * c + 1] ||
          field.value[2 * c] != field.value[2 * c + 1]) {
        throw std::invalid_argument(
            fmt::format("save_raster: cell ({},{}) is not uniform across its triangles", i, j));
      }
      out << fmt::format("{} {:.17g}\n", field.label[2 * c] + 1, field.value[2 * c]);
    }
  }
  if (!out) throw std::runtime_error("save_raster: write failed for " + path.string());
}

}  // namespace mchom
