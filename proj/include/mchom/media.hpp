#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mchom/grid.hpp"

namespace mchom {

/// Piecewise-constant coefficient on the fine triangles plus a continuum
/// label per triangle. Continuum indices are 0-based in code; raster files
/// use 1-based labels.
struct MediumField {
  std::vector<double> value;  // kappa (or A) per fine triangle
  std::vector<int> label;     // continuum per fine triangle, in [0, continua)
  int continua = 1;

  std::size_t size() const { return value.size(); }
  double contrast() const;
};

/// Horizontal and vertical channels of the high value crossing on a square
/// lattice. A triangle is in a channel when its barycenter satisfies
/// fmod(x - offset, period) < width in either coordinate.
struct CrossedGeometry {
  double period = 0.025;
  double width = 0.005;
  double offset = 0.01;
  double low = 1e-4;
  double high = 1.0;
};

/// Vertical stripes of the high value, `stripes` of them evenly spaced.
struct LayeredGeometry {
  int stripes = 40;
  double width = 0.005;
  double offset = 0.01;
  double low = 1e-4;
  double high = 1.0;
};

MediumField crossed_field(const StructuredMesh& mesh, const CrossedGeometry& geometry);
MediumField layered_field(const StructuredMesh& mesh, const LayeredGeometry& geometry);
MediumField homogeneous_field(const StructuredMesh& mesh, double value);

/// Replaces the per-continuum values while keeping labels, e.g. to build an
/// A-field with the same geometry as a kappa-field.
MediumField with_continuum_values(const MediumField& field, const std::vector<double>& values);

/// 0/1 indicator of continuum p on each fine triangle.
std::vector<double> characteristic(const MediumField& field, int p);

/// Throws DegeneracyError if some coarse block misses a continuum.
void require_all_continua_per_block(const MediumField& field, const CoarsePartition& part);

/// Raster text format: header `nx ny N`, then one `label value` line per
/// raster cell in row-major order (x fastest, y ascending), labels 1-based.
MediumField load_raster(const std::filesystem::path& path, const StructuredMesh& mesh);
void save_raster(const std::filesystem::path& path, const MediumField& field,
                 const StructuredMesh& mesh);

}  // namespace mchom
