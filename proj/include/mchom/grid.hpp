#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mchom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<int, 3>;

/// Plain triangle soup: node coordinates plus counter-clockwise connectivity.
struct TriangleMesh {
  std::vector<Point> points;
  std::vector<Triangle> triangles;

  std::size_t num_nodes() const { return points.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double area(std::size_t t) const;
  Point barycenter(std::size_t t) const;
};

/// Uniform triangulation of the unit square. Cell (i, j) owns triangles
/// 2c and 2c+1 with c = j*nx + i; the split runs bottom-left to top-right.
struct StructuredMesh : TriangleMesh {
  int nx = 0;
  int ny = 0;
  std::vector<int> boundary_nodes;

  double hx() const { return 1.0 / nx; }
  double hy() const { return 1.0 / ny; }
  int node_index(int i, int j) const { return j * (nx + 1) + i; }
  int cell_index(int i, int j) const { return j * nx + i; }
  static int cell_of_triangle(int t) { return t / 2; }
  bool is_boundary_node(int n) const;
};

StructuredMesh build_fine_mesh(int nx, int ny);

/// M x M coarse blocks over a structured fine mesh.
struct CoarsePartition {
  int M = 0;
  double H = 0.0;
  int cells_per_block_x = 0;
  int cells_per_block_y = 0;
  std::vector<std::vector<int>> block_elements;  // fine triangles per block
  std::vector<std::vector<int>> block_nodes;     // fine nodes per closed block
  std::vector<int> element_block;                // fine triangle -> block
  StructuredMesh coarse;                         // M x M coarse triangulation

  int num_blocks() const { return M * M; }
  int block_id(int bx, int by) const { return by * M + bx; }
  int block_x(int b) const { return b % M; }
  int block_y(int b) const { return b / M; }
  double block_area() const { return H * H; }
};

CoarsePartition build_coarse_partition(const StructuredMesh& mesh, int M);

/// ceil(-2 ln H): layer count used to grow an RVE into its oversampled region.
int oversampling_layers(double H);

/// How an oversampled region treats the part that would leave the domain:
/// Clip drops it; Mirror keeps the full (2l+1)^2 window and fills the
/// outside with the medium reflected across the boundary.
enum class RegionExtension { Clip, Mirror };

/// Rectangle of coarse blocks around a target block.
/// Local node numbering is row-major over the fine-cell rectangle
/// [cell_x0, cell_x0 + cells_x) x [cell_y0, cell_y0 + cells_y).
struct OversampledRegion {
  int center_block = 0;
  int layers = 0;
  RegionExtension extension = RegionExtension::Clip;
  int bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;  // inclusive block range
  std::vector<int> member_blocks;  // source block ids (mirror images for Mirror)
  int center_member = 0;  // position of the center block in member_blocks

  int cell_x0 = 0, cell_y0 = 0, cells_x = 0, cells_y = 0;
  std::vector<int> global_nodes;     // local -> global fine node
  std::vector<int> global_elements;  // local -> global fine triangle
  TriangleMesh local;                // local connectivity over global_nodes
  std::vector<std::vector<int>> member_elements;  // local triangle ids per member

  int local_node(int gi, int gj) const {
    return (gj - cell_y0) * (cells_x + 1) + (gi - cell_x0);
  }
  std::size_t num_members() const { return member_blocks.size(); }
};

OversampledRegion build_oversampled_region(const StructuredMesh& mesh,
                                           const CoarsePartition& part,
                                           int block, int layers,
                                           RegionExtension extension = RegionExtension::Clip);

}  // namespace mchom
