#include "mchom/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mchom {

double TriangleMesh::area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point& a = points[tri[0]];
  const Point& b = points[tri[1]];
  const Point& c = points[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point TriangleMesh::barycenter(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point& a = points[tri[0]];
  const Point& b = points[tri[1]];
  const Point& c = points[tri[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

bool StructuredMesh::is_boundary_node(int n) const {
  const int i = n % (nx + 1);
  const int j = n / (nx + 1);
  return i == 0 || j == 0 || i == nx || j == ny;
}

StructuredMesh build_fine_mesh(int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("build_fine_mesh: cell counts must be positive, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
  }
  StructuredMesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.points.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.points.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});
      if (i == 0 || j == 0 || i == nx || j == ny) {
        mesh.boundary_nodes.push_back(mesh.node_index(i, j));
      }
    }
  }
  mesh.triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int bl = mesh.node_index(i, j);
      const int br = mesh.node_index(i + 1, j);
      const int tr = mesh.node_index(i + 1, j + 1);
      const int tl = mesh.node_index(i, j + 1);
      mesh.triangles.push_back({bl, br, tr});
      mesh.triangles.push_back({bl, tr, tl});
    }
  }
  return mesh;
}

CoarsePartition build_coarse_partition(const StructuredMesh& mesh, int M) {
  if (M < 1 || mesh.nx % M != 0 || mesh.ny % M != 0) {
    throw std::invalid_argument("build_coarse_partition: M=" + std::to_string(M) +
                                " must divide the fine cell counts " + std::to_string(mesh.nx) +
                                "x" + std::to_string(mesh.ny));
  }
  CoarsePartition part;
  part.M = M;
  part.H = 1.0 / M;
  part.cells_per_block_x = mesh.nx / M;
  part.cells_per_block_y = mesh.ny / M;
  part.block_elements.resize(static_cast<std::size_t>(M) * M);
  part.block_nodes.resize(static_cast<std::size_t>(M) * M);
  part.element_block.resize(mesh.num_triangles());

  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const int b = part.block_id(i / part.cells_per_block_x, j / part.cells_per_block_y);
      const int c = mesh.cell_index(i, j);
      for (int t : {2 * c, 2 * c + 1}) {
        part.block_elements[b].push_back(t);
        part.element_block[t] = b;
      }
    }
  }
  for (int by = 0; by < M; ++by) {
    for (int bx = 0; bx < M; ++bx) {
      auto& nodes = part.block_nodes[part.block_id(bx, by)];
      for (int j = by * part.cells_per_block_y; j <= (by + 1) * part.cells_per_block_y; ++j) {
        for (int i = bx * part.cells_per_block_x; i <= (bx + 1) * part.cells_per_block_x; ++i) {
          nodes.push_back(mesh.node_index(i, j));
        }
      }
    }
  }
  part.coarse = build_fine_mesh(M, M);
  return part;
}

int oversampling_layers(double H) {
  if (!(H > 0.0 && H < 1.0)) {
    throw std::invalid_argument("oversampling_layers: H must lie in (0,1), got " +
                                std::to_string(H));
  }
  // Guard the ceiling against round-off when -2 ln H is an integer.
  const double v = -2.0 * std::log(H);
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-12) return static_cast<int>(r);
  return static_cast<int>(std::ceil(v));
}

namespace {

// Index folding for the mirrored extension: cells in [0, n), nodes in [0, n].
int fold_cell(int i, int n) {
  const int m = ((i % (2 * n)) + 2 * n) % (2 * n);
  return m < n ? m : 2 * n - 1 - m;
}

int fold_node(int i, int n) {
  const int m = ((i % (2 * n)) + 2 * n) % (2 * n);
  return m <= n ? m : 2 * n - m;
}

}  // namespace

OversampledRegion build_oversampled_region(const StructuredMesh& mesh,
                                           const CoarsePartition& part, int block,
                                           int layers, RegionExtension extension) {
  if (block < 0 || block >= part.num_blocks()) {
    throw std::invalid_argument("build_oversampled_region: block id out of range");
  }
  if (layers < 0) {
    throw std::invalid_argument("build_oversampled_region: layers must be non-negative");
  }
  const bool mirror = extension == RegionExtension::Mirror;
  OversampledRegion r;
  r.center_block = block;
  r.layers = layers;
  r.extension = extension;
  const int bx = part.block_x(block);
  const int by = part.block_y(block);
  r.bx0 = mirror ? bx - layers : std::max(0, bx - layers);
  r.bx1 = mirror ? bx + layers : std::min(part.M - 1, bx + layers);
  r.by0 = mirror ? by - layers : std::max(0, by - layers);
  r.by1 = mirror ? by + layers : std::min(part.M - 1, by + layers);
  for (int y = r.by0; y <= r.by1; ++y) {
    for (int x = r.bx0; x <= r.bx1; ++x) {
      if (x == bx && y == by) r.center_member = static_cast<int>(r.member_blocks.size());
      r.member_blocks.push_back(part.block_id(fold_cell(x, part.M), fold_cell(y, part.M)));
    }
  }

  const int cbx = part.cells_per_block_x;
  const int cby = part.cells_per_block_y;
  r.cell_x0 = r.bx0 * cbx;
  r.cell_y0 = r.by0 * cby;
  r.cells_x = (r.bx1 - r.bx0 + 1) * cbx;
  r.cells_y = (r.by1 - r.by0 + 1) * cby;

  r.global_nodes.reserve(static_cast<std::size_t>(r.cells_x + 1) * (r.cells_y + 1));
  r.local.points.reserve(r.global_nodes.capacity());
  for (int j = r.cell_y0; j <= r.cell_y0 + r.cells_y; ++j) {
    for (int i = r.cell_x0; i <= r.cell_x0 + r.cells_x; ++i) {
      r.global_nodes.push_back(mesh.node_index(fold_node(i, mesh.nx), fold_node(j, mesh.ny)));
      // Mirrored nodes keep their virtual coordinates outside the domain.
      r.local.points.push_back({static_cast<double>(i) / mesh.nx, static_cast<double>(j) / mesh.ny});
    }
  }

  // Local cells reuse the fine split; a mirrored cell takes the values of
  // the triangle with the same index in its source cell.
  r.member_elements.resize(r.member_blocks.size());
  const int members_x = r.bx1 - r.bx0 + 1;
  for (int j = r.cell_y0; j < r.cell_y0 + r.cells_y; ++j) {
    for (int i = r.cell_x0; i < r.cell_x0 + r.cells_x; ++i) {
      const int member = ((j - r.cell_y0) / cby) * members_x + (i - r.cell_x0) / cbx;
      const int c = mesh.cell_index(fold_cell(i, mesh.nx), fold_cell(j, mesh.ny));
      const int bl = r.local_node(i, j);
      const int br = r.local_node(i + 1, j);
      const int tr = r.local_node(i + 1, j + 1);
      const int tl = r.local_node(i, j + 1);
      for (int k = 0; k < 2; ++k) {
        r.member_elements[member].push_back(static_cast<int>(r.global_elements.size()));
        r.global_elements.push_back(2 * c + k);
        r.local.triangles.push_back(k == 0 ? Triangle{bl, br, tr} : Triangle{bl, tr, tl});
      }
    }
  }
  return r;
}

}  // namespace mchom
