#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mchom/metrics_io.hpp"

using namespace mchom;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mchom-test-metrics";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("masked block averages") {
  const auto mesh = build_fine_mesh(40, 40);
  const auto part = build_coarse_partition(mesh, 4);
  const auto medium = crossed_field(mesh, {0.25, 0.05, 0.1, 1e-4, 1.0});
  const Vector c = Vector::Constant(static_cast<Eigen::Index>(mesh.num_nodes()), 2.5);
  for (int i = 0; i < 2; ++i) {
    for (double v : block_continuum_average(mesh, part, medium, c, i)) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
  }
  // A linear field averages to its value at the masked centroid.
  Vector x(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) x[n] = mesh.points[n].x;
  const auto avg = block_continuum_average(mesh, part, homogeneous_field(mesh, 1.0), x, 0);
  CHECK(avg[part.block_id(2, 1)] == doctest::Approx(0.625).epsilon(1e-12));

  const auto blocks = coarse_block_average(part, Vector::Constant(25, -1.0));
  CHECK(blocks.size() == 16);
  for (double v : blocks) CHECK(v == doctest::Approx(-1.0));
}

TEST_CASE("block averages of a single-continuum field are NaN for the missing continuum") {
  const auto mesh = build_fine_mesh(20, 20);
  const auto part = build_coarse_partition(mesh, 2);
  MediumField f = homogeneous_field(mesh, 1.0);
  f.continua = 2;
  const auto avg = block_continuum_average(mesh, part, f, Vector::Ones(static_cast<Eigen::Index>(mesh.num_nodes())), 1);
  for (double v : avg) CHECK(std::isnan(v));
}

TEST_CASE("relative error in percent") {
  const std::vector<double> fine{1.0, -2.0, 3.0, 0.5};
  std::vector<double> coarse = fine;
  CHECK(*relative_error_percent(coarse, fine) == 0.0);
  for (double& v : coarse) v *= 1.01;
  CHECK(*relative_error_percent(coarse, fine) == doctest::Approx(1.0).epsilon(1e-12));
  // Scaling both fields leaves the error unchanged.
  std::vector<double> f2 = fine, c2 = coarse;
  for (double& v : f2) v *= 1e6;
  for (double& v : c2) v *= 1e6;
  CHECK(*relative_error_percent(c2, f2) == doctest::Approx(1.0).epsilon(1e-12));
  // Indicator against zero: 100 percent.
  CHECK(*relative_error_percent(std::vector<double>{0, 0, 0, 0}, fine) == doctest::Approx(100.0));
  CHECK_FALSE(relative_error_percent(fine, std::vector<double>{0, 0, 0, 0}).has_value());
  // NaN blocks are skipped.
  const std::vector<double> fn{1.0, std::nan(""), 2.0};
  const std::vector<double> cn{1.0, 5.0, 2.0};
  CHECK(*relative_error_percent(cn, fn) == 0.0);
}

TEST_CASE("error tables round trip") {
  ErrorTable t;
  t.continua = 2;
  for (int k = 1; k <= 10; ++k) {
    t.times.push_back(0.1 * k);
    t.percent.push_back({1.2345 * k, 0.5 + k});
  }
  write_error_table(scratch("errors.csv"), t);
  const std::string text = slurp(scratch("errors.csv"));
  CHECK(text.find("t,e1_percent,e2_percent") != std::string::npos);
  const ErrorTable back = read_error_table(scratch("errors.csv"));
  REQUIRE(back.times.size() == 10);
  REQUIRE(back.percent.front().size() == 2);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(back.times[k] == doctest::Approx(t.times[k]).epsilon(1e-12));
    CHECK(back.percent[k][0] == doctest::Approx(t.percent[k][0]).epsilon(1e-4));
  }
  CHECK(format_error_table(t).find("1.2345") != std::string::npos);

  ErrorTable empty;
  write_error_table(scratch("empty.csv"), empty);
  CHECK(read_error_table(scratch("empty.csv")).times.empty());
}

TEST_CASE("fields and trajectories round trip exactly") {
  Vector v(12);
  for (int k = 0; k < 12; ++k) v[k] = std::sin(1.0 + k) * 1e-7 + k;
  write_field(scratch("field.txt"), 3, 2, v);
  const auto [dims, back] = read_field(scratch("field.txt"));
  CHECK(dims.first == 3);
  CHECK(dims.second == 2);
  CHECK((back.array() == v.array()).all());

  Trajectory t;
  t.nx = 3;
  t.ny = 2;
  t.components = 2;
  for (int s = 0; s < 3; ++s) {
    t.times.push_back(0.1 * s);
    t.fields.push_back(Vector::LinSpaced(24, -1.0, 1.0 + s) * std::exp(s));
  }
  write_trajectory(scratch("t.traj"), t);
  const Trajectory r = read_trajectory(scratch("t.traj"));
  CHECK(r.nx == 3);
  CHECK(r.components == 2);
  REQUIRE(r.times.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(r.times[s] == t.times[s]);
    CHECK((r.fields[s].array() == t.fields[s].array()).all());
  }
  CHECK((r.component(0.2, 1).array() == t.fields[2].tail(12).array()).all());
  CHECK_THROWS(r.at(0.15));

  std::ofstream(scratch("broken.traj")) << "mchom-trajectory v1\n";
  CHECK_THROWS(read_trajectory(scratch("broken.traj")));
  CHECK_THROWS(read_field(scratch("missing.txt")));
}

TEST_CASE("VTK output lists points, cells and data") {
  const auto mesh = build_fine_mesh(2, 2);
  write_vtk(scratch("m.vtk"), mesh, {{"u", Vector::Ones(9)}});
  const std::string text = slurp(scratch("m.vtk"));
  CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(text.find("POINTS 9") != std::string::npos);
  CHECK(text.find("CELLS 8 32") != std::string::npos);
  CHECK(text.find("POINT_DATA 9") != std::string::npos);
  CHECK(text.find("SCALARS u") != std::string::npos);
}
