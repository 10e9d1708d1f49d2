#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ifcgrl/geometry.hpp"
#include "ifcgrl/rng.hpp"

using namespace ifcgrl;
using geo::TriangleMesh;

namespace {

TriangleMesh single_triangle() {
  TriangleMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  mesh.faces = {{0, 1, 2}};
  return mesh;
}

}  // namespace

TEST_CASE("load_obj basics") {
  SUBCASE("unit right triangle") {
    TriangleMesh mesh = geo::load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK(mesh.vertices.size() == 3);
    CHECK(mesh.faces.size() == 1);
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
  }
  SUBCASE("quad faces fan-triangulate") {
    TriangleMesh mesh =
        geo::load_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    REQUIRE(mesh.faces.size() == 2);
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
    CHECK(mesh.faces[1] == std::array<int, 3>{0, 2, 3});
  }
  SUBCASE("face index out of range") {
    try {
      geo::load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
      FAIL("expected GeomError");
    } catch (const geo::GeomError& e) {
      CHECK(e.kind == geo::GeomErrorKind::index_out_of_range);
    }
  }
  SUBCASE("vertex-only file is an empty mesh") {
    try {
      geo::load_obj("v 0 0 0\nv 1 0 0\n");
      FAIL("expected GeomError");
    } catch (const geo::GeomError& e) {
      CHECK(e.kind == geo::GeomErrorKind::empty_mesh);
    }
  }
  SUBCASE("f 1/2/3 forms and comments are handled") {
    TriangleMesh mesh = geo::load_obj(
        "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\nf 1/1/1 2/1/1 3/1/1\n");
    CHECK(mesh.faces.size() == 1);
  }
  SUBCASE("degenerate faces are dropped") {
    TriangleMesh mesh = geo::load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 1 2\nf 1 2 3\n");
    CHECK(mesh.faces.size() == 1);
  }
  SUBCASE("bundled fixture mesh loads") {
    std::ifstream in(std::string(IFCGRL_FIXTURE_DIR) + "/obj/toy_house/2.obj");
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    TriangleMesh mesh = geo::load_obj(buf.str());
    CHECK(mesh.vertices.size() == 8);
    CHECK(mesh.faces.size() == 12);
  }
}

TEST_CASE("sampled points stay in the source plane") {
  geo::PointCloud cloud = geo::sample_point_cloud(single_triangle(), 4, 7);
  REQUIRE(cloud.count == 4);
  for (std::size_t i = 0; i < cloud.count; ++i) {
    CHECK(std::abs(cloud.points[i * 3 + 2]) <= 1e-9);
  }
}

TEST_CASE("sampling is area-weighted") {
  // areas 3 : 1, spatially separated so samples are attributable
  TriangleMesh mesh;
  mesh.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 2, 0}, {10, 0, 0}, {11, 0, 0}, {10, 2, 0}};
  mesh.faces = {{0, 1, 2}, {3, 4, 5}};
  const std::size_t n = 100000;
  geo::PointCloud cloud = geo::sample_point_cloud(mesh, n, 1234);

  // normalized coordinates keep the gap between the two triangles; split at
  // the largest gap along x
  std::vector<float> xs(cloud.count);
  for (std::size_t i = 0; i < cloud.count; ++i) xs[i] = cloud.points[i * 3];
  std::vector<float> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  float threshold = sorted.front();
  float best_gap = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    float gap = sorted[i] - sorted[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      threshold = (sorted[i] + sorted[i - 1]) / 2;
    }
  }
  std::size_t first = 0;
  for (float x : xs) {
    if (x < threshold) ++first;
  }
  double fraction = static_cast<double>(first) / static_cast<double>(n);
  CHECK(fraction == doctest::Approx(0.75).epsilon(0.0134));  // 0.75 +- 0.01
}

TEST_CASE("normalization postconditions") {
  TriangleMesh mesh = geo::make_box(2.0, 1.0, 0.5);
  geo::PointCloud cloud = geo::sample_point_cloud(mesh, 1024, 99);
  double cx = 0, cy = 0, cz = 0, max_norm = 0;
  for (std::size_t i = 0; i < cloud.count; ++i) {
    double x = cloud.points[i * 3], y = cloud.points[i * 3 + 1], z = cloud.points[i * 3 + 2];
    cx += x;
    cy += y;
    cz += z;
    max_norm = std::max(max_norm, std::sqrt(x * x + y * y + z * z));
  }
  cx /= static_cast<double>(cloud.count);
  cy /= static_cast<double>(cloud.count);
  cz /= static_cast<double>(cloud.count);
  CHECK(std::abs(cx) < 1e-5);
  CHECK(std::abs(cy) < 1e-5);
  CHECK(std::abs(cz) < 1e-5);
  CHECK(std::abs(max_norm - 1.0) < 1e-5);
}

TEST_CASE("sampling is bit-deterministic given the seed") {
  TriangleMesh mesh = geo::make_box(1.0, 0.7, 0.3);
  geo::PointCloud a = geo::sample_point_cloud(mesh, 256, 42);
  geo::PointCloud b = geo::sample_point_cloud(mesh, 256, 42);
  CHECK(a == b);
  geo::PointCloud c = geo::sample_point_cloud(mesh, 256, 43);
  CHECK(a.points != c.points);
}

TEST_CASE("zero-area mesh is rejected") {
  TriangleMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};  // collinear
  mesh.faces = {{0, 1, 2}};
  try {
    geo::sample_point_cloud(mesh, 8, 0);
    FAIL("expected GeomError");
  } catch (const geo::GeomError& e) {
    CHECK(e.kind == geo::GeomErrorKind::zero_area_mesh);
  }
}

TEST_CASE("signature invariance under rigid motion") {
  TriangleMesh mesh = geo::make_box(1.0, 0.7, 0.3);
  geo::ShapeSignature base = geo::shape_signature(mesh);
  SUBCASE("translation") {
    geo::ShapeSignature moved = geo::shape_signature(geo::translated(mesh, {5, 7, 9}));
    CHECK(geo::signature_distance(base, moved) < 1e-3);
  }
  SUBCASE("90-degree rotation of a cube") {
    TriangleMesh cube = geo::make_box(1, 1, 1);
    geo::ShapeSignature a = geo::shape_signature(cube);
    geo::ShapeSignature b = geo::shape_signature(geo::rotated_z(cube, M_PI / 2));
    CHECK(geo::signature_distance(a, b) < 1e-3);
  }
  SUBCASE("random rigid motions") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
      geo::Vec3 axis = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      if (std::abs(axis[0]) + std::abs(axis[1]) + std::abs(axis[2]) < 1e-3) axis = {1, 0, 0};
      double angle = rng.uniform(0, 2 * M_PI);
      geo::Vec3 offset = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
      TriangleMesh moved = geo::translated(geo::rotated(mesh, axis, angle), offset);
      CHECK(geo::signature_distance(base, geo::shape_signature(moved)) < 1e-3);
    }
  }
}

TEST_CASE("scaling changes the signature") {
  TriangleMesh cube = geo::make_box(1, 1, 1);
  geo::ShapeSignature a = geo::shape_signature(cube);
  geo::ShapeSignature b = geo::shape_signature(geo::scaled(cube, 2.0));
  CHECK(geo::signature_distance(a, b) > 1e-3);
}

TEST_CASE("deduplicate") {
  TriangleMesh a = geo::make_box(1.0, 0.7, 0.3);
  TriangleMesh a_translated = geo::translated(a, {4, 4, 4});
  TriangleMesh a_rotated = geo::rotated(a, {1, 2, 3}, 0.8);
  TriangleMesh a_scaled = geo::scaled(a, 2.0);
  TriangleMesh b = geo::make_cylinder(0.4, 2.0, 16);

  SUBCASE("translated copy is dropped") {
    auto survivors = geo::deduplicate({{1, &a}, {2, &a_translated}, {3, &b}});
    CHECK(survivors == std::vector<std::int64_t>{1, 3});
  }
  SUBCASE("all distinct set is unchanged") {
    auto survivors = geo::deduplicate({{1, &a}, {2, &b}, {3, &a_scaled}});
    CHECK(survivors == std::vector<std::int64_t>{1, 2, 3});
  }
  SUBCASE("rotated copy dropped, scaled copy kept") {
    auto survivors = geo::deduplicate({{1, &a}, {2, &a_rotated}, {3, &a_scaled}});
    CHECK(survivors == std::vector<std::int64_t>{1, 3});
  }
  SUBCASE("idempotence") {
    std::vector<std::pair<std::int64_t, const TriangleMesh*>> pool = {
        {1, &a}, {2, &a_translated}, {3, &a_rotated}, {4, &a_scaled}, {5, &b}};
    auto once = geo::deduplicate(pool);
    std::vector<std::pair<std::int64_t, const TriangleMesh*>> filtered;
    for (const auto& [id, mesh] : pool) {
      if (std::find(once.begin(), once.end(), id) != once.end()) filtered.emplace_back(id, mesh);
    }
    CHECK(geo::deduplicate(filtered) == once);
  }
  SUBCASE("first occurrence survives regardless of input order") {
    auto survivors = geo::deduplicate({{9, &a}, {4, &a_translated}, {7, &b}});
    CHECK(survivors == std::vector<std::int64_t>{4, 7});  // ascending-id scan: #4 first
  }
}
