#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ifcgrl::geo {

using Vec3 = std::array<double, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based vertex indices
};

// Unit-sphere-normalized sample of a mesh surface: centroid at the origin,
// max point norm 1. Stored as float32 (the dataset's on-disk precision).
struct PointCloud {
  std::size_t count = 0;
  std::vector<float> points;  // count x 3, row-major

  bool operator==(const PointCloud&) const = default;
};

// Translation/rotation-invariant shape descriptor used for deduplication:
// sorted PCA extents followed by a normalized pairwise-distance histogram.
struct ShapeSignature {
  std::vector<double> descriptor;
};

enum class GeomErrorKind {
  index_out_of_range,
  empty_mesh,
  zero_area_mesh,
};

class GeomError : public std::runtime_error {
 public:
  GeomError(GeomErrorKind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  GeomErrorKind kind;
};

// Wavefront OBJ subset: 'v' and 'f' records, polygons fan-triangulated,
// normals/texcoords ignored. Faces with repeated vertex indices are dropped.
TriangleMesh load_obj(std::string_view text);

// n surface points, area-weighted and uniform per triangle, centered at
// their centroid and scaled to max norm 1. Bit-deterministic given seed.
PointCloud sample_point_cloud(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

inline constexpr int kSignatureSamples = 128;
inline constexpr int kDefaultSignatureBins = 64;

ShapeSignature shape_signature(const TriangleMesh& mesh, int bins = kDefaultSignatureBins);

// L2 distance between L2-normalized descriptors.
double signature_distance(const ShapeSignature& a, const ShapeSignature& b);

struct DedupParams {
  int bins = kDefaultSignatureBins;
  double tolerance = 1e-3;  // on L2-normalized signatures
};

// Greedy scan in ascending id order; an object within tolerance of an
// earlier survivor is dropped. Returns surviving ids in ascending order.
std::vector<std::int64_t> deduplicate(
    const std::vector<std::pair<std::int64_t, const TriangleMesh*>>& objects,
    const DedupParams& params = {});

// Greedy scan over precomputed signatures in the given order; returns the
// indices of the survivors.
std::vector<std::size_t> greedy_dedup_by_signature(const std::vector<ShapeSignature>& signatures,
                                                   double tolerance);

// Simple parametric meshes (test fixtures and the synthetic benchmark).
TriangleMesh make_box(double dx, double dy, double dz);
TriangleMesh make_cylinder(double radius, double height, int segments);

// Rigid motions, for invariance checks and synthetic data.
TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset);
TriangleMesh rotated_z(const TriangleMesh& mesh, double angle);
TriangleMesh rotated(const TriangleMesh& mesh, const Vec3& axis, double angle);
TriangleMesh scaled(const TriangleMesh& mesh, double factor);

}  // namespace ifcgrl::geo
