#include "ifcgrl/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ifcgrl/rng.hpp"

namespace ifcgrl::geo {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

double triangle_area(const TriangleMesh& mesh, const std::array<int, 3>& face) {
  Vec3 e1 = sub(mesh.vertices[face[1]], mesh.vertices[face[0]]);
  Vec3 e2 = sub(mesh.vertices[face[2]], mesh.vertices[face[0]]);
  return 0.5 * norm(cross(e1, e2));
}

// Raw area-weighted surface samples in model coordinates.
std::vector<Vec3> surface_samples(const TriangleMesh& mesh, std::size_t n, Rng& rng) {
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw GeomError(GeomErrorKind::empty_mesh, "mesh has no geometry to sample");
  }
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    total += triangle_area(mesh, mesh.faces[i]);
    cumulative[i] = total;
  }
  if (!(total > 0.0)) {
    throw GeomError(GeomErrorKind::zero_area_mesh, "mesh surface area is zero");
  }

  std::vector<Vec3> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.next_double() * total;
    std::size_t t = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (t >= mesh.faces.size()) t = mesh.faces.size() - 1;
    const auto& face = mesh.faces[t];
    const Vec3& a = mesh.vertices[face[0]];
    const Vec3& b = mesh.vertices[face[1]];
    const Vec3& c = mesh.vertices[face[2]];
    // uniform barycentric point via the sqrt trick
    double r1 = std::sqrt(rng.next_double());
    double r2 = rng.next_double();
    double wa = 1.0 - r1;
    double wb = r1 * (1.0 - r2);
    double wc = r1 * r2;
    points[i] = {wa * a[0] + wb * b[0] + wc * c[0],
                 wa * a[1] + wb * b[1] + wc * c[1],
                 wa * a[2] + wb * b[2] + wc * c[2]};
  }
  return points;
}

constexpr std::uint64_t kSignatureSeed = 0x516e617475726531ULL;

}  // namespace

TriangleMesh load_obj(std::string_view text) {
  TriangleMesh mesh;
  std::istringstream in{std::string(text)};
  std::string line;
  auto parse_index = [&](const std::string& token) -> int {
    long v = std::strtol(token.c_str(), nullptr, 10);
    long n = static_cast<long>(mesh.vertices.size());
    long idx = v > 0 ? v - 1 : n + v;  // negative indices are relative
    if (v == 0 || idx < 0 || idx >= n) {
      throw GeomError(GeomErrorKind::index_out_of_range,
                      "face references vertex " + token + " of " + std::to_string(n));
    }
    return static_cast<int>(idx);
  };

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 v{};
      ls >> v[0] >> v[1] >> v[2];
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(parse_index(tok.substr(0, tok.find('/'))));
      for (std::size_t i = 2; i < idx.size(); ++i) {
        std::array<int, 3> face = {idx[0], idx[i - 1], idx[i]};
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) continue;
        mesh.faces.push_back(face);
      }
    }
    // vn/vt/o/g/usemtl/s/# and friends are ignored
  }
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw GeomError(GeomErrorKind::empty_mesh, "OBJ contains no usable triangles");
  }
  return mesh;
}

PointCloud sample_point_cloud(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> raw = surface_samples(mesh, n, rng);

  Vec3 centroid{};
  for (const Vec3& p : raw) {
    centroid[0] += p[0];
    centroid[1] += p[1];
    centroid[2] += p[2];
  }
  for (double& c : centroid) c /= static_cast<double>(n);

  double max_norm = 0.0;
  for (Vec3& p : raw) {
    p = sub(p, centroid);
    max_norm = std::max(max_norm, norm(p));
  }
  if (!(max_norm > 0.0)) {
    throw GeomError(GeomErrorKind::zero_area_mesh, "degenerate sample spread");
  }

  PointCloud cloud;
  cloud.count = n;
  cloud.points.resize(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points[i * 3 + 0] = static_cast<float>(raw[i][0] / max_norm);
    cloud.points[i * 3 + 1] = static_cast<float>(raw[i][1] / max_norm);
    cloud.points[i * 3 + 2] = static_cast<float>(raw[i][2] / max_norm);
  }
  return cloud;
}

ShapeSignature shape_signature(const TriangleMesh& mesh, int bins) {
  Rng rng(kSignatureSeed);
  std::vector<Vec3> samples = surface_samples(mesh, kSignatureSamples, rng);

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const Vec3& p : samples) mean += Eigen::Vector3d(p[0], p[1], p[2]);
  mean /= static_cast<double>(samples.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : samples) {
    Eigen::Vector3d d = Eigen::Vector3d(p[0], p[1], p[2]) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(samples.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Matrix3d axes = solver.eigenvectors();

  std::array<double, 3> extents{};
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d axis = axes.col(a);
    // orient so the third moment of projections is non-negative
    double m3 = 0.0;
    for (const Vec3& p : samples) {
      double t = axis.dot(Eigen::Vector3d(p[0], p[1], p[2]) - mean);
      m3 += t * t * t;
    }
    if (m3 < 0.0) axis = -axis;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const Vec3& p : samples) {
      double t = axis.dot(Eigen::Vector3d(p[0], p[1], p[2]) - mean);
      if (first) {
        lo = hi = t;
        first = false;
      } else {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    }
    extents[a] = hi - lo;
  }
  std::sort(extents.begin(), extents.end(), std::greater<>());

  std::vector<double> histogram(static_cast<std::size_t>(bins), 0.0);
  double dmax = 0.0;
  std::vector<double> dists;
  dists.reserve(kSignatureSamples * (kSignatureSamples - 1) / 2);
  for (int i = 0; i < kSignatureSamples; ++i) {
    for (int j = i + 1; j < kSignatureSamples; ++j) {
      double d = norm(sub(samples[i], samples[j]));
      dists.push_back(d);
      dmax = std::max(dmax, d);
    }
  }
  if (dmax > 0.0) {
    for (double d : dists) {
      int idx = std::min(bins - 1, static_cast<int>(d / dmax * bins));
      histogram[static_cast<std::size_t>(idx)] += 1.0;
    }
    for (double& h : histogram) h /= static_cast<double>(dists.size());
  }

  ShapeSignature sig;
  sig.descriptor.assign(extents.begin(), extents.end());
  sig.descriptor.insert(sig.descriptor.end(), histogram.begin(), histogram.end());
  return sig;
}

double signature_distance(const ShapeSignature& a, const ShapeSignature& b) {
  if (a.descriptor.size() != b.descriptor.size()) {
    throw std::invalid_argument("signature length mismatch");
  }
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  double na = norm2(a.descriptor);
  double nb = norm2(b.descriptor);
  if (na == 0.0 || nb == 0.0) return na == nb ? 0.0 : 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.descriptor.size(); ++i) {
    double d = a.descriptor[i] / na - b.descriptor[i] / nb;
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<std::size_t> greedy_dedup_by_signature(const std::vector<ShapeSignature>& signatures,
                                                   double tolerance) {
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    bool duplicate = false;
    for (std::size_t kept : survivors) {
      if (signature_distance(signatures[i], signatures[kept]) < tolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) survivors.push_back(i);
  }
  return survivors;
}

std::vector<std::int64_t> deduplicate(
    const std::vector<std::pair<std::int64_t, const TriangleMesh*>>& objects,
    const DedupParams& params) {
  std::vector<std::pair<std::int64_t, const TriangleMesh*>> ordered = objects;
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<ShapeSignature> signatures;
  signatures.reserve(ordered.size());
  for (const auto& [id, mesh] : ordered) signatures.push_back(shape_signature(*mesh, params.bins));

  std::vector<std::int64_t> survivors;
  for (std::size_t i : greedy_dedup_by_signature(signatures, params.tolerance)) {
    survivors.push_back(ordered[i].first);
  }
  return survivors;
}

TriangleMesh make_box(double dx, double dy, double dz) {
  double x = dx / 2, y = dy / 2, z = dz / 2;
  TriangleMesh mesh;
  mesh.vertices = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                   {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  mesh.faces = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                {2, 3, 7}, {2, 7, 6}, {1, 2, 6}, {1, 6, 5}, {3, 0, 4}, {3, 4, 7}};
  return mesh;
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  TriangleMesh mesh;
  double h = height / 2;
  for (int i = 0; i < segments; ++i) {
    double a = 2.0 * M_PI * i / segments;
    mesh.vertices.push_back({radius * std::cos(a), radius * std::sin(a), -h});
    mesh.vertices.push_back({radius * std::cos(a), radius * std::sin(a), h});
  }
  int bottom_center = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, -h});
  int top_center = bottom_center + 1;
  mesh.vertices.push_back({0, 0, h});

  for (int i = 0; i < segments; ++i) {
    int j = (i + 1) % segments;
    int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    mesh.faces.push_back({b0, b1, t1});
    mesh.faces.push_back({b0, t1, t0});
    mesh.faces.push_back({bottom_center, b1, b0});
    mesh.faces.push_back({top_center, t0, t1});
  }
  return mesh;
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) {
    v[0] += offset[0];
    v[1] += offset[1];
    v[2] += offset[2];
  }
  return out;
}

TriangleMesh rotated_z(const TriangleMesh& mesh, double angle) {
  return rotated(mesh, {0, 0, 1}, angle);
}

TriangleMesh rotated(const TriangleMesh& mesh, const Vec3& axis, double angle) {
  double n = norm(axis);
  Vec3 u = {axis[0] / n, axis[1] / n, axis[2] / n};
  double c = std::cos(angle), s = std::sin(angle);
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) {
    // Rodrigues rotation
    Vec3 k_cross_v = cross(u, v);
    double k_dot_v = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    Vec3 r;
    for (int i = 0; i < 3; ++i) {
      r[i] = v[i] * c + k_cross_v[i] * s + u[i] * k_dot_v * (1 - c);
    }
    v = r;
  }
  return out;
}

TriangleMesh scaled(const TriangleMesh& mesh, double factor) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) {
    v[0] *= factor;
    v[1] *= factor;
    v[2] *= factor;
  }
  return out;
}

}  // namespace ifcgrl::geo
