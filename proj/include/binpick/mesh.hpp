#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "binpick/pose.hpp"

namespace binpick {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh in meters with flat per-triangle normals.
///
/// Construction drops triangles whose area is below kMinTriangleArea so every
/// stored normal is well defined.
class TriangleMesh {
 public:
  static constexpr double kMinTriangleArea = 1e-12;

  TriangleMesh() = default;
  TriangleMesh(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }

  bool empty() const { return triangles_.empty(); }
  double total_area() const;

  std::array<Vec3, 3> corners(std::size_t tri) const;

  TriangleMesh transformed(const Pose& p) const;
  /// Concatenates both meshes into one.
  TriangleMesh merged(const TriangleMesh& other) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
};

/// Reads the `v x y z` / triangular `f` subset of Wavefront OBJ. Face tokens
/// may carry `/vt/vn` suffixes, which are ignored; negative indices count
/// back from the last vertex.
TriangleMesh load_obj(const std::filesystem::path& path);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
  std::uint32_t triangle_index = 0;
};

/// Area-weighted uniform surface samples with flat triangle normals.
/// Throws DataError("empty mesh") when the mesh has no triangles.
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

struct BoundingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;

  double diameter() const { return 2.0 * radius; }
};

/// Approximate minimal enclosing sphere of the mesh vertices.
BoundingSphere bounding_sphere(const TriangleMesh& mesh);
BoundingSphere bounding_sphere(std::span<const Vec3> points);

// Primitive builders, centered at the origin.
TriangleMesh make_box(const Vec3& extents);
TriangleMesh make_icosphere(double radius, int subdivisions);
TriangleMesh make_cylinder(double radius, double height, int segments);
/// Axis-aligned rectangle in the z = 0 plane with normal +z.
TriangleMesh make_quad(double size_x, double size_y);

}  // namespace binpick
