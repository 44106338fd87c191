#pragma once

#include <string>
#include <vector>

#include "binpick/mesh.hpp"
#include "binpick/symmetry.hpp"

namespace binpick {

/// A rigid part: mesh, declared symmetry, enclosing sphere and a seeded
/// surface sample cloud shared by collision checks and pose distances.
struct ObjectModel {
  std::string id;
  TriangleMesh mesh;
  SymmetryClass symmetry;
  BoundingSphere sphere;
  std::vector<SurfaceSample> samples;
  bool hook_capable = false;

  static constexpr std::size_t kDefaultSampleCount = 2000;

  static ObjectModel build(std::string id, TriangleMesh mesh, SymmetryClass symmetry, std::uint64_t seed,
                           std::size_t sample_count = kDefaultSampleCount, bool hook_capable = false);

  std::vector<Vec3> sample_points() const;
  PoseDistanceContext distance_context() const;
};

}  // namespace binpick
