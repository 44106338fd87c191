#include "binpick/object_model.hpp"

#include "binpick/error.hpp"

namespace binpick {

ObjectModel ObjectModel::build(std::string id, TriangleMesh mesh, SymmetryClass symmetry, std::uint64_t seed,
                               std::size_t sample_count, bool hook_capable) {
  if (mesh.empty()) throw DataError("empty mesh");
  ObjectModel m;
  m.id = std::move(id);
  m.sphere = bounding_sphere(mesh);
  m.samples = sample_surface(mesh, std::max(sample_count, PoseDistanceContext::kMinPoints), seed);
  m.mesh = std::move(mesh);
  m.symmetry = symmetry;
  m.hook_capable = hook_capable;
  return m;
}

std::vector<Vec3> ObjectModel::sample_points() const {
  std::vector<Vec3> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back(s.point);
  return pts;
}

PoseDistanceContext ObjectModel::distance_context() const {
  const auto pts = sample_points();
  return {pts, symmetry, sphere.diameter()};
}

}  // namespace binpick
