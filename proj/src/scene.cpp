#include "binpick/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binpick/error.hpp"

namespace binpick {

void BinSpec::validate() const {
  if (!(size_x > 0 && size_y > 0 && wall_height > 0 && wall_thickness > 0)) {
    throw DataError("bin extents must be positive");
  }
}

TriangleMesh BinSpec::mesh() const {
  const double ox = size_x / 2 + wall_thickness;
  const double oy = size_y / 2 + wall_thickness;
  // Floor slab top at z = 0.
  TriangleMesh m = make_box({2 * ox, 2 * oy, wall_thickness}).transformed(
      Pose::from_translation({0, 0, -wall_thickness / 2}));
  auto wall = [&](const Vec3& extents, const Vec3& center) {
    m = m.merged(make_box(extents).transformed(Pose::from_translation(center)));
  };
  const double zc = wall_height / 2;
  wall({wall_thickness, 2 * oy, wall_height}, {size_x / 2 + wall_thickness / 2, 0, zc});
  wall({wall_thickness, 2 * oy, wall_height}, {-(size_x / 2 + wall_thickness / 2), 0, zc});
  wall({size_x, wall_thickness, wall_height}, {0, size_y / 2 + wall_thickness / 2, zc});
  wall({size_x, wall_thickness, wall_height}, {0, -(size_y / 2 + wall_thickness / 2), zc});
  return m;
}

std::vector<Vec3> BinSpec::surface_points(double spacing) const {
  std::vector<Vec3> pts;
  const double hx = size_x / 2, hy = size_y / 2;
  const int nx = std::max(1, static_cast<int>(std::ceil(size_x / spacing)));
  const int ny = std::max(1, static_cast<int>(std::ceil(size_y / spacing)));
  const int nz = std::max(1, static_cast<int>(std::ceil(wall_height / spacing)));
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) pts.emplace_back(-hx + size_x * i / nx, -hy + size_y * j / ny, 0.0);
  }
  for (int k = 1; k <= nz; ++k) {
    const double z = wall_height * k / nz;
    for (int i = 0; i <= nx; ++i) {
      const double x = -hx + size_x * i / nx;
      pts.emplace_back(x, -hy, z);
      pts.emplace_back(x, hy, z);
    }
    for (int j = 1; j < ny; ++j) {
      const double y = -hy + size_y * j / ny;
      pts.emplace_back(-hx, y, z);
      pts.emplace_back(hx, y, z);
    }
  }
  // Rim: outer edge of the wall tops.
  const int nt = std::max(1, static_cast<int>(std::ceil(wall_thickness / spacing)));
  for (int t = 1; t <= nt; ++t) {
    const double off = wall_thickness * t / nt;
    for (int i = 0; i <= nx; ++i) {
      const double x = -hx + size_x * i / nx;
      pts.emplace_back(x, -hy - off, wall_height);
      pts.emplace_back(x, hy + off, wall_height);
    }
    for (int j = 0; j <= ny; ++j) {
      const double y = -hy + size_y * j / ny;
      pts.emplace_back(-hx - off, y, wall_height);
      pts.emplace_back(hx + off, y, wall_height);
    }
  }
  return pts;
}

void CameraModel::validate() const {
  if (!(near_plane > 0 && near_plane < far_plane)) throw DataError("camera needs 0 < near < far");
  if (width < 1 || height < 1) throw DataError("camera image size must be >= 1");
  if (!(fx > 0 && fy > 0)) throw DataError("camera focal lengths must be positive");
}

CameraModel CameraModel::top_down(const BinSpec& bin, int width, int height, double distance) {
  CameraModel c;
  c.width = width;
  c.height = height;
  c.cx = width / 2.0;
  c.cy = height / 2.0;
  const double half = std::max(bin.size_x, bin.size_y) / 2 + bin.wall_thickness;
  // Bin outline fills ~90 % of the shorter image side at rim depth.
  c.fx = c.fy = 0.9 * 0.5 * std::min(width, height) * (distance - bin.wall_height) / half;
  c.near_plane = std::max(distance - bin.wall_height - 0.2, 1e-3);
  c.far_plane = distance + 0.2;
  c.pose = Pose(rot_x(std::numbers::pi), Vec3(0.0, 0.0, distance));
  return c;
}

const SceneInstance& SceneSample::instance(int inst_id) const {
  for (const auto& i : instances) {
    if (i.id == inst_id) return i;
  }
  throw DataError("unknown instance id " + std::to_string(inst_id));
}

void ObjectCatalog::add(ObjectModel model) {
  const std::string key = model.id;
  models_[key] = std::make_shared<const ObjectModel>(std::move(model));
}

const ObjectModel& ObjectCatalog::at(const std::string& id) const {
  const auto it = models_.find(id);
  if (it == models_.end()) throw DataError("unknown object id: " + id);
  return *it->second;
}

Vec3 sphere_center(const SceneInstance& inst, const ObjectModel& obj) { return apply(inst.pose, obj.sphere.center); }

SceneSample generate_scene(const ObjectModel& obj, const BinSpec& bin, int drop_count, std::uint64_t seed,
                           const std::optional<CameraModel>& camera, const SceneGenParams& params) {
  if (drop_count < 0) throw DataError("drop count must be >= 0");
  bin.validate();
  SceneSample scene;
  scene.bin = bin;
  scene.camera = camera.value_or(CameraModel::top_down(bin));
  scene.camera.validate();

  const double r = obj.sphere.radius;
  Rng rng(seed);
  std::vector<Vec3> centers;
  for (int n = 0; n < drop_count; ++n) {
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts && !placed; ++attempt) {
      const Quat q = random_rotation(rng);
      const double x = uniform(rng, -bin.size_x / 2, bin.size_x / 2);
      const double y = uniform(rng, -bin.size_y / 2, bin.size_y / 2);
      if (std::abs(x) + r > bin.size_x / 2 || std::abs(y) + r > bin.size_y / 2) continue;
      double z = r;
      for (const Vec3& c : centers) {
        const double dxy = std::hypot(c.x() - x, c.y() - y);
        if (dxy < 2 * r) z = std::max(z, c.z() + std::sqrt(4 * r * r - dxy * dxy));
      }
      if (z > bin.wall_height) continue;
      const Vec3 center(x, y, z);
      SceneInstance inst;
      inst.id = n;
      inst.object = obj.id;
      inst.pose = Pose(q, center - q * obj.sphere.center);
      scene.instances.push_back(inst);
      centers.push_back(center);
      placed = true;
    }
    if (!placed) throw DataError("bin full");
  }
  return scene;
}

}  // namespace binpick
