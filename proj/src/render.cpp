#include "binpick/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "binpick/error.hpp"

namespace binpick {
namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

double edge(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

/// Ownership of pixels lying exactly on an edge: of the two opposite
/// directed copies of a shared edge, exactly one is owned.
bool owns_edge(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double dy = b.y() - a.y();
  const double dx = b.x() - a.x();
  return dy > 0.0 || (dy == 0.0 && dx < 0.0);
}

}  // namespace

DepthRenderer::DepthRenderer(const CameraModel& cam)
    : cam_(cam), world_to_cam_(cam.pose.inverse()) {
  cam_.validate();
  out_.depth = DepthImage(cam.width, cam.height, kInf);
  out_.mask = MaskImage(cam.width, cam.height, 0);
}

void DepthRenderer::draw(const TriangleMesh& world_mesh, std::uint16_t mask_value) {
  std::vector<Vec3> cam_vertices;
  cam_vertices.reserve(world_mesh.vertices().size());
  for (const Vec3& v : world_mesh.vertices()) cam_vertices.push_back(apply(world_to_cam_, v));

  const double near = cam_.near_plane;
  for (const Triangle& t : world_mesh.triangles()) {
    const std::array<Vec3, 3> tri{cam_vertices[t[0]], cam_vertices[t[1]], cam_vertices[t[2]]};
    if (tri[0].z() >= near && tri[1].z() >= near && tri[2].z() >= near) {
      raster_triangle(tri[0], tri[1], tri[2], mask_value);
      continue;
    }
    // Sutherland–Hodgman against z = near, then fan.
    std::vector<Vec3> poly;
    for (int i = 0; i < 3; ++i) {
      const Vec3& a = tri[i];
      const Vec3& b = tri[(i + 1) % 3];
      const bool ain = a.z() >= near;
      const bool bin = b.z() >= near;
      if (ain) poly.push_back(a);
      if (ain != bin) {
        const double s = (near - a.z()) / (b.z() - a.z());
        Vec3 p = a + s * (b - a);
        p.z() = near;
        poly.push_back(p);
      }
    }
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) raster_triangle(poly[0], poly[i], poly[i + 1], mask_value);
  }
}

void DepthRenderer::raster_triangle(const Vec3& a, const Vec3& b, const Vec3& c, std::uint16_t mask_value) {
  std::array<Eigen::Vector2d, 3> s{cam_.project(a), cam_.project(b), cam_.project(c)};
  std::array<double, 3> inv_z{1.0 / a.z(), 1.0 / b.z(), 1.0 / c.z()};
  double area = edge(s[0], s[1], s[2]);
  if (area == 0.0 || !std::isfinite(area)) return;
  if (area < 0.0) {
    std::swap(s[1], s[2]);
    std::swap(inv_z[1], inv_z[2]);
    area = -area;
  }

  const double min_x = std::min({s[0].x(), s[1].x(), s[2].x()});
  const double max_x = std::max({s[0].x(), s[1].x(), s[2].x()});
  const double min_y = std::min({s[0].y(), s[1].y(), s[2].y()});
  const double max_y = std::max({s[0].y(), s[1].y(), s[2].y()});
  const int c0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
  const int c1 = std::min(cam_.width - 1, static_cast<int>(std::ceil(max_x - 0.5)));
  const int r0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  const int r1 = std::min(cam_.height - 1, static_cast<int>(std::ceil(max_y - 0.5)));

  const std::array<bool, 3> owned{owns_edge(s[1], s[2]), owns_edge(s[2], s[0]), owns_edge(s[0], s[1])};
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      const Eigen::Vector2d p(col + 0.5, row + 0.5);
      const std::array<double, 3> w{edge(s[1], s[2], p), edge(s[2], s[0], p), edge(s[0], s[1], p)};
      bool in = true;
      for (int i = 0; i < 3 && in; ++i) in = w[i] > 0.0 || (w[i] == 0.0 && owned[i]);
      if (!in) continue;
      const double iz = (w[0] * inv_z[0] + w[1] * inv_z[1] + w[2] * inv_z[2]) / area;
      const double z = 1.0 / iz;
      if (!(z >= cam_.near_plane && z <= cam_.far_plane)) continue;
      const auto zf = static_cast<float>(z);
      float& cur = out_.depth.at(col, row);
      if (zf < cur) {
        cur = zf;
        out_.mask.at(col, row) = mask_value;
      }
    }
  }
}

RenderResult render_depth(const SceneSample& scene, const CameraModel& cam, const ObjectCatalog& catalog) {
  DepthRenderer r(cam);
  for (const SceneInstance& inst : scene.instances) {
    r.draw(catalog.at(inst.object).mesh.transformed(inst.pose), static_cast<std::uint16_t>(inst.id + 1));
  }
  if (scene.bin) r.draw(scene.bin->mesh(), 0);
  return r.take();
}

RenderResult render_instance(const SceneInstance& inst, const CameraModel& cam, const ObjectCatalog& catalog) {
  DepthRenderer r(cam);
  r.draw(catalog.at(inst.object).mesh.transformed(inst.pose), static_cast<std::uint16_t>(inst.id + 1));
  return r.take();
}

RenderResult composite(const RenderResult& a, const RenderResult& b) {
  if (a.depth.width != b.depth.width || a.depth.height != b.depth.height) {
    throw DataError("composite: raster size mismatch");
  }
  RenderResult out = a;
  for (std::size_t i = 0; i < out.depth.data.size(); ++i) {
    if (b.depth.data[i] < out.depth.data[i]) {
      out.depth.data[i] = b.depth.data[i];
      out.mask.data[i] = b.mask.data[i];
    }
  }
  return out;
}

double compute_visibility(const SceneSample& scene, const MaskImage& full_mask, const CameraModel& cam,
                          const ObjectCatalog& catalog, int instance_id) {
  const SceneInstance& inst = scene.instance(instance_id);
  const auto label = static_cast<std::uint16_t>(inst.id + 1);
  const RenderResult alone = render_instance(inst, cam, catalog);
  const auto covered = std::count(alone.mask.data.begin(), alone.mask.data.end(), label);
  if (covered == 0) return 0.0;
  const auto visible = std::count(full_mask.data.begin(), full_mask.data.end(), label);
  return std::clamp(static_cast<double>(visible) / static_cast<double>(covered), 0.0, 1.0);
}

double compute_visibility(const SceneSample& scene, const CameraModel& cam, const ObjectCatalog& catalog,
                          int instance_id) {
  scene.instance(instance_id);
  const RenderResult full = render_depth(scene, cam, catalog);
  return compute_visibility(scene, full.mask, cam, catalog, instance_id);
}

void render_scene(SceneSample& scene, const ObjectCatalog& catalog) {
  RenderResult full = render_depth(scene, scene.camera, catalog);
  for (SceneInstance& inst : scene.instances) {
    inst.visibility = compute_visibility(scene, full.mask, scene.camera, catalog, inst.id);
  }
  scene.depth = std::move(full.depth);
  scene.mask = std::move(full.mask);
}

}  // namespace binpick
