#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "binpick/object_model.hpp"

namespace binpick {

/// Open-top box resting on the z = 0 floor, centered on the world origin.
struct BinSpec {
  double size_x = 0.4;  ///< inner extent (m)
  double size_y = 0.3;
  double wall_height = 0.15;
  double wall_thickness = 0.01;

  void validate() const;
  TriangleMesh mesh() const;
  /// Floor and inner wall/rim surface points on a regular grid.
  std::vector<Vec3> surface_points(double spacing = 0.005) const;
};

/// Pinhole camera; the camera frame is x right, y down, z forward.
struct CameraModel {
  double fx = 100.0, fy = 100.0, cx = 64.0, cy = 64.0;
  int width = 128, height = 128;
  double near_plane = 0.1, far_plane = 2.0;
  Pose pose;  ///< world ← camera

  void validate() const;

  /// Pixel coordinates (u right, v down) of a camera-frame point with z > 0.
  Eigen::Vector2d project(const Vec3& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }
  /// Camera-frame point at z-depth `depth` on the ray through (u, v).
  Vec3 back_project(double u, double v, double depth) const {
    return {(u - cx) * depth / fx, (v - cy) * depth / fy, depth};
  }

  /// Camera looking straight down at the bin from `distance` above the
  /// floor, framing the bin, with near/far 0.2 m outside the bin's depth range.
  static CameraModel top_down(const BinSpec& bin, int width = 128, int height = 128, double distance = 1.0);
};

struct SceneInstance {
  int id = 0;
  std::string object;
  Pose pose;  ///< world ← object
  double visibility = 0.0;
};

template <class T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, T fill) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  T& at(int col, int row) { return data[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int col, int row) const { return data[static_cast<std::size_t>(row) * width + col]; }
  bool empty() const { return data.empty(); }
  bool operator==(const Raster&) const = default;
};

/// Depth in meters along the camera z axis; +inf marks background.
using DepthImage = Raster<float>;
/// Instance id + 1 per pixel; 0 marks background (including the bin).
using MaskImage = Raster<std::uint16_t>;

struct SceneSample {
  int id = 0;
  std::optional<BinSpec> bin;
  CameraModel camera;
  std::vector<SceneInstance> instances;
  DepthImage depth;
  MaskImage mask;

  const SceneInstance& instance(int id) const;
};

/// Object models by id, shared read-only between scenes.
class ObjectCatalog {
 public:
  void add(ObjectModel model);
  const ObjectModel& at(const std::string& id) const;
  bool contains(const std::string& id) const { return models_.count(id) != 0; }

 private:
  std::map<std::string, std::shared_ptr<const ObjectModel>, std::less<>> models_;
};

struct SceneGenParams {
  int max_attempts = 1000;
};

/// Drops `drop_count` copies of `obj` into the bin one after another.
///
/// Each drop picks a uniform (x, y) and a uniform rotation, then lowers the
/// object's bounding sphere until it touches the floor or an already placed
/// sphere. Drops overlapping a wall or settling with the sphere center above
/// the rim are retried; more than `max_attempts` retries throws "bin full".
/// The returned scene has no rasters and zero visibilities.
SceneSample generate_scene(const ObjectModel& obj, const BinSpec& bin, int drop_count, std::uint64_t seed,
                           const std::optional<CameraModel>& camera = std::nullopt, const SceneGenParams& params = {});

/// World-frame center of an instance's bounding sphere.
Vec3 sphere_center(const SceneInstance& inst, const ObjectModel& obj);

}  // namespace binpick
