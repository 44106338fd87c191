#pragma once

#include "binpick/scene.hpp"

namespace binpick {

struct RenderResult {
  DepthImage depth;
  MaskImage mask;
};

/// z-buffer rasterizer for a pinhole camera.
///
/// Triangles are clipped against the near plane, filled with edge functions
/// under a top-left style ownership rule and shaded with perspective-correct
/// depth. Fragments outside [near, far] are dropped. At equal depth the
/// earlier layer wins: instances in id order, then the bin.
class DepthRenderer {
 public:
  explicit DepthRenderer(const CameraModel& cam);

  /// Draws a world-frame mesh; `mask_value` is written where it wins.
  void draw(const TriangleMesh& world_mesh, std::uint16_t mask_value);

  const RenderResult& result() const { return out_; }
  RenderResult take() { return std::move(out_); }

 private:
  void raster_triangle(const Vec3& a, const Vec3& b, const Vec3& c, std::uint16_t mask_value);

  CameraModel cam_;
  Pose world_to_cam_;
  RenderResult out_;
};

/// Full-scene render: all instances plus the bin (when present).
RenderResult render_depth(const SceneSample& scene, const CameraModel& cam, const ObjectCatalog& catalog);

/// Renders a single instance with nothing else in the scene.
RenderResult render_instance(const SceneInstance& inst, const CameraModel& cam, const ObjectCatalog& catalog);

/// Per-pixel minimum of two renders; ties keep `a`.
RenderResult composite(const RenderResult& a, const RenderResult& b);

/// Visible fraction of an instance: pixels it owns in the full-scene mask
/// over pixels it covers when rendered alone (0 when it covers none).
double compute_visibility(const SceneSample& scene, const CameraModel& cam, const ObjectCatalog& catalog,
                          int instance_id);

/// Same, reusing an existing full-scene mask.
double compute_visibility(const SceneSample& scene, const MaskImage& full_mask, const CameraModel& cam,
                          const ObjectCatalog& catalog, int instance_id);

/// Renders the scene into its own rasters and fills every visibility.
void render_scene(SceneSample& scene, const ObjectCatalog& catalog);

}  // namespace binpick
