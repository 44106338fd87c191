#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

using namespace binpick;
using namespace binpick::test;

namespace {

/// Camera at the world origin looking along +z.
CameraModel origin_camera() {
  CameraModel c;
  c.pose = Pose::identity();
  c.near_plane = 0.5;
  c.far_plane = 5.0;
  return c;
}

ObjectCatalog plate_catalog(double size = 1.0) {
  ObjectCatalog cat;
  cat.add(ObjectModel::build("plate", make_quad(size, size), SymmetryClass::none(), 1, 200));
  return cat;
}

std::size_t count(const MaskImage& m, std::uint16_t v) {
  return static_cast<std::size_t>(std::count(m.data.begin(), m.data.end(), v));
}

}  // namespace

TEST_CASE("unit square at depth 2") {
  DepthRenderer r(origin_camera());
  r.draw(make_quad(1, 1).transformed(Pose::from_translation({0, 0, 2})), 7);
  const RenderResult& out = r.result();
  // Projects to u, v in [39, 89): 50 x 50 pixel centers.
  CHECK(count(out.mask, 7) == 2500);
  for (int row = 0; row < out.depth.height; ++row) {
    for (int col = 0; col < out.depth.width; ++col) {
      const bool inside = col >= 39 && col < 89 && row >= 39 && row < 89;
      CHECK((out.mask.at(col, row) == 7) == inside);
      if (inside) CHECK(out.depth.at(col, row) == 2.0f);
      else CHECK(std::isinf(out.depth.at(col, row)));
    }
  }
}

TEST_CASE("nearer triangle wins, equal depth keeps the first") {
  DepthRenderer r(origin_camera());
  r.draw(make_quad(1, 1).transformed(Pose::from_translation({0, 0, 2})), 1);
  r.draw(make_quad(1, 1).transformed(Pose::from_translation({0.5, 0, 1.5})), 2);
  r.draw(make_quad(1, 1).transformed(Pose::from_translation({0, 0, 2})), 3);
  const RenderResult& out = r.result();
  CHECK(count(out.mask, 3) == 0);
  CHECK(out.mask.at(45, 64) == 1);
  CHECK(out.depth.at(45, 64) == 2.0f);
  CHECK(out.mask.at(80, 64) == 2);
  CHECK(out.depth.at(80, 64) == 1.5f);
}

TEST_CASE("fragments outside near/far are dropped and near clipping keeps the rest") {
  DepthRenderer far(origin_camera());
  far.draw(make_quad(1, 1).transformed(Pose::from_translation({0, 0, 6})), 1);
  CHECK(count(far.result().mask, 1) == 0);

  // A plate tilted through the near plane renders only its far part.
  DepthRenderer tilted(origin_camera());
  tilted.draw(make_quad(4, 4).transformed(Pose(rot_x(1.2), Vec3(0, 0, 1.0))), 1);
  const RenderResult& out = tilted.result();
  CHECK(count(out.mask, 1) > 0);
  for (std::size_t i = 0; i < out.depth.data.size(); ++i) {
    if (out.mask.data[i]) {
      CHECK(out.depth.data[i] >= 0.5f);
      CHECK(out.depth.data[i] <= 5.0f);
    }
  }
}

TEST_CASE("sphere depth agrees with analytic ray casting") {
  const double radius = 0.3;
  const Vec3 center(0.05, -0.1, 2.0);
  const CameraModel cam = origin_camera();
  DepthRenderer r(cam);
  r.draw(make_icosphere(radius, 4).transformed(Pose::from_translation(center)), 1);
  const RenderResult& out = r.result();
  int checked = 0;
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      // Ray through the pixel center with unit z component.
      const Vec3 d = cam.back_project(col + 0.5, row + 0.5, 1.0);
      const double a = d.squaredNorm(), b = -2 * d.dot(center), c = center.squaredNorm() - radius * radius;
      const double disc = b * b - 4 * a * c;
      if (disc < 0) {
        CHECK(out.mask.at(col, row) == 0);
        continue;
      }
      const double t = (-b - std::sqrt(disc)) / (2 * a);
      // Inner region only; the silhouette differs by the tessellation.
      const Vec3 hit = t * d;
      if ((hit - center).normalized().dot(-d.normalized()) < 0.5) continue;
      REQUIRE(out.mask.at(col, row) == 1);
      // Facets lie inside the sphere, so rendered depth is never nearer.
      CHECK(out.depth.at(col, row) >= static_cast<float>(t) - 1e-6f);
      CHECK(out.depth.at(col, row) <= t + 2e-3 * radius / 0.5);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("visibility: alone, fully hidden and half covered") {
  const CameraModel cam = origin_camera();
  const ObjectCatalog cat = plate_catalog();
  SceneSample s;
  s.camera = cam;
  s.instances.push_back({0, "plate", Pose::from_translation({0, 0, 2}), 0.0});
  CHECK(compute_visibility(s, cam, cat, 0) == 1.0);

  // Right half (u >= 64) of the first plate hidden behind a nearer plate.
  s.instances.push_back({1, "plate", Pose::from_translation({0.5, 0, 1.5}), 0.0});
  CHECK(compute_visibility(s, cam, cat, 0) == 0.5);
  CHECK(compute_visibility(s, cam, cat, 1) == 1.0);

  s.instances.push_back({2, "plate", Pose::from_translation({0, 0, 3}), 0.0});
  CHECK(compute_visibility(s, cam, cat, 2) == 0.0);

  // Outside the view entirely.
  s.instances.push_back({3, "plate", Pose::from_translation({50, 0, 2}), 0.0});
  CHECK(compute_visibility(s, cam, cat, 3) == 0.0);

  render_scene(s, cat);
  CHECK(s.instances[0].visibility == 0.5);
  CHECK(s.instances[2].visibility == 0.0);
  CHECK(count(s.mask, 1) == 1250);
}

TEST_CASE("compositing single-instance renders reproduces the scene render") {
  ObjectCatalog cat;
  cat.add(bar_model());
  const SceneSample base = generate_scene(cat.at("bar"), BinSpec{}, 10, 17);
  SceneSample s = base;
  s.bin.reset();
  const RenderResult full = render_depth(s, s.camera, cat);
  RenderResult acc = render_instance(s.instances[0], s.camera, cat);
  for (std::size_t i = 1; i < s.instances.size(); ++i) acc = composite(acc, render_instance(s.instances[i], s.camera, cat));
  CHECK(acc.depth == full.depth);
  CHECK(acc.mask == full.mask);

  RenderResult small;
  small.depth = DepthImage(2, 2, 0.0f);
  small.mask = MaskImage(2, 2, 0);
  CHECK_THROWS_AS(composite(full, small), DataError);
}

TEST_CASE("rendered scene: mask and depth agree, visibilities in range") {
  ObjectCatalog cat;
  cat.add(bar_model());
  SceneSample s = generate_scene(cat.at("bar"), BinSpec{}, 8, 4);
  render_scene(s, cat);
  REQUIRE(s.depth.width == s.camera.width);
  std::size_t bin_pixels = 0;
  for (std::size_t i = 0; i < s.depth.data.size(); ++i) {
    if (s.mask.data[i] > 0) {
      CHECK(std::isfinite(s.depth.data[i]));
      CHECK(s.mask.data[i] <= s.instances.size());
    } else if (std::isfinite(s.depth.data[i])) {
      ++bin_pixels;
    }
  }
  CHECK(bin_pixels > 0);
  for (const auto& inst : s.instances) {
    CHECK(inst.visibility >= 0.0);
    CHECK(inst.visibility <= 1.0);
    CHECK(inst.visibility == compute_visibility(s, s.mask, s.camera, cat, inst.id));
  }
  // The top instance of the pile is the least occluded.
  const auto top = std::max_element(s.instances.begin(), s.instances.end(), [&](const auto& a, const auto& b) {
    return sphere_center(a, cat.at("bar")).z() < sphere_center(b, cat.at("bar")).z();
  });
  CHECK(top->visibility > 0.5);
}
