#include "binpick/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binpick/error.hpp"

namespace binpick {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool inside(const Box& b, const Vec3& p, double clearance) {
  const Vec3 d = (p - b.center).cwiseAbs();
  return d.x() <= b.half_extents.x() + clearance && d.y() <= b.half_extents.y() + clearance &&
         d.z() <= b.half_extents.z() + clearance;
}

/// Unit vector perpendicular to `u`, chosen from the least aligned world axis.
Vec3 perpendicular(const Vec3& u) {
  int axis = 0;
  for (int d = 1; d < 3; ++d) {
    if (std::abs(u[d]) < std::abs(u[axis])) axis = d;
  }
  return u.cross(Vec3::Unit(axis)).normalized();
}

/// Frame with the given z axis; x is a deterministic tangent rotated by `angle` about z.
Mat3 frame_from_z(const Vec3& z, double angle) {
  const Vec3 t0 = perpendicular(z);
  const Vec3 t1 = z.cross(t0);
  const Vec3 x = std::cos(angle) * t0 + std::sin(angle) * t1;
  Mat3 r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return r;
}

std::vector<Vec3> points_of(const std::vector<SurfaceSample>& s) {
  std::vector<Vec3> p;
  p.reserve(s.size());
  for (const auto& x : s) p.push_back(x.point);
  return p;
}

}  // namespace

GripperModel GripperModel::parallel_jaw(double opening) {
  GripperModel g;
  g.kind = Kind::ParallelJaw;
  g.opening = opening;
  const Vec3 finger_half(0.005, 0.01, 0.02);
  // Fingers reach 10 mm past the tool center point; the palm sits on top.
  const double finger_z = finger_half.z() - 0.01;
  g.parts.push_back({{{-(opening / 2 + finger_half.x()), 0.0, finger_z}, finger_half}, -1});
  g.parts.push_back({{{opening / 2 + finger_half.x(), 0.0, finger_z}, finger_half}, +1});
  const double palm_bottom = finger_z + finger_half.z();
  g.parts.push_back({{{0.0, 0.0, palm_bottom + 0.01}, {opening / 2 + 2 * finger_half.x(), 0.01, 0.01}}, 0});
  return g;
}

GripperModel GripperModel::suction_cup(double radius) {
  GripperModel g;
  g.kind = Kind::Suction;
  g.footprint = Footprint::Cylinder;
  g.footprint_radius = radius;
  g.opening = 0.0;
  return g;
}

GripperModel GripperModel::magnet(const Vec3& extents) {
  GripperModel g;
  g.kind = Kind::Magnetic;
  g.footprint = Footprint::Cuboid;
  g.footprint_extents = extents;
  g.opening = 0.0;
  return g;
}

std::vector<Box> GripperModel::collision_boxes(double width) const {
  std::vector<Box> out;
  if (kind == Kind::ParallelJaw) {
    for (const Part& p : parts) {
      Box b = p.box;
      if (p.side != 0) {
        const double inner = std::abs(b.center.x()) - b.half_extents.x();
        b.center.x() += p.side * (width / 2 - inner);
      }
      out.push_back(b);
    }
    return out;
  }
  // Surface grippers: a column above the contact slab.
  const double half_z = 0.5 * (body_height - footprint_height / 2);
  const double z = footprint_height / 2 + half_z;
  if (footprint == Footprint::Cylinder) {
    out.push_back({{0.0, 0.0, z}, {footprint_radius, footprint_radius, half_z}});
  } else {
    out.push_back({{0.0, 0.0, z}, {footprint_extents.x() / 2, footprint_extents.y() / 2, half_z}});
  }
  return out;
}

void GripperModel::validate() const {
  if (kind == Kind::ParallelJaw) {
    if (!(opening > 0.0)) throw DataError("parallel jaw gripper needs a positive opening");
    if (parts.empty()) throw DataError("parallel jaw gripper needs jaw boxes");
    for (const Part& p : parts) {
      if ((p.box.half_extents.array() <= 0.0).any()) throw DataError("gripper boxes need positive extents");
    }
  } else {
    const bool volume = footprint == Footprint::Cylinder
                            ? footprint_radius > 0.0
                            : footprint_extents.x() > 0.0 && footprint_extents.y() > 0.0;
    if (!volume || !(footprint_height > 0.0) || !(body_height > footprint_height)) {
      throw DataError("surface gripper footprint volumes must be positive");
    }
  }
}

std::string to_string(GripperModel::Kind kind) {
  switch (kind) {
    case GripperModel::Kind::ParallelJaw: return "parallel_jaw";
    case GripperModel::Kind::Suction: return "suction";
    case GripperModel::Kind::Magnetic: return "magnetic";
  }
  return "parallel_jaw";
}

GripperModel::Kind gripper_kind_from_string(const std::string& s) {
  if (s == "parallel_jaw") return GripperModel::Kind::ParallelJaw;
  if (s == "suction") return GripperModel::Kind::Suction;
  if (s == "magnetic") return GripperModel::Kind::Magnetic;
  throw DataError("unknown gripper kind: " + s);
}

void GraspSet::renumber() {
  for (std::size_t i = 0; i < grasps.size(); ++i) grasps[i].id = static_cast<int>(i);
}

bool check_gripper_collision(const Pose& grasp_world, const GripperModel& g, std::span<const Vec3> points,
                             double clearance, std::optional<double> width) {
  const std::vector<Box> boxes = g.collision_boxes(width.value_or(g.opening));
  double reach = 0.0;
  for (const Box& b : boxes) reach = std::max(reach, b.center.norm() + b.half_extents.norm());
  reach += std::sqrt(3.0) * clearance;
  const double reach_sq = reach * reach;

  const Mat3 rt = grasp_world.matrix().transpose();
  for (const Vec3& p : points) {
    const Vec3 rel = p - grasp_world.translation;
    if (rel.squaredNorm() > reach_sq) continue;
    const Vec3 local = rt * rel;
    for (const Box& b : boxes) {
      if (inside(b, local, clearance)) return true;
    }
  }
  return false;
}

GraspSet generate_parallel_jaw(const ObjectModel& obj, const GripperModel& g, const GraspGenParams& params,
                               std::uint64_t seed) {
  if (!g.is_parallel_jaw()) throw DataError("generate_parallel_jaw needs a parallel jaw gripper");
  g.validate();
  const auto pool = sample_surface(obj.mesh, params.sample_count, stream_seed(seed, "grasp-gen/samples"));
  const auto cloud = points_of(pool);

  const double cos_limit = std::cos(params.antipodal_angle_deg * kDeg);
  const double min_d = params.min_pair_fraction * g.opening;
  std::vector<ContactPair> pairs;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      const Vec3 axis = pool[j].point - pool[i].point;
      const double d = axis.norm();
      if (d >= g.opening || d < min_d) continue;
      const Vec3 u = axis / d;
      if (pool[i].normal.dot(-u) >= cos_limit && pool[j].normal.dot(u) >= cos_limit) {
        pairs.push_back({pool[i], pool[j]});
      }
    }
  }

  if (params.max_pairs > 0 && pairs.size() > params.max_pairs) {
    // Partial Fisher–Yates, then restore generation order.
    Rng rng(stream_seed(seed, "grasp-gen/pairs"));
    std::vector<std::size_t> idx(pairs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < params.max_pairs; ++i) {
      std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
    }
    idx.resize(params.max_pairs);
    std::sort(idx.begin(), idx.end());
    std::vector<ContactPair> kept;
    kept.reserve(idx.size());
    for (std::size_t i : idx) kept.push_back(pairs[i]);
    pairs = std::move(kept);
  }

  GraspSet out;
  out.object_id = obj.id;
  out.gripper = g;
  const int steps = static_cast<int>(std::lround(360.0 / params.rotation_step_deg));
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const Vec3 axis = pairs[pi].second.point - pairs[pi].first.point;
    const double d = axis.norm();
    const Vec3 x = axis / d;
    const Vec3 center = 0.5 * (pairs[pi].first.point + pairs[pi].second.point);
    const Vec3 base = perpendicular(x);
    const double width = d + 2.0 * g.standoff;
    bool any = false;
    for (int r = 0; r < steps; ++r) {
      const double a = r * params.rotation_step_deg * kDeg;
      Mat3 rot;
      const Vec3 z = std::cos(a) * base + std::sin(a) * x.cross(base);
      rot.col(0) = x;
      rot.col(1) = z.cross(x);
      rot.col(2) = z;
      const Pose pose(rot, center);
      if (check_gripper_collision(pose, g, cloud, params.self_clearance, width)) continue;
      if (!any) {
        out.contact_pairs.push_back(pairs[pi]);
        any = true;
      }
      out.grasps.push_back({0, pose, width, static_cast<int>(out.contact_pairs.size() - 1), r});
    }
  }
  if (out.grasps.empty()) throw DataError("no feasible grasps");
  out.renumber();
  return out;
}

SurfacePatchCheck check_surface_patch(const Pose& grasp, const GripperModel& g, std::span<const SurfaceSample> cloud,
                                      const GraspGenParams& params) {
  SurfacePatchCheck res;
  const Mat3 rt = grasp.matrix().transpose();
  const double slab = g.footprint_height / 2;
  const double margin = params.suction_clearance;
  auto in_footprint = [&](const Vec3& l, double pad) {
    if (g.footprint == GripperModel::Footprint::Cylinder) return std::hypot(l.x(), l.y()) <= g.footprint_radius + pad;
    return std::abs(l.x()) <= g.footprint_extents.x() / 2 + pad && std::abs(l.y()) <= g.footprint_extents.y() / 2 + pad;
  };
  // Support ring: each quadrant of the outer half of the footprint needs a contact.
  auto ring_quadrant = [&](const Vec3& l) -> int {
    double rel;
    if (g.footprint == GripperModel::Footprint::Cylinder) {
      rel = std::hypot(l.x(), l.y()) / g.footprint_radius;
    } else {
      rel = std::max(std::abs(l.x()) / (g.footprint_extents.x() / 2), std::abs(l.y()) / (g.footprint_extents.y() / 2));
    }
    if (rel < 0.5 || rel > 1.0) return -1;
    return (l.x() >= 0 ? 0 : 1) + (l.y() >= 0 ? 0 : 2);
  };

  std::array<bool, 4> quadrant{};
  Vec3 normal_sum = Vec3::Zero();
  std::vector<Vec3> normals;
  for (const SurfaceSample& s : cloud) {
    const Vec3 l = rt * (s.point - grasp.translation);
    if (l.z() > slab && l.z() <= g.body_height && in_footprint(l, margin)) {
      ++res.must_not_violations;
      continue;
    }
    if (std::abs(l.z()) <= slab && in_footprint(l, 0.0)) {
      const Vec3 n = rt * s.normal;
      normals.push_back(n);
      normal_sum += n;
      const int q = ring_quadrant(l);
      if (q >= 0) quadrant[q] = true;
    }
  }
  res.covered = std::all_of(quadrant.begin(), quadrant.end(), [](bool b) { return b; });
  if (!normals.empty() && normal_sum.norm() > 0.0) {
    const Vec3 mean = normal_sum.normalized();
    const double cos_limit = std::cos(params.flatness_angle_deg * kDeg);
    res.flat = std::all_of(normals.begin(), normals.end(), [&](const Vec3& n) { return n.dot(mean) >= cos_limit; });
  }
  return res;
}

GraspSet generate_suction(const ObjectModel& obj, const GripperModel& g, const GraspGenParams& params,
                          std::uint64_t seed) {
  if (!g.is_surface_gripper()) throw DataError("generate_suction needs a suction or magnetic gripper");
  g.validate();
  const auto pool = sample_surface(obj.mesh, params.sample_count, stream_seed(seed, "grasp-gen/samples"));
  const int rotations = g.footprint == GripperModel::Footprint::Cylinder ? 1 : std::max(params.suction_rotations, 1);

  GraspSet out;
  out.object_id = obj.id;
  out.gripper = g;
  for (const SurfaceSample& s : pool) {
    for (int r = 0; r < rotations; ++r) {
      // Cuboid footprints repeat after a half turn.
      const double a = std::numbers::pi * r / rotations;
      const Pose pose(frame_from_z(s.normal, a), s.point);
      if (!check_surface_patch(pose, g, pool, params).ok()) continue;
      out.grasps.push_back({0, pose, 0.0, -1, r});
    }
  }
  if (out.grasps.empty()) throw DataError("no feasible grasps");
  out.renumber();
  return out;
}

GraspSet generate_grasps(const ObjectModel& obj, const GripperModel& g, const GraspGenParams& params,
                         std::uint64_t seed) {
  if (g.is_parallel_jaw()) return generate_parallel_jaw(obj, g, params, seed);
  return generate_suction(obj, g, params, seed);
}

}  // namespace binpick
