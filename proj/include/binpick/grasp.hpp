#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binpick/object_model.hpp"

namespace binpick {

/// Axis-aligned box in the gripper frame.
struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
};

/// Gripper geometry. The gripper frame has its origin at the tool center
/// point; the gripper body lies along +z, so the approach direction is −z.
/// Parallel jaws close along x.
struct GripperModel {
  enum class Kind { ParallelJaw, Suction, Magnetic };
  enum class Footprint { Cylinder, Cuboid };

  /// A collision box; fingers (side −1 / +1) translate along x with the
  /// jaw width, static parts (side 0) do not.
  struct Part {
    Box box;
    int side = 0;
  };

  Kind kind = Kind::ParallelJaw;

  // Parallel jaw.
  double opening = 0.085;    ///< maximum jaw opening (m)
  double standoff = 0.001;   ///< gap between a jaw face and its contact at pre-squeeze (m)
  std::vector<Part> parts;   ///< described at full opening

  // Suction / magnetic.
  Footprint footprint = Footprint::Cylinder;
  double footprint_radius = 0.01;
  Vec3 footprint_extents = {0.02, 0.02, 0.0};  ///< cuboid x, y (z unused)
  double footprint_height = 0.004;             ///< thickness of the contact slab (m)
  double body_height = 0.05;                   ///< height of the no-contact column above the slab (m)

  /// RG2-like parallel jaw: 85 mm opening, 10×20×40 mm fingers, a palm above.
  static GripperModel parallel_jaw(double opening = 0.085);
  static GripperModel suction_cup(double radius = 0.01);
  static GripperModel magnet(const Vec3& extents);

  bool is_parallel_jaw() const { return kind == Kind::ParallelJaw; }
  bool is_surface_gripper() const { return kind == Kind::Suction || kind == Kind::Magnetic; }

  /// Collision boxes with the jaws opened to `width` (inner faces at ±width/2).
  std::vector<Box> collision_boxes(double width) const;
  std::vector<Box> collision_boxes() const { return collision_boxes(opening); }

  /// Throws DataError when the geometry is not usable.
  void validate() const;
};

std::string to_string(GripperModel::Kind kind);
GripperModel::Kind gripper_kind_from_string(const std::string& s);

struct Grasp {
  int id = 0;
  Pose pose;           ///< gripper frame in the object frame
  double width = 0.0;  ///< jaw opening used for collision checks; 0 for surface grippers
  int pair = -1;       ///< index into GraspSet::contact_pairs (parallel jaw)
  int rotation_step = 0;
  int source_id = -1;  ///< id in the set this grasp was selected from, if any
};

struct ContactPair {
  SurfaceSample first;
  SurfaceSample second;
};

struct GraspSet {
  std::string object_id;
  GripperModel gripper;
  std::vector<Grasp> grasps;
  std::vector<ContactPair> contact_pairs;

  std::size_t size() const { return grasps.size(); }
  /// Reassigns dense ids 0..J−1 in the current order.
  void renumber();
};

struct GraspGenParams {
  std::size_t sample_count = 2000;      ///< surface samples before pairing
  double min_pair_fraction = 0.2;       ///< pair distance lower bound, fraction of opening
  double antipodal_angle_deg = 15.0;
  double rotation_step_deg = 20.0;
  std::size_t max_pairs = 250;          ///< seeded subsample of surviving pairs; 0 keeps all
  double self_clearance = 0.0;
  // Surface grippers.
  double flatness_angle_deg = 10.0;
  double suction_clearance = 0.002;     ///< radial margin of the no-contact column
  int suction_rotations = 1;            ///< orientations about the approach axis (cuboid footprints)
};

/// Antipodal point-pair grasps with 18 orientations per pair about the pair
/// axis. Throws DataError("no feasible grasps") if nothing survives.
GraspSet generate_parallel_jaw(const ObjectModel& obj, const GripperModel& g, const GraspGenParams& params,
                               std::uint64_t seed);

/// Grasps on locally flat patches for suction and magnetic grippers.
GraspSet generate_suction(const ObjectModel& obj, const GripperModel& g, const GraspGenParams& params,
                          std::uint64_t seed);

/// Dispatches on the gripper kind.
GraspSet generate_grasps(const ObjectModel& obj, const GripperModel& g, const GraspGenParams& params,
                         std::uint64_t seed);

/// True iff any point lies inside any gripper box inflated by `clearance`
/// on every side. `width` defaults to the full opening.
bool check_gripper_collision(const Pose& grasp_world, const GripperModel& g, std::span<const Vec3> points,
                             double clearance, std::optional<double> width = std::nullopt);

/// Outcome of re-checking one suction grasp against the point cloud.
struct SurfacePatchCheck {
  std::size_t must_not_violations = 0;
  bool covered = false;
  bool flat = false;

  bool ok() const { return must_not_violations == 0 && covered && flat; }
};

SurfacePatchCheck check_surface_patch(const Pose& grasp, const GripperModel& g, std::span<const SurfaceSample> cloud,
                                      const GraspGenParams& params);

}  // namespace binpick
