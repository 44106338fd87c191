#pragma once

#include <span>
#include <string>
#include <vector>

#include "binpick/pose.hpp"

namespace binpick {

/// Proper symmetry group of an object about its body z axis.
///
/// `RevolutionWithPlane` is the continuous group plus the half-turns about
/// axes perpendicular to z (a cylinder, say). `mirror_plane` declares an
/// improper reflection symmetry across the object's xz plane; it is only
/// consulted by image mirroring augmentation.
struct SymmetryClass {
  enum class Kind { None, Cyclic, Revolution, RevolutionWithPlane };

  Kind kind = Kind::None;
  int order = 1;  ///< k for Cyclic, 1 otherwise
  bool mirror_plane = false;

  static SymmetryClass none() { return {}; }
  static SymmetryClass cyclic(int k);
  static SymmetryClass revolution(bool with_plane = false);

  bool continuous() const { return kind == Kind::Revolution || kind == Kind::RevolutionWithPlane; }
  /// Order used for the phi3 range: k for cyclic, 1 otherwise.
  int euler_order() const { return kind == Kind::Cyclic ? order : 1; }

  bool operator==(const SymmetryClass&) const = default;
};

std::string to_string(SymmetryClass::Kind kind);
SymmetryClass::Kind symmetry_kind_from_string(const std::string& s);

/// Poses equivalent to `p` under the object's symmetry. Continuous kinds are
/// discretized into `samples` axis rotations (times two for the plane flip).
std::vector<Pose> symmetry_representatives(const Pose& p, const SymmetryClass& s, int samples = 360);

/// Object data needed by pose_distance: a representative point set (object
/// frame, meters), the symmetry class and the bounding-sphere diameter.
///
/// The point set is averaged over the symmetry group on construction, and the
/// distance is evaluated exactly through its first and second moments. That
/// makes the RMS distance symmetric in its arguments and zero on every
/// representative, with continuous symmetries handled in closed form.
class PoseDistanceContext {
 public:
  static constexpr std::size_t kMinPoints = 64;

  PoseDistanceContext(std::span<const Vec3> points, SymmetryClass symmetry, double diameter);

  const SymmetryClass& symmetry() const { return symmetry_; }
  double diameter() const { return diameter_; }
  const Vec3& mean() const { return mean_; }
  const Mat3& second_moment() const { return second_moment_; }

  /// RMS point displacement between `a` and `b` for fixed representatives.
  double rms(const Pose& a, const Pose& b) const;

 private:
  SymmetryClass symmetry_;
  double diameter_;
  Vec3 mean_;
  Mat3 second_moment_;
};

/// Minimum RMS distance over symmetry representatives, in meters.
double pose_distance(const Pose& a, const Pose& b, const PoseDistanceContext& ctx);

/// Unique representative of `p` whose object x axis has the largest
/// z component in the frame `p` is expressed in (the camera frame).
///
/// Cyclic ties within 1e-9 go to the smallest rotation index. For
/// RevolutionWithPlane the branch whose symmetry axis points to +z is
/// chosen first. Idempotent bit for bit.
Pose canonicalize_pose(const Pose& p, const SymmetryClass& s);

}  // namespace binpick
