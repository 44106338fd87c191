#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "binpick/random.hpp"

namespace binpick {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform in SE(3): x -> R x + t, with R stored as a unit quaternion.
///
/// Rotations are renormalized on construction and after composition, so the
/// quaternion norm stays within 1e-9 of one no matter how long a chain of
/// compositions gets.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Quat& q, const Vec3& t);
  Pose(const Mat3& r, const Vec3& t);

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Quat::Identity(), t}; }
  static Pose from_rotation(const Quat& q) { return {q, Vec3::Zero()}; }

  Mat3 matrix() const { return rotation.toRotationMatrix(); }
  Pose inverse() const;

  bool operator==(const Pose& o) const {
    return rotation.coeffs() == o.rotation.coeffs() && translation == o.translation;
  }
};

/// a ∘ b: applies b first, then a.
Pose compose(const Pose& a, const Pose& b);
inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

inline Vec3 apply(const Pose& p, const Vec3& x) { return p.rotation * x + p.translation; }

Quat rot_x(double angle);
Quat rot_y(double angle);
Quat rot_z(double angle);

/// Geodesic angle in [0, π] between two rotations.
double rotation_angle(const Quat& a, const Quat& b);

/// Uniformly distributed rotation on SO(3).
Quat random_rotation(Rng& rng);

/// Wraps an angle into [0, period).
double wrap_angle(double angle, double period);

/// Intrinsic Z–Y–Z Euler angles: R = Rz(phi1) · Ry(phi2) · Rz(phi3).
///
/// phi3 turns about the final body z axis, which is the object's symmetry
/// axis, so it is reduced modulo 2π/k for an object with k-fold cyclic
/// symmetry (k = 1 when there is none).
struct EulerTriple {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
};

/// Canonical Euler triple for `r` with phi2 in [0, π]. When |sin phi2| < 1e-7
/// the decomposition is degenerate: phi1 is set to 0 and the whole azimuth is
/// carried by phi3 before the wrap into [0, 2π/k).
EulerTriple euler_from_rotation(const Quat& r, int cyclic_order = 1);
Quat rotation_from_euler(const EulerTriple& e);

}  // namespace binpick
