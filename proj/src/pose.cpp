#include "binpick/pose.hpp"

#include <cmath>
#include <numbers>

namespace binpick {

Pose::Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}

Pose::Pose(const Mat3& r, const Vec3& t) : rotation(Quat(r).normalized()), translation(t) {}

Pose Pose::inverse() const {
  const Quat qi = rotation.conjugate();
  return {qi, -(qi * translation)};
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Quat rot_x(double angle) { return Quat(Eigen::AngleAxisd(angle, Vec3::UnitX())); }
Quat rot_y(double angle) { return Quat(Eigen::AngleAxisd(angle, Vec3::UnitY())); }
Quat rot_z(double angle) { return Quat(Eigen::AngleAxisd(angle, Vec3::UnitZ())); }

double rotation_angle(const Quat& a, const Quat& b) {
  const Quat d = a.conjugate() * b;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Quat random_rotation(Rng& rng) {
  // Shoemake's subgroup algorithm.
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng) * 2.0 * std::numbers::pi;
  const double u3 = uniform01(rng) * 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Quat(a * std::cos(u2), a * std::sin(u2), b * std::sin(u3), b * std::cos(u3)).normalized();
}

double wrap_angle(double angle, double period) {
  double w = std::fmod(angle, period);
  if (w < 0.0) w += period;
  // fmod of a tiny negative value can round back up to the period itself.
  if (w >= period) w = 0.0;
  return w;
}

EulerTriple euler_from_rotation(const Quat& r, int cyclic_order) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const Mat3 m = r.normalized().toRotationMatrix();
  const double sin2 = std::hypot(m(2, 0), m(2, 1));
  EulerTriple e;
  e.phi2 = std::atan2(sin2, m(2, 2));
  if (sin2 < 1e-7) {
    e.phi1 = 0.0;
    if (m(2, 2) > 0.0) {
      // R = Rz(phi3)
      e.phi3 = std::atan2(m(1, 0), m(0, 0));
    } else {
      // R = Ry(π) · Rz(phi3) = Rz(-phi3) · Ry(π)
      e.phi3 = std::atan2(m(0, 1), m(1, 1));
    }
  } else {
    e.phi1 = std::atan2(m(1, 2), m(0, 2));
    e.phi3 = std::atan2(m(2, 1), -m(2, 0));
  }
  e.phi1 = wrap_angle(e.phi1, kTwoPi);
  e.phi2 = wrap_angle(e.phi2, kTwoPi);
  e.phi3 = wrap_angle(e.phi3, kTwoPi / std::max(cyclic_order, 1));
  return e;
}

Quat rotation_from_euler(const EulerTriple& e) {
  return (rot_z(e.phi1) * rot_y(e.phi2) * rot_z(e.phi3)).normalized();
}

}  // namespace binpick
