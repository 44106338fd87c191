#include "binpick/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "binpick/error.hpp"

namespace binpick {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angle about z minimizing the distance between `a` and `b · Rz(θ)` for a
/// z-revolution-invariant moment set.
double best_axis_angle(const Pose& a, const Pose& b, const Mat3& second_moment) {
  // With Rz-invariant moments, f(θ) = const − 2 tr(M Rz(θ)ᵀ), M = Rbᵀ Ra C.
  const Mat3 m = b.matrix().transpose() * a.matrix() * second_moment;
  const double alpha = m(0, 0) + m(1, 1);
  const double beta = m(1, 0) - m(0, 1);
  // tr(M Rz(θ)ᵀ) = α cosθ + β sinθ + m22
  if (std::abs(alpha) + std::abs(beta) == 0.0) return 0.0;
  return std::atan2(beta, alpha);
}

}  // namespace

SymmetryClass SymmetryClass::cyclic(int k) {
  if (k < 2) throw DataError("cyclic symmetry requires order >= 2");
  return {Kind::Cyclic, k, false};
}

SymmetryClass SymmetryClass::revolution(bool with_plane) {
  return {with_plane ? Kind::RevolutionWithPlane : Kind::Revolution, 1, false};
}

std::string to_string(SymmetryClass::Kind kind) {
  switch (kind) {
    case SymmetryClass::Kind::None: return "none";
    case SymmetryClass::Kind::Cyclic: return "cyclic";
    case SymmetryClass::Kind::Revolution: return "revolution";
    case SymmetryClass::Kind::RevolutionWithPlane: return "revolution_with_plane";
  }
  return "none";
}

SymmetryClass::Kind symmetry_kind_from_string(const std::string& s) {
  if (s == "none") return SymmetryClass::Kind::None;
  if (s == "cyclic") return SymmetryClass::Kind::Cyclic;
  if (s == "revolution") return SymmetryClass::Kind::Revolution;
  if (s == "revolution_with_plane") return SymmetryClass::Kind::RevolutionWithPlane;
  throw DataError("unknown symmetry kind: " + s);
}

std::vector<Pose> symmetry_representatives(const Pose& p, const SymmetryClass& s, int samples) {
  if (samples < 1) throw DataError("representative sample count must be >= 1");
  std::vector<Pose> out;
  switch (s.kind) {
    case SymmetryClass::Kind::None:
      out.push_back(p);
      break;
    case SymmetryClass::Kind::Cyclic:
      for (int j = 0; j < s.order; ++j) out.push_back(p * Pose::from_rotation(rot_z(kTwoPi * j / s.order)));
      break;
    case SymmetryClass::Kind::Revolution:
    case SymmetryClass::Kind::RevolutionWithPlane:
      for (int j = 0; j < samples; ++j) out.push_back(p * Pose::from_rotation(rot_z(kTwoPi * j / samples)));
      if (s.kind == SymmetryClass::Kind::RevolutionWithPlane) {
        const Pose flipped = p * Pose::from_rotation(rot_x(std::numbers::pi));
        for (int j = 0; j < samples; ++j) out.push_back(flipped * Pose::from_rotation(rot_z(kTwoPi * j / samples)));
      }
      break;
  }
  return out;
}

PoseDistanceContext::PoseDistanceContext(std::span<const Vec3> points, SymmetryClass symmetry, double diameter)
    : symmetry_(symmetry), diameter_(diameter) {
  if (points.size() < kMinPoints) {
    throw DataError("pose distance context needs at least " + std::to_string(kMinPoints) + " points");
  }
  if (!(diameter > 0.0)) throw DataError("pose distance context needs a positive diameter");

  Vec3 mu = Vec3::Zero();
  Mat3 c = Mat3::Zero();
  for (const Vec3& x : points) {
    mu += x;
    c += x * x.transpose();
  }
  mu /= static_cast<double>(points.size());
  c /= static_cast<double>(points.size());

  switch (symmetry_.kind) {
    case SymmetryClass::Kind::None:
      break;
    case SymmetryClass::Kind::Cyclic: {
      Vec3 mu_s = Vec3::Zero();
      Mat3 c_s = Mat3::Zero();
      for (int j = 0; j < symmetry_.order; ++j) {
        const Mat3 r = rot_z(kTwoPi * j / symmetry_.order).toRotationMatrix();
        mu_s += r * mu;
        c_s += r * c * r.transpose();
      }
      mu = mu_s / symmetry_.order;
      c = c_s / symmetry_.order;
      break;
    }
    case SymmetryClass::Kind::Revolution:
    case SymmetryClass::Kind::RevolutionWithPlane: {
      const double radial = 0.5 * (c(0, 0) + c(1, 1));
      Mat3 c_s = Mat3::Zero();
      c_s(0, 0) = radial;
      c_s(1, 1) = radial;
      c_s(2, 2) = c(2, 2);
      Vec3 mu_s(0.0, 0.0, mu.z());
      if (symmetry_.kind == SymmetryClass::Kind::RevolutionWithPlane) mu_s.z() = 0.0;
      mu = mu_s;
      c = c_s;
      break;
    }
  }
  mean_ = mu;
  second_moment_ = c;
}

double PoseDistanceContext::rms(const Pose& a, const Pose& b) const {
  // mean ||(Ra − Rb) x + dt||² expanded through the moments of x.
  const Mat3 dr = a.matrix() - b.matrix();
  const Vec3 dt = a.translation - b.translation;
  const double sq = (dr * second_moment_ * dr.transpose()).trace() + 2.0 * dt.dot(dr * mean_) + dt.squaredNorm();
  return std::sqrt(std::max(sq, 0.0));
}

double pose_distance(const Pose& a, const Pose& b, const PoseDistanceContext& ctx) {
  const SymmetryClass& s = ctx.symmetry();
  switch (s.kind) {
    case SymmetryClass::Kind::None:
      return ctx.rms(a, b);
    case SymmetryClass::Kind::Cyclic: {
      double best = std::numeric_limits<double>::infinity();
      for (const Pose& rep : symmetry_representatives(b, s)) best = std::min(best, ctx.rms(a, rep));
      return best;
    }
    case SymmetryClass::Kind::Revolution:
    case SymmetryClass::Kind::RevolutionWithPlane: {
      auto branch = [&](const Pose& base) {
        const double theta = best_axis_angle(a, base, ctx.second_moment());
        return ctx.rms(a, base * Pose::from_rotation(rot_z(theta)));
      };
      double best = branch(b);
      if (s.kind == SymmetryClass::Kind::RevolutionWithPlane) {
        best = std::min(best, branch(b * Pose::from_rotation(rot_x(std::numbers::pi))));
      }
      return best;
    }
  }
  return ctx.rms(a, b);
}

Pose canonicalize_pose(const Pose& p, const SymmetryClass& s) {
  switch (s.kind) {
    case SymmetryClass::Kind::None:
      return p;
    case SymmetryClass::Kind::Cyclic: {
      const Mat3 r = p.matrix();
      int best_j = 0;
      double best = r(2, 0);
      for (int j = 1; j < s.order; ++j) {
        const double a = kTwoPi * j / s.order;
        const double z = r(2, 0) * std::cos(a) + r(2, 1) * std::sin(a);
        if (z > best + 1e-9) {
          best = z;
          best_j = j;
        }
      }
      if (best_j == 0) return p;
      return p * Pose::from_rotation(rot_z(kTwoPi * best_j / s.order));
    }
    case SymmetryClass::Kind::Revolution:
    case SymmetryClass::Kind::RevolutionWithPlane: {
      Pose base = p;
      if (s.kind == SymmetryClass::Kind::RevolutionWithPlane && p.matrix()(2, 2) < -1e-9) {
        base = p * Pose::from_rotation(rot_x(std::numbers::pi));
      }
      const Mat3 r = base.matrix();
      // z component of the rotated x axis: A cosθ + B sinθ.
      const double a = r(2, 0);
      const double b = r(2, 1);
      if (std::hypot(a, b) < 1e-12) return base;
      const double theta = std::atan2(b, a);
      if (std::abs(theta) < 1e-12) return base;
      return base * Pose::from_rotation(rot_z(theta));
    }
  }
  return p;
}

}  // namespace binpick
