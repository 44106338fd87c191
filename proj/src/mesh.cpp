#include "binpick/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "binpick/error.hpp"

namespace binpick {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles)
    : vertices_(std::move(vertices)) {
  triangles_.reserve(triangles.size());
  for (const Triangle& t : triangles) {
    for (std::uint32_t idx : t) {
      if (idx >= vertices_.size()) throw DataError("triangle index out of range");
    }
    const Vec3 cross = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
    const double area = 0.5 * cross.norm();
    if (area < kMinTriangleArea) continue;
    triangles_.push_back(t);
    normals_.push_back(cross.normalized());
    areas_.push_back(area);
  }
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

std::array<Vec3, 3> TriangleMesh::corners(std::size_t tri) const {
  const Triangle& t = triangles_[tri];
  return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

TriangleMesh TriangleMesh::transformed(const Pose& p) const {
  std::vector<Vec3> v;
  v.reserve(vertices_.size());
  for (const Vec3& x : vertices_) v.push_back(apply(p, x));
  return {std::move(v), triangles_};
}

TriangleMesh TriangleMesh::merged(const TriangleMesh& other) const {
  std::vector<Vec3> v = vertices_;
  v.insert(v.end(), other.vertices_.begin(), other.vertices_.end());
  std::vector<Triangle> t = triangles_;
  const auto offset = static_cast<std::uint32_t>(vertices_.size());
  for (Triangle tri : other.triangles_) {
    for (auto& idx : tri) idx += offset;
    t.push_back(tri);
  }
  return {std::move(v), t};
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mesh file: " + path.string());
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed vertex");
      }
      vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(std::stol(tok.substr(0, tok.find('/'))));
      if (idx.size() != 3) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": only triangular faces are supported");
      }
      Triangle t{};
      for (int k = 0; k < 3; ++k) {
        const long i = idx[k] < 0 ? static_cast<long>(vertices.size()) + idx[k] : idx[k] - 1;
        if (i < 0 || i >= static_cast<long>(vertices.size())) {
          throw DataError(path.string() + ":" + std::to_string(line_no) + ": face index out of range");
        }
        t[k] = static_cast<std::uint32_t>(i);
      }
      triangles.push_back(t);
    }
  }
  TriangleMesh mesh(std::move(vertices), triangles);
  if (mesh.empty()) throw DataError("empty mesh: " + path.string());
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write mesh file: " + path.string());
  out.precision(17);
  for (const Vec3& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Triangle& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.empty()) throw DataError("empty mesh");
  std::vector<double> cdf(mesh.areas().size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += mesh.areas()[i];
    cdf[i] = acc;
  }
  Rng rng(seed);
  std::vector<SurfaceSample> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = uniform01(rng) * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    const auto tri = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    const double r1 = std::sqrt(uniform01(rng));
    const double r2 = uniform01(rng);
    const auto [a, b, c] = mesh.corners(tri);
    const Vec3 p = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
    out.push_back({p, mesh.normals()[tri], static_cast<std::uint32_t>(tri)});
  }
  return out;
}

BoundingSphere bounding_sphere(const TriangleMesh& mesh) {
  if (mesh.vertices().empty()) throw DataError("empty mesh");
  return bounding_sphere(mesh.vertices());
}

BoundingSphere bounding_sphere(std::span<const Vec3> points) {
  if (points.empty()) throw DataError("empty mesh");

  // Ritter: seed with the most separated pair of axis-extreme points, then
  // grow the sphere over every outlier.
  std::array<std::size_t, 3> lo{}, hi{};
  for (std::size_t i = 1; i < points.size(); ++i) {
    for (int d = 0; d < 3; ++d) {
      if (points[i][d] < points[lo[d]][d]) lo[d] = i;
      if (points[i][d] > points[hi[d]][d]) hi[d] = i;
    }
  }
  int axis = 0;
  for (int d = 1; d < 3; ++d) {
    if ((points[hi[d]] - points[lo[d]]).squaredNorm() > (points[hi[axis]] - points[lo[axis]]).squaredNorm()) axis = d;
  }
  Vec3 center = 0.5 * (points[lo[axis]] + points[hi[axis]]);
  double radius = 0.5 * (points[hi[axis]] - points[lo[axis]]).norm();
  for (const Vec3& p : points) {
    const double d = (p - center).norm();
    if (d > radius) {
      const double grown = 0.5 * (radius + d);
      center += (grown - radius) / d * (p - center);
      radius = grown;
    }
  }

  // Badoiu–Clarkson refinement: after ceil(1/eps^2) steps the farthest-point
  // radius is within (1 + eps) of optimal, which bounds Ritter's overshoot.
  constexpr int kSteps = 400;  // ceil(1 / 0.05^2)
  Vec3 c = points[0];
  auto farthest = [&](const Vec3& from) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = (points[i] - from).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return std::pair{best, std::sqrt(best_d)};
  };
  for (int i = 1; i <= kSteps; ++i) {
    const auto [far, dist] = farthest(c);
    if (dist == 0.0) break;
    c += (points[far] - c) / static_cast<double>(i + 1);
  }
  const double refined = farthest(c).second;
  if (refined < radius) {
    center = c;
    radius = refined;
  }
  // Guarantee containment against rounding in the incremental updates.
  radius = std::max(radius, farthest(center).second);
  return {center, radius};
}

TriangleMesh make_box(const Vec3& e) {
  const Vec3 h = 0.5 * e;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  // Outward-facing winding.
  const std::vector<Triangle> t = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                                   {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return {std::move(v), t};
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                         {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Triangle> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto idx = static_cast<std::uint32_t>(v.size() - 1);
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> next;
    next.reserve(t.size() * 4);
    for (const Triangle& f : t) {
      const std::uint32_t a = midpoint(f[0], f[1]);
      const std::uint32_t b = midpoint(f[1], f[2]);
      const std::uint32_t c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    t = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return {std::move(v), t};
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  std::vector<Vec3> v;
  std::vector<Triangle> t;
  const double h = 0.5 * height;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), -h);
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), h);
  }
  const auto bottom = static_cast<std::uint32_t>(v.size());
  v.emplace_back(0, 0, -h);
  const auto top = static_cast<std::uint32_t>(v.size());
  v.emplace_back(0, 0, h);
  for (int i = 0; i < segments; ++i) {
    const auto b0 = static_cast<std::uint32_t>(2 * i);
    const auto t0 = b0 + 1;
    const auto b1 = static_cast<std::uint32_t>(2 * ((i + 1) % segments));
    const auto t1 = b1 + 1;
    t.push_back({b0, b1, t1});
    t.push_back({b0, t1, t0});
    t.push_back({bottom, b1, b0});
    t.push_back({top, t0, t1});
  }
  return {std::move(v), t};
}

TriangleMesh make_quad(double size_x, double size_y) {
  const double hx = 0.5 * size_x;
  const double hy = 0.5 * size_y;
  std::vector<Vec3> v = {{-hx, -hy, 0}, {hx, -hy, 0}, {hx, hy, 0}, {-hx, hy, 0}};
  return {std::move(v), {{0, 1, 2}, {0, 2, 3}}};
}

}  // namespace binpick
