#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "binpick/error.hpp"
#include "binpick/tensor.hpp"

namespace binpick {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr float kBelowOne = 0x1.fffffep-1f;  // largest float below 1

/// Casts into the open interval (0, 1).
float open_unit(double x) {
  const auto f = static_cast<float>(x);
  if (f <= 0.0f) return 1e-7f;
  if (f >= 1.0f) return static_cast<float>(1.0 - 1e-7);
  return f;
}

/// Casts into [0, 1).
float half_open_unit(double x) {
  const auto f = static_cast<float>(std::max(x, 0.0));
  return f >= 1.0f ? kBelowOne : f;
}

double angle_range(const GridSpec& g, int which) {
  return which < 2 ? kTwoPi : kTwoPi / g.symmetry.euler_order();
}

/// Writes the canonical Euler angles of a camera-frame rotation into a cell.
void write_angles(std::span<float> cell, const GridSpec& g, const Quat& r_cam) {
  const Pose canon = canonicalize_pose(Pose(r_cam, Vec3::Zero()), g.symmetry);
  const EulerTriple e = euler_from_rotation(canon.rotation, g.symmetry.euler_order());
  const double angles[3] = {e.phi1, e.phi2, e.phi3};
  for (int a = 0; a < g.angle_channels(); ++a) {
    cell[GridSpec::kPhi1 + a] = half_open_unit(angles[a] / angle_range(g, a));
  }
}

Quat read_angles(std::span<const float> cell, const GridSpec& g) {
  EulerTriple e;
  e.phi1 = cell[GridSpec::kPhi1] * angle_range(g, 0);
  e.phi2 = cell[GridSpec::kPhi2] * angle_range(g, 1);
  e.phi3 = g.has_phi3() ? cell[GridSpec::kPhi3] * angle_range(g, 2) : 0.0;
  return rotation_from_euler(e);
}

struct Candidate {
  const SceneInstance* inst = nullptr;
  Pose pose_cam;
  double u = 0.0, v = 0.0, depth = 0.0;
};

bool wins(const Candidate& a, const Candidate& b) {
  if (a.inst->visibility != b.inst->visibility) return a.inst->visibility > b.inst->visibility;
  return a.inst->id < b.inst->id;
}

}  // namespace

void GridSpec::validate() const {
  if (cells < 1) throw DataError("grid needs at least one cell per side");
  if (grasp_count < 1) throw DataError("grid needs at least one grasp channel");
  if (camera.width <= 0 || camera.height <= 0) throw DataError("grid camera has an empty image");
  if (camera.width % cells != 0 || camera.height % cells != 0) {
    std::ostringstream os;
    os << "grid size " << cells << " does not divide image " << camera.width << "x" << camera.height;
    throw DataError(os.str());
  }
}

bool GridSpec::operator==(const GridSpec& o) const {
  const auto& a = camera;
  const auto& b = o.camera;
  return cells == o.cells && grasp_count == o.grasp_count && symmetry == o.symmetry && a.fx == b.fx &&
         a.fy == b.fy && a.cx == b.cx && a.cy == b.cy && a.width == b.width && a.height == b.height &&
         a.near_plane == b.near_plane && a.far_plane == b.far_plane && a.pose == b.pose;
}

GroundTruthTensor::GroundTruthTensor(GridSpec grid) : grid_(std::move(grid)) {
  grid_.validate();
  values_.assign(static_cast<std::size_t>(cell_count()) * grid_.channels(), 0.0f);
}

GroundTruthTensor::GroundTruthTensor(GridSpec grid, std::vector<float> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != static_cast<std::size_t>(cell_count()) * grid_.channels()) {
    throw DataError("tensor payload does not match its grid");
  }
}

std::span<float> GroundTruthTensor::cell(int index) {
  const auto c = static_cast<std::size_t>(grid_.channels());
  return std::span<float>(values_).subspan(static_cast<std::size_t>(index) * c, c);
}

std::span<const float> GroundTruthTensor::cell(int index) const {
  const auto c = static_cast<std::size_t>(grid_.channels());
  return std::span<const float>(values_).subspan(static_cast<std::size_t>(index) * c, c);
}

float& GroundTruthTensor::at(int row, int col, int channel) { return cell(row * grid_.cells + col)[channel]; }

float GroundTruthTensor::at(int row, int col, int channel) const { return cell(row * grid_.cells + col)[channel]; }

void GroundTruthTensor::check_invariants() const {
  for (int i = 0; i < cell_count(); ++i) {
    const auto c = cell(i);
    for (int ch = 0; ch < grid_.channels(); ++ch) {
      if (!(c[ch] >= 0.0f && c[ch] <= 1.0f)) {
        std::ostringstream os;
        os << "tensor value out of [0, 1] at cell " << i << " channel " << ch << ": " << c[ch];
        throw InvariantViolation(os.str());
      }
      if (c[GridSpec::kP] == 0.0f && c[ch] != 0.0f) {
        std::ostringstream os;
        os << "empty cell " << i << " has nonzero channel " << ch;
        throw InvariantViolation(os.str());
      }
    }
  }
}

GroundTruthTensor encode_ground_truth(const SceneSample& scene, const LabelMap& labels, const GridSpec& grid) {
  GroundTruthTensor t(grid);
  const CameraModel& cam = grid.camera;
  const Pose cam_from_world = cam.pose.inverse();
  const int s = grid.cells;
  const double cw = grid.cell_width();
  const double ch = grid.cell_height();

  std::vector<std::optional<Candidate>> chosen(static_cast<std::size_t>(s) * s);
  for (const SceneInstance& inst : scene.instances) {
    Candidate c;
    c.inst = &inst;
    c.pose_cam = cam_from_world * inst.pose;
    c.depth = c.pose_cam.translation.z();
    if (!(c.depth >= cam.near_plane && c.depth <= cam.far_plane)) continue;
    const Eigen::Vector2d px = cam.project(c.pose_cam.translation);
    c.u = px.x();
    c.v = px.y();
    if (!(c.u >= 0.0 && c.u < cam.width && c.v >= 0.0 && c.v < cam.height)) continue;

    const auto it = labels.find(inst.id);
    if (it == labels.end()) throw DataError("instance " + std::to_string(inst.id) + " has no labels");
    if (static_cast<int>(it->second.success.size()) != grid.grasp_count) {
      throw DataError("instance " + std::to_string(inst.id) + " has " + std::to_string(it->second.success.size()) +
                      " success flags, grid expects " + std::to_string(grid.grasp_count));
    }

    const int row = std::min(static_cast<int>(std::floor(c.v / ch)), s - 1);
    const int col = std::min(static_cast<int>(std::floor(c.u / cw)), s - 1);
    auto& slot = chosen[static_cast<std::size_t>(row) * s + col];
    if (!slot || wins(c, *slot)) slot = c;
  }

  for (int row = 0; row < s; ++row) {
    for (int col = 0; col < s; ++col) {
      const auto& slot = chosen[static_cast<std::size_t>(row) * s + col];
      if (!slot) continue;
      const InstanceLabels& lab = labels.at(slot->inst->id);
      auto cell = t.cell(row * s + col);
      cell[GridSpec::kP] = 1.0f;
      cell[GridSpec::kV] = static_cast<float>(std::clamp(slot->inst->visibility, 0.0, 1.0));
      cell[GridSpec::kX] = open_unit(slot->u / cw - col);
      cell[GridSpec::kY] = open_unit(slot->v / ch - row);
      cell[GridSpec::kZ] = half_open_unit((slot->depth - cam.near_plane) / (cam.far_plane - cam.near_plane));
      write_angles(cell, grid, slot->pose_cam.rotation);
      cell[grid.ga()] = static_cast<float>(lab.graspability.accessibility);
      cell[grid.gu()] = static_cast<float>(lab.graspability.unrest);
      cell[grid.ge()] = static_cast<float>(lab.graspability.entanglement);
      for (int j = 0; j < grid.grasp_count; ++j) cell[grid.success(j)] = lab.success[j] ? 1.0f : 0.0f;
    }
  }
  return t;
}

std::vector<ObjectEstimate> decode_tensor(const GroundTruthTensor& t, double threshold) {
  const GridSpec& g = t.grid();
  const CameraModel& cam = g.camera;
  const double cw = g.cell_width();
  const double ch = g.cell_height();
  std::vector<ObjectEstimate> out;
  for (int row = 0; row < g.cells; ++row) {
    for (int col = 0; col < g.cells; ++col) {
      const auto cell = t.cell(row * g.cells + col);
      const double p = cell[GridSpec::kP];
      if (!(p > 0.0 && p >= threshold)) continue;
      ObjectEstimate e;
      e.row = row;
      e.col = col;
      e.probability = p;
      e.visibility = cell[GridSpec::kV];
      const double u = (col + static_cast<double>(cell[GridSpec::kX])) * cw;
      const double v = (row + static_cast<double>(cell[GridSpec::kY])) * ch;
      const double depth = cam.near_plane + cell[GridSpec::kZ] * (cam.far_plane - cam.near_plane);
      e.pose = Pose(read_angles(cell, g), cam.back_project(u, v, depth));
      e.graspability = {cell[g.ga()], cell[g.gu()], cell[g.ge()]};
      e.success.assign(cell.begin() + g.success(0), cell.end());
      out.push_back(std::move(e));
    }
  }
  return out;
}

AugmentationMotion augmentation_motion(Augmentation mode) {
  AugmentationMotion m;
  if (mode.kind == Augmentation::Kind::Mirror) {
    m.left = Eigen::Vector3d(-1.0, 1.0, 1.0).asDiagonal();
    m.right = Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal();
    return m;
  }
  // Exact cosine and sine of a quarter-turn multiple.
  static constexpr int kCos[4] = {1, 0, -1, 0};
  static constexpr int kSin[4] = {0, 1, 0, -1};
  const int q = ((mode.quarter_turns % 4) + 4) % 4;
  m.left << kCos[q], -kSin[q], 0, kSin[q], kCos[q], 0, 0, 0, 1;
  return m;
}

AugmentedSample augment_sample(const DepthImage& depth, const GroundTruthTensor& tensor, Augmentation mode) {
  const GridSpec& g = tensor.grid();
  const CameraModel& cam = g.camera;
  const int q = ((mode.quarter_turns % 4) + 4) % 4;
  const bool mirror = mode.kind == Augmentation::Kind::Mirror;
  if (!mirror && q == 0) return {depth, tensor, false};

  if (mirror && !g.symmetry.mirror_plane) throw DataError("mirroring needs an object with a declared mirror plane");
  if (depth.width != cam.width || depth.height != cam.height) throw DataError("depth image does not match the grid camera");
  if (cam.cx != cam.width / 2.0 || cam.cy != cam.height / 2.0) {
    throw DataError("augmentation needs the principal point at the image center");
  }
  if (!mirror && cam.fx != cam.fy) throw DataError("rotation augmentation needs fx = fy");
  if (!mirror && q % 2 == 1 && cam.width != cam.height) throw DataError("quarter-turn augmentation needs a square image");

  const int w = depth.width;
  const int h = depth.height;
  const int s = g.cells;

  // Destination (col, row) of a source pixel or cell index pair in an n_c × n_r grid.
  auto map_index = [&](int col, int row, int n_c, int n_r) -> std::pair<int, int> {
    if (mirror) return {n_c - 1 - col, row};
    switch (q) {
      case 1: return {n_c - 1 - row, col};
      case 2: return {n_c - 1 - col, n_r - 1 - row};
      default: return {row, n_r - 1 - col};
    }
  };

  AugmentedSample out;
  out.depth = DepthImage(w, h, 0.0f);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const auto [c2, r2] = map_index(col, row, w, h);
      out.depth.at(c2, r2) = depth.at(col, row);
    }
  }

  const AugmentationMotion motion = augmentation_motion(mode);
  out.tensor = GroundTruthTensor(g);
  for (int row = 0; row < s; ++row) {
    for (int col = 0; col < s; ++col) {
      const auto src = tensor.cell(row * s + col);
      if (src[GridSpec::kP] == 0.0f) continue;
      const auto [c2, r2] = map_index(col, row, s, s);
      auto dst = out.tensor.cell(r2 * s + c2);
      std::copy(src.begin(), src.end(), dst.begin());

      const double x = src[GridSpec::kX];
      const double y = src[GridSpec::kY];
      double x2 = x, y2 = y;
      if (mirror) {
        x2 = 1.0 - x;
      } else if (q == 1) {
        x2 = 1.0 - y;
        y2 = x;
      } else if (q == 2) {
        x2 = 1.0 - x;
        y2 = 1.0 - y;
      } else {
        x2 = y;
        y2 = 1.0 - x;
      }
      dst[GridSpec::kX] = open_unit(x2);
      dst[GridSpec::kY] = open_unit(y2);

      const Mat3 r = motion.left * read_angles(src, g).toRotationMatrix() * motion.right;
      write_angles(dst, g, Quat(r));
      for (int j = 0; j < g.grasp_count; ++j) dst[g.success(j)] = 0.0f;
    }
  }
  out.grasp_labels_excluded = true;
  return out;
}

}  // namespace binpick
