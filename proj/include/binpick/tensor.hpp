#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "binpick/scene.hpp"
#include "binpick/trials.hpp"

namespace binpick {

/// S×S grid over the image with a fixed per-cell channel layout:
///
///   p, v, x, y, z, φ1, φ2, [φ3], g_a, g_u, g_e, s_1 … s_J
///
/// φ3 is dropped for objects with revolution symmetry (10 + J channels).
struct GridSpec {
  int cells = 16;        ///< S
  int grasp_count = 1;   ///< J
  SymmetryClass symmetry;
  CameraModel camera;

  enum Channel : int { kP = 0, kV, kX, kY, kZ, kPhi1, kPhi2, kPhi3 };

  bool has_phi3() const { return !symmetry.continuous(); }
  int channels() const { return (has_phi3() ? 11 : 10) + grasp_count; }
  int ga() const { return has_phi3() ? 8 : 7; }
  int gu() const { return ga() + 1; }
  int ge() const { return ga() + 2; }
  int success(int j) const { return ga() + 3 + j; }
  int angle_channels() const { return has_phi3() ? 3 : 2; }

  int cell_width() const { return camera.width / cells; }
  int cell_height() const { return camera.height / cells; }

  /// Throws DataError unless S ≥ 1, J ≥ 1 and S divides both image sides.
  void validate() const;
  bool operator==(const GridSpec& o) const;
};

/// Row-major S × S × C tensor of float32 values in [0, 1].
class GroundTruthTensor {
 public:
  GroundTruthTensor() = default;
  explicit GroundTruthTensor(GridSpec grid);
  GroundTruthTensor(GridSpec grid, std::vector<float> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  int cell_count() const { return grid_.cells * grid_.cells; }
  std::span<float> cell(int index);
  std::span<const float> cell(int index) const;
  float& at(int row, int col, int channel);
  float at(int row, int col, int channel) const;

  /// Zero-vector cells where p = 0, and every value in [0, 1].
  /// Throws InvariantViolation otherwise.
  void check_invariants() const;

 private:
  GridSpec grid_;
  std::vector<float> values_;
};

struct InstanceLabels {
  GraspabilityTriple graspability;
  std::vector<std::uint8_t> success;  ///< one 0/1 flag per grasp
};

using LabelMap = std::map<int, InstanceLabels>;

/// Writes one object per cell, chosen by highest visibility (lower id on
/// ties), at the cell containing the projection of its origin. Positions are
/// stored relative to the cell and between the clipping planes; rotations as
/// canonical Z–Y–Z angles scaled into [0, 1). Instances off the image or
/// outside [near, far] are skipped. Throws DataError when an instance that
/// lands in the image has no labels or its flag count differs from J.
GroundTruthTensor encode_ground_truth(const SceneSample& scene, const LabelMap& labels, const GridSpec& grid);

struct ObjectEstimate {
  int row = 0;
  int col = 0;
  double probability = 0.0;
  double visibility = 0.0;
  Pose pose;  ///< camera ← object
  GraspabilityTriple graspability;
  std::vector<float> success;

  int cell_index(int cells) const { return row * cells + col; }
};

/// One estimate per cell with p > 0 and p ≥ threshold, in cell order.
std::vector<ObjectEstimate> decode_tensor(const GroundTruthTensor& t, double threshold);

struct Augmentation {
  enum class Kind { RotateZ, Mirror };
  Kind kind = Kind::RotateZ;
  int quarter_turns = 0;  ///< counter-clockwise in the image for RotateZ

  static Augmentation rotate(int quarter_turns) { return {Kind::RotateZ, quarter_turns}; }
  static Augmentation mirror() { return {Kind::Mirror, 0}; }
};

struct AugmentedSample {
  DepthImage depth;
  GroundTruthTensor tensor;
  bool grasp_labels_excluded = false;
};

/// Rotates the sample about the camera z axis by quarter turns, or mirrors it
/// left-right, moving cells and rewriting in-cell positions and angles so
/// decoding yields the transformed poses. Success channels are zeroed and the
/// sample flagged, except for the identity rotation which returns the input
/// unchanged. Needs a centered principal point and fx = fy (plus a square
/// image for odd turns); mirroring needs a declared mirror plane.
AugmentedSample augment_sample(const DepthImage& depth, const GroundTruthTensor& tensor, Augmentation mode);

/// The camera-frame rigid motion an augmentation applies to object poses:
/// the new pose is `left · pose · right` (right is the object-plane
/// reflection for mirroring, identity otherwise). Matrices may be improper.
struct AugmentationMotion {
  Mat3 left = Mat3::Identity();
  Mat3 right = Mat3::Identity();
};
AugmentationMotion augmentation_motion(Augmentation mode);

}  // namespace binpick
