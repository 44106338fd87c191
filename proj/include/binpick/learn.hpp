#pragma once

#include <optional>
#include <span>
#include <vector>

#include "binpick/tensor.hpp"

namespace binpick {

/// Weights of the multi-task loss. λ3 is not a constant: it is recomputed
/// per cell from the ground-truth graspabilities as (g_a + g_u + g_e)³.
struct LossWeights {
  double lambda1 = 0.1;  ///< object probability
  double lambda2 = 0.1;  ///< visibility
  double lambda4 = 1.0;  ///< orientation relative to position
  double lambda5 = 1.0;  ///< graspabilities
  std::optional<double> lambda6;  ///< grasp success; defaults to 1/J

  static constexpr double kEpsilon = 1e-7;  ///< BCE clamp

  double success_weight(int grasp_count) const { return lambda6 ? *lambda6 : 1.0 / grasp_count; }
  static double pose_weight(double ga, double gu, double ge) {
    const double s = ga + gu + ge;
    return s * s * s;
  }
  void validate() const;
};

/// Terms dropped for samples without the matching annotations.
struct LossMask {
  bool graspability = true;  ///< g_a, g_u, g_e
  bool grasp_success = true; ///< s_1..s_J; off for augmented or unannotated samples
};

/// Binary cross-entropy with the prediction clamped to [ε, 1 − ε].
double bce(double prediction, double target);

/// Loss of a prediction laid out like `gt` (same length, same channel
/// order). Throws DataError on a shape mismatch.
double compute_loss(std::span<const double> pred, const GroundTruthTensor& gt, const LossWeights& w = {},
                    const LossMask& mask = {});
double compute_loss(const GroundTruthTensor& pred, const GroundTruthTensor& gt, const LossWeights& w = {},
                    const LossMask& mask = {});

/// ∂L/∂pred, shaped like the tensor. Clamped predictions get zero BCE
/// gradient; non-probability channels of cells with gt p = 0 are exactly 0.
std::vector<double> loss_gradient(std::span<const double> pred, const GroundTruthTensor& gt,
                                  const LossWeights& w = {}, const LossMask& mask = {});
std::vector<double> loss_gradient(const GroundTruthTensor& pred, const GroundTruthTensor& gt,
                                  const LossWeights& w = {}, const LossMask& mask = {});

struct PolicyChoice {
  int cell = 0;
  int grasp = 0;
  double score = 0.0;

  bool operator==(const PolicyChoice&) const = default;
};

/// The grasp maximizing ŝ_j · p̂ · v̂ · ĝ_a · ĝ_u · ĝ_e over all cells and
/// grasps. Ties go to the lowest cell, then the lowest grasp.
PolicyChoice policy_select(const GroundTruthTensor& pred);

struct EvalThresholds {
  double detection = 0.5;         ///< minimum p̂ for a detection
  double pose_success = 0.1;      ///< distance threshold, fraction of the diameter
  double min_visibility = 0.5;    ///< ground truth counted by AP
  double grasp_success = 0.5;     ///< ŝ decision threshold
};

struct EvalGroundTruth {
  SceneSample scene;
  LabelMap labels;
};

struct EvalReport {
  double pose_success_rate = 0.0;
  double average_precision = 0.0;
  double grasp_precision = 0.0;
  double grasp_recall = 0.0;
  double policy_success_rate = 0.0;
  std::size_t detections = 0;
  std::size_t ground_truth = 0;  ///< instances eligible for AP
  std::size_t scenes = 0;
};

/// Precision-recall bookkeeping for one ranked detection list.
struct RankedMatch {
  double score = 0.0;
  enum class Kind { TruePositive, FalsePositive, Ignored } kind = Kind::FalsePositive;
};

/// Non-interpolated AP: the mean over ground-truth items of the precision
/// at the rank where each is retrieved (unretrieved items count 0). Items
/// must be sorted by descending score. With no ground truth the result is
/// 1 when nothing was detected and 0 otherwise.
double average_precision(std::span<const RankedMatch> ranked, std::size_t ground_truth_count);

/// Scores `preds[i]` against `gts[i]` scene by scene.
///
/// Detections (cells with p̂ ≥ detection) are ranked by p̂ and matched
/// greedily, one to one, to the closest remaining ground-truth instance in
/// the camera frame; a match counts when its pose distance is below
/// pose_success × diameter. Ground truth covers the instances whose origin
/// the grid can observe; those below min_visibility neither earn nor cost
/// AP. Grasp precision and recall compare thresholded ŝ against the encoded
/// success labels cell by cell. Policy success is the share of scenes whose
/// selected grasp is a labeled success.
EvalReport evaluate(std::span<const GroundTruthTensor> preds, std::span<const EvalGroundTruth> gts,
                    const PoseDistanceContext& ctx, const EvalThresholds& th = {});

}  // namespace binpick
