#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "binpick/grasp.hpp"

namespace binpick {

struct GraspDistanceParams {
  double orientation_weight = 0.01;  ///< meters per radian

  /// Default weight: 0.1 × bounding-sphere radius per radian.
  static GraspDistanceParams for_object(const ObjectModel& obj) { return {0.1 * obj.sphere.radius}; }
};

/// ‖ta − tb‖ + w · geodesic angle(Ra, Rb).
double grasp_distance(const Pose& a, const Pose& b, const GraspDistanceParams& w);

using DistanceFn = std::function<double(std::size_t, std::size_t)>;

struct PamResult {
  std::vector<std::size_t> medoids;      ///< ascending item indices
  std::vector<std::size_t> assignment;   ///< per item, position in `medoids`
  double cost = 0.0;                     ///< total distance to nearest medoid
  double build_cost = 0.0;
  int swaps = 0;
};

/// Partitioning around medoids: greedy BUILD, then best-improvement SWAP
/// passes until no single swap lowers the total cost.
///
/// The best swap of each pass is found with the O(n²) per-pass evaluation
/// of Schubert & Rousseeuw (FastPAM1), which selects the same swap as the
/// classic O(k·n²) search. Ties go to the lowest (medoid, candidate) item
/// index pair. Distances are cached in a matrix when n ≤ kMatrixLimit.
PamResult pam_cluster(std::size_t n, std::size_t k, const DistanceFn& dist);

inline constexpr std::size_t kMatrixLimit = 5000;

/// Total cost of a medoid set: Σ_i min_m d(i, m).
double medoid_cost(std::size_t n, const std::vector<std::size_t>& medoids, const DistanceFn& dist);

/// Reduces a grasp set to `k` medoid grasps (all of them when k ≥ J).
/// Output ids are dense again; each grasp's `source_id` keeps its id in
/// the input set.
GraspSet cluster_grasps(const GraspSet& set, std::size_t k, const GraspDistanceParams& w);

}  // namespace binpick
