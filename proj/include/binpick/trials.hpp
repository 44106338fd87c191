#pragma once

#include <optional>
#include <span>
#include <vector>

#include "binpick/grasp.hpp"
#include "binpick/scene.hpp"

namespace binpick {

struct Displacement {
  int instance = 0;
  Vec3 delta = Vec3::Zero();  ///< position change between t0 (before grasp) and t1 (after lift), m
};

/// Outcome of executing one grasp on one instance.
///
/// Outcomes form a ladder: placed ⇒ lifted ⇒ collision_free. Unset outcomes
/// (std::nullopt) are still waiting for a physics log.
struct TrialRecord {
  int scene = 0;
  int instance = 0;
  int grasp = 0;
  bool collision_free = false;
  std::optional<bool> lifted;
  std::optional<bool> placed;
  std::optional<bool> entangled;
  bool executed = false;  ///< the grasp that was actually carried out for this instance
  std::vector<Displacement> displacements;

  /// Throws DataError when the outcome ladder or the displacement list is inconsistent.
  void validate() const;
  double total_displacement() const;
};

struct GraspabilityTriple {
  double accessibility = 0.0;  ///< g_a
  double unrest = 0.0;         ///< g_u
  double entanglement = 0.0;   ///< g_e, 0 or 1
};

struct ReachabilityParams {
  double clearance = 0.002;     ///< m
  double bin_spacing = 0.005;   ///< bin surface point spacing, m
};

/// Collision-free flag for every (instance, grasp) pair, ordered by
/// (instance id, grasp id). Obstacles are the sampled points of all other
/// instances plus the bin surfaces.
std::vector<TrialRecord> evaluate_reachability(const SceneSample& scene, const ObjectCatalog& catalog,
                                               const GraspSet& grasps, const ReachabilityParams& params = {});

/// g_a: collision-free share of the J grasps.
/// g_u: 1 − min(Σ‖displacement‖, 1) for the executed record, or for the
///      worst collision-free record when none is marked executed.
/// g_e: 0 if any record reports an entanglement, else 1.
/// Throws DataError("incomplete trial log") unless grasps 0..J−1 are all present.
GraspabilityTriple compute_graspabilities(std::span<const TrialRecord> records, int instance, int grasp_count);

/// The unrest formula on its own.
double unrest_graspability(std::span<const Displacement> displacements);

struct TrialSynthesisParams {
  double min_perturbation = 0.005;  ///< m
  double max_perturbation = 0.05;
  double placement_visibility = 0.5;
};

/// Heuristic stand-in for a physics log.
///
/// lifted: collision free and no other bounding sphere reaches into the
/// vertical corridor above the grasped instance's sphere.
/// placed: lifted and visibility ≥ placement_visibility.
/// entangled: collision free, the object is hook capable and another sphere
/// touches this one.
/// Clean lifts log zero displacement for every other instance; blocked or
/// entangled lifts log seeded random displacements of the blocking ones.
std::vector<TrialRecord> synthesize_trial_log(const SceneSample& scene, const ObjectCatalog& catalog,
                                              std::span<const TrialRecord> reachability,
                                              const TrialSynthesisParams& params, std::uint64_t seed);

/// Instances whose bounding sphere reaches into the lift corridor of `instance`.
std::vector<int> corridor_blockers(const SceneSample& scene, const ObjectCatalog& catalog, int instance);

/// Instances whose bounding sphere touches or overlaps that of `instance`.
std::vector<int> touching_instances(const SceneSample& scene, const ObjectCatalog& catalog, int instance);

/// Success test for logged poses: pose distance below `factor` × diameter.
bool precise_enough(const Pose& achieved, const Pose& target, const PoseDistanceContext& ctx, double factor = 0.1);

}  // namespace binpick
