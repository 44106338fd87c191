#include "binpick/trials.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "binpick/error.hpp"

namespace binpick {

void TrialRecord::validate() const {
  if (placed.value_or(false) && !lifted.value_or(false)) throw DataError("trial log: placed without lifted");
  if (lifted.value_or(false) && !collision_free) throw DataError("trial log: lifted without collision-free");
  for (const auto& d : displacements) {
    if (d.instance == instance) throw DataError("trial log: displacement lists the picked instance");
  }
}

double TrialRecord::total_displacement() const {
  double sum = 0.0;
  for (const auto& d : displacements) sum += d.delta.norm();
  return sum;
}

double unrest_graspability(std::span<const Displacement> displacements) {
  double sum = 0.0;
  for (const auto& d : displacements) sum += d.delta.norm();
  return 1.0 - std::min(sum, 1.0);
}

GraspabilityTriple compute_graspabilities(std::span<const TrialRecord> records, int instance, int grasp_count) {
  if (grasp_count < 1) throw DataError("grasp count must be >= 1");
  std::vector<const TrialRecord*> by_grasp(static_cast<std::size_t>(grasp_count), nullptr);
  for (const TrialRecord& r : records) {
    if (r.instance != instance) continue;
    if (r.grasp < 0 || r.grasp >= grasp_count) throw DataError("trial log: grasp id out of range");
    by_grasp[r.grasp] = &r;
  }
  if (std::any_of(by_grasp.begin(), by_grasp.end(), [](auto* p) { return p == nullptr; })) {
    throw DataError("incomplete trial log");
  }

  GraspabilityTriple g;
  int free_count = 0;
  bool entangled = false;
  const TrialRecord* executed = nullptr;
  const TrialRecord* worst_free = nullptr;
  const TrialRecord* worst_any = nullptr;
  for (const TrialRecord* r : by_grasp) {
    if (r->collision_free) ++free_count;
    if (r->entangled.value_or(false)) entangled = true;
    if (r->executed && executed == nullptr) executed = r;
    if (r->collision_free && (!worst_free || r->total_displacement() > worst_free->total_displacement())) {
      worst_free = r;
    }
    if (!worst_any || r->total_displacement() > worst_any->total_displacement()) worst_any = r;
  }
  g.accessibility = static_cast<double>(free_count) / grasp_count;
  const TrialRecord* source = executed ? executed : (worst_free ? worst_free : worst_any);
  g.unrest = unrest_graspability(source->displacements);
  g.entanglement = entangled ? 0.0 : 1.0;
  return g;
}

std::vector<TrialRecord> evaluate_reachability(const SceneSample& scene, const ObjectCatalog& catalog,
                                               const GraspSet& grasps, const ReachabilityParams& params) {
  struct Cloud {
    std::vector<Vec3> points;
    Vec3 center;
    double radius;
  };
  std::vector<Cloud> clouds;
  for (const SceneInstance& inst : scene.instances) {
    const ObjectModel& obj = catalog.at(inst.object);
    Cloud c;
    c.points.reserve(obj.samples.size());
    for (const auto& s : obj.samples) c.points.push_back(apply(inst.pose, s.point));
    c.center = sphere_center(inst, obj);
    c.radius = obj.sphere.radius;
    clouds.push_back(std::move(c));
  }
  const std::vector<Vec3> bin_points = scene.bin ? scene.bin->surface_points(params.bin_spacing) : std::vector<Vec3>{};

  double reach = 0.0;
  for (const Grasp& g : grasps.grasps) {
    for (const Box& b : grasps.gripper.collision_boxes(g.width > 0 ? g.width : grasps.gripper.opening)) {
      reach = std::max(reach, b.center.norm() + b.half_extents.norm());
    }
  }
  reach += std::sqrt(3.0) * params.clearance;

  std::vector<TrialRecord> out;
  std::vector<Vec3> obstacles;
  for (std::size_t k = 0; k < scene.instances.size(); ++k) {
    const SceneInstance& inst = scene.instances[k];
    for (const Grasp& g : grasps.grasps) {
      const Pose world = inst.pose * g.pose;
      obstacles.clear();
      for (std::size_t o = 0; o < clouds.size(); ++o) {
        if (o == k) continue;
        if ((clouds[o].center - world.translation).norm() > reach + clouds[o].radius) continue;
        obstacles.insert(obstacles.end(), clouds[o].points.begin(), clouds[o].points.end());
      }
      const std::optional<double> width = g.width > 0 ? std::optional<double>(g.width) : std::nullopt;
      bool hit = check_gripper_collision(world, grasps.gripper, obstacles, params.clearance, width);
      if (!hit) hit = check_gripper_collision(world, grasps.gripper, bin_points, params.clearance, width);
      TrialRecord r;
      r.scene = scene.id;
      r.instance = inst.id;
      r.grasp = g.id;
      r.collision_free = !hit;
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::pair(a.instance, a.grasp) < std::pair(b.instance, b.grasp);
  });
  return out;
}

std::vector<int> corridor_blockers(const SceneSample& scene, const ObjectCatalog& catalog, int instance) {
  const SceneInstance& me = scene.instance(instance);
  const ObjectModel& my_obj = catalog.at(me.object);
  const Vec3 c = sphere_center(me, my_obj);
  const double r = my_obj.sphere.radius;
  std::vector<int> out;
  for (const SceneInstance& other : scene.instances) {
    if (other.id == instance) continue;
    const ObjectModel& obj = catalog.at(other.object);
    const Vec3 oc = sphere_center(other, obj);
    const double orad = obj.sphere.radius;
    // Largest horizontal cross-section of the other sphere at heights >= c.z.
    double reach;
    if (oc.z() >= c.z()) {
      reach = orad;
    } else {
      const double dz = c.z() - oc.z();
      if (dz >= orad) continue;
      reach = std::sqrt(orad * orad - dz * dz);
    }
    if (std::hypot(oc.x() - c.x(), oc.y() - c.y()) < r + reach - 1e-9) out.push_back(other.id);
  }
  return out;
}

std::vector<int> touching_instances(const SceneSample& scene, const ObjectCatalog& catalog, int instance) {
  const SceneInstance& me = scene.instance(instance);
  const ObjectModel& my_obj = catalog.at(me.object);
  const Vec3 c = sphere_center(me, my_obj);
  std::vector<int> out;
  for (const SceneInstance& other : scene.instances) {
    if (other.id == instance) continue;
    const ObjectModel& obj = catalog.at(other.object);
    if ((sphere_center(other, obj) - c).norm() <= my_obj.sphere.radius + obj.sphere.radius + 1e-6) {
      out.push_back(other.id);
    }
  }
  return out;
}

std::vector<TrialRecord> synthesize_trial_log(const SceneSample& scene, const ObjectCatalog& catalog,
                                              std::span<const TrialRecord> reachability,
                                              const TrialSynthesisParams& params, std::uint64_t seed) {
  std::map<int, std::vector<int>> blockers;
  std::map<int, std::vector<int>> touching;
  for (const SceneInstance& inst : scene.instances) {
    blockers[inst.id] = corridor_blockers(scene, catalog, inst.id);
    touching[inst.id] = touching_instances(scene, catalog, inst.id);
  }

  std::vector<TrialRecord> out;
  out.reserve(reachability.size());
  for (const TrialRecord& in : reachability) {
    TrialRecord r = in;
    r.displacements.clear();
    const SceneInstance& inst = scene.instance(r.instance);
    if (!r.collision_free) {
      r.lifted = false;
      r.placed = false;
      r.entangled = false;
      out.push_back(std::move(r));
      continue;
    }
    const bool clear = blockers[r.instance].empty();
    const bool entangled = catalog.at(inst.object).hook_capable && !touching[r.instance].empty();
    r.lifted = clear;
    r.placed = clear && inst.visibility >= params.placement_visibility;
    r.entangled = entangled;
    if (clear && !entangled) {
      for (const SceneInstance& other : scene.instances) {
        if (other.id != r.instance) r.displacements.push_back({other.id, Vec3::Zero()});
      }
    } else {
      std::vector<int> moved = blockers[r.instance];
      if (entangled) moved.insert(moved.end(), touching[r.instance].begin(), touching[r.instance].end());
      std::sort(moved.begin(), moved.end());
      moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
      Rng rng(stream_seed(seed, "trials", (static_cast<std::uint64_t>(r.instance) << 32) | static_cast<std::uint32_t>(r.grasp)));
      for (int id : moved) {
        const double mag = uniform(rng, params.min_perturbation, params.max_perturbation);
        const Vec3 dir = random_rotation(rng) * Vec3::UnitX();
        r.displacements.push_back({id, mag * dir});
      }
    }
    r.validate();
    out.push_back(std::move(r));
  }
  return out;
}

bool precise_enough(const Pose& achieved, const Pose& target, const PoseDistanceContext& ctx, double factor) {
  return pose_distance(achieved, target, ctx) < factor * ctx.diameter();
}

}  // namespace binpick
