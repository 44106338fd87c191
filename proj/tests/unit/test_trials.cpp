#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

using namespace binpick;
using namespace binpick::test;

namespace {

TrialRecord record(int instance, int grasp, bool free) {
  TrialRecord r;
  r.instance = instance;
  r.grasp = grasp;
  r.collision_free = free;
  return r;
}

struct TrialFixture {
  ObjectCatalog catalog;
  GraspSet grasps;
  SceneSample scene;

  explicit TrialFixture(int drops, std::uint64_t seed, bool hook = false) {
    ObjectModel obj = bar_model();
    obj.hook_capable = hook;
    grasps = cluster_grasps(generate_parallel_jaw(obj, GripperModel::parallel_jaw(), GraspGenParams{}, 2), 8,
                            GraspDistanceParams::for_object(obj));
    catalog.add(obj);
    scene = generate_scene(catalog.at("bar"), BinSpec{}, drops, seed);
    render_scene(scene, catalog);
  }
};

/// Distance from a point to the upward half-cylinder {dxy < r, z >= z0} around `axis`.
double distance_to_corridor(const Vec3& p, const Vec3& axis, double r) {
  const double h = std::max(0.0, std::hypot(p.x() - axis.x(), p.y() - axis.y()) - r);
  const double v = std::max(0.0, axis.z() - p.z());
  return std::hypot(h, v);
}

}  // namespace

TEST_CASE("graspability examples") {
  std::vector<TrialRecord> log;
  for (int j = 0; j < 10; ++j) log.push_back(record(3, j, j < 3));
  log[1].lifted = true;
  log[1].executed = true;
  log[1].displacements = {{0, Vec3(0.1, 0, 0)}, {1, Vec3(0, 0.2, 0)}};
  auto g = compute_graspabilities(log, 3, 10);
  CHECK(g.accessibility == doctest::Approx(0.3));
  CHECK(g.unrest == doctest::Approx(0.7));
  CHECK(g.entanglement == 1.0);

  log[2].entangled = true;
  CHECK(compute_graspabilities(log, 3, 10).entanglement == 0.0);

  // Without an executed record the worst collision-free one counts.
  log[1].executed = false;
  log[0].displacements = {{0, Vec3(0, 0, 0.5)}};
  CHECK(compute_graspabilities(log, 3, 10).unrest == doctest::Approx(0.5));

  // Displacement beyond 1 m saturates.
  CHECK(unrest_graspability(std::vector<Displacement>{{0, Vec3(2, 0, 0)}}) == 0.0);
  CHECK(unrest_graspability(std::vector<Displacement>{}) == 1.0);
}

TEST_CASE("graspability input errors") {
  std::vector<TrialRecord> log;
  for (int j = 0; j < 4; ++j) log.push_back(record(0, j, true));
  CHECK_THROWS_WITH_AS(compute_graspabilities(log, 0, 5), "incomplete trial log", DataError);
  CHECK_THROWS_WITH_AS(compute_graspabilities(log, 1, 4), "incomplete trial log", DataError);
  CHECK_THROWS_AS(compute_graspabilities(log, 0, 0), DataError);
  log.push_back(record(0, 7, true));
  CHECK_THROWS_AS(compute_graspabilities(log, 0, 4), DataError);
}

TEST_CASE("outcome ladder validation") {
  TrialRecord r = record(0, 0, false);
  CHECK_NOTHROW(r.validate());
  r.lifted = true;
  CHECK_THROWS_AS(r.validate(), DataError);
  r.collision_free = true;
  CHECK_NOTHROW(r.validate());
  r.lifted = false;
  r.placed = true;
  CHECK_THROWS_AS(r.validate(), DataError);
  r.placed.reset();
  r.displacements = {{0, Vec3::Zero()}};
  CHECK_THROWS_AS(r.validate(), DataError);
}

TEST_CASE("graspabilities stay in range on random logs") {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const int J = 1 + static_cast<int>(uniform_index(rng, 12));
    std::vector<TrialRecord> log;
    for (int j = 0; j < J; ++j) {
      TrialRecord r = record(0, j, uniform01(rng) < 0.5);
      const int n = static_cast<int>(uniform_index(rng, 4));
      for (int d = 0; d < n; ++d) r.displacements.push_back({d + 1, Vec3::Random() * 0.5});
      r.entangled = uniform01(rng) < 0.1;
      log.push_back(r);
    }
    const auto g = compute_graspabilities(log, 0, J);
    CHECK(g.accessibility >= 0);
    CHECK(g.accessibility <= 1);
    CHECK(g.unrest >= 0);
    CHECK(g.unrest <= 1);
    CHECK((g.entanglement == 0.0 || g.entanglement == 1.0));
    // Marking a collision-free record as executed can only raise unrest
    // graspability relative to the worst-case fallback.
    for (auto& r : log) {
      if (r.collision_free) {
        r.executed = true;
        CHECK(compute_graspabilities(log, 0, J).unrest >= g.unrest - 1e-12);
        break;
      }
    }
  }
}

TEST_CASE("reachability on an empty bin neighbourhood") {
  TrialFixture fx(1, 11);
  const auto recs = evaluate_reachability(fx.scene, fx.catalog, fx.grasps);
  REQUIRE(recs.size() == fx.grasps.size());
  for (std::size_t j = 0; j < recs.size(); ++j) {
    CHECK(recs[j].grasp == static_cast<int>(j));
    CHECK(recs[j].instance == 0);
  }
  // Without a bin, a lone object is reachable by every self-collision-free grasp.
  SceneSample open = fx.scene;
  open.bin.reset();
  for (const auto& r : evaluate_reachability(open, fx.catalog, fx.grasps)) CHECK(r.collision_free);
}

TEST_CASE("reachability agrees with a brute-force point-in-box count") {
  TrialFixture fx(5, 21);
  const ReachabilityParams params;
  const auto recs = evaluate_reachability(fx.scene, fx.catalog, fx.grasps, params);
  REQUIRE(recs.size() == fx.scene.instances.size() * fx.grasps.size());
  const ObjectModel& obj = fx.catalog.at("bar");
  const auto bin_points = fx.scene.bin->surface_points(params.bin_spacing);
  int free_count = 0;
  for (const TrialRecord& r : recs) {
    const Pose world = fx.scene.instance(r.instance).pose * fx.grasps.grasps[r.grasp].pose;
    const Pose inv = world.inverse();
    const auto boxes = fx.grasps.gripper.collision_boxes(fx.grasps.grasps[r.grasp].width);
    auto inside = [&](const Vec3& p) {
      const Vec3 local = apply(inv, p);
      for (const Box& b : boxes) {
        if (((local - b.center).cwiseAbs() - b.half_extents).maxCoeff() <= params.clearance) return true;
      }
      return false;
    };
    bool hit = std::any_of(bin_points.begin(), bin_points.end(), inside);
    for (const auto& other : fx.scene.instances) {
      if (other.id == r.instance || hit) continue;
      for (const auto& s : obj.samples) {
        if (inside(apply(other.pose, s.point))) {
          hit = true;
          break;
        }
      }
    }
    CHECK(r.collision_free == !hit);
    free_count += r.collision_free;
  }
  CHECK(free_count > 0);
  CHECK(free_count < static_cast<int>(recs.size()));
}

TEST_CASE("more clearance never frees a grasp") {
  TrialFixture fx(6, 5);
  const auto tight = evaluate_reachability(fx.scene, fx.catalog, fx.grasps, {0.0, 0.005});
  const auto loose = evaluate_reachability(fx.scene, fx.catalog, fx.grasps, {0.01, 0.005});
  REQUIRE(tight.size() == loose.size());
  for (std::size_t i = 0; i < tight.size(); ++i) {
    if (loose[i].collision_free) CHECK(tight[i].collision_free);
  }
}

TEST_CASE("synthesized log follows the lift heuristic") {
  for (bool hook : {false, true}) {
    TrialFixture fx(10, 8, hook);
    const auto reach = evaluate_reachability(fx.scene, fx.catalog, fx.grasps);
    const TrialSynthesisParams params;
    const auto log = synthesize_trial_log(fx.scene, fx.catalog, reach, params, 3);
    REQUIRE(log.size() == reach.size());
    const ObjectModel& obj = fx.catalog.at("bar");
    const double r = obj.sphere.radius;
    int lifted = 0, blocked = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
      const TrialRecord& t = log[i];
      CHECK_NOTHROW(t.validate());
      CHECK(t.collision_free == reach[i].collision_free);
      REQUIRE(t.lifted.has_value());
      const SceneInstance& me = fx.scene.instance(t.instance);
      const Vec3 c = sphere_center(me, obj);
      bool corridor_clear = true, touches = false;
      for (const auto& other : fx.scene.instances) {
        if (other.id == me.id) continue;
        const Vec3 oc = sphere_center(other, obj);
        if (distance_to_corridor(oc, c, r) < r - 1e-9) corridor_clear = false;
        if ((oc - c).norm() <= 2 * r + 1e-6) touches = true;
      }
      CHECK(*t.lifted == (t.collision_free && corridor_clear));
      CHECK(*t.placed == (*t.lifted && me.visibility >= params.placement_visibility));
      CHECK(*t.entangled == (t.collision_free && hook && touches));
      if (!t.collision_free) {
        CHECK(t.displacements.empty());
      } else if (*t.lifted && !*t.entangled) {
        CHECK(t.displacements.size() == fx.scene.instances.size() - 1);
        CHECK(t.total_displacement() == 0.0);
      } else {
        REQUIRE_FALSE(t.displacements.empty());
        for (const auto& d : t.displacements) {
          CHECK(d.delta.norm() >= params.min_perturbation - 1e-12);
          CHECK(d.delta.norm() <= params.max_perturbation + 1e-12);
        }
      }
      lifted += *t.lifted;
      blocked += t.collision_free && !*t.lifted;
    }
    CHECK(lifted > 0);
    CHECK(blocked > 0);
    const auto again = synthesize_trial_log(fx.scene, fx.catalog, reach, params, 3);
    for (std::size_t i = 0; i < log.size(); ++i) {
      REQUIRE(again[i].displacements.size() == log[i].displacements.size());
      for (std::size_t k = 0; k < log[i].displacements.size(); ++k) {
        CHECK(again[i].displacements[k].delta == log[i].displacements[k].delta);
      }
    }
  }
}

TEST_CASE("precise_enough uses a tenth of the diameter") {
  const ObjectModel obj = bracket_model();
  const auto ctx = obj.distance_context();
  const double d = ctx.diameter();
  CHECK(precise_enough(Pose::identity(), Pose::identity(), ctx));
  CHECK(precise_enough(Pose::from_translation({0.09 * d, 0, 0}), Pose::identity(), ctx));
  CHECK_FALSE(precise_enough(Pose::from_translation({0.11 * d, 0, 0}), Pose::identity(), ctx));
  CHECK(precise_enough(Pose::from_translation({0.11 * d, 0, 0}), Pose::identity(), ctx, 0.2));
}
