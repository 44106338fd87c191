#include "binpick/pipeline.hpp"

#include <cstdio>
#include <set>

#include "binpick/render.hpp"

namespace binpick {
namespace {

/// Reads optional keys of one config object and rejects keys nobody asked for.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw DataError("config section " + path_ + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    try {
      out = j_[key].get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("config key " + path_ + "." + key + ": " + e.what());
    }
  }

  template <class T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    T v{};
    read(key, v);
    out = v;
  }

  /// Calls `f(Section&)` on a nested object when present.
  template <class F>
  void section(const char* key, F&& f) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    Section s(j_[key], path_ + "." + key);
    f(s);
    s.finish();
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw DataError("unknown config key " + path_ + "." + k);
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

/// Runs one pipeline stage, tagging data errors with the stage and input.
template <class F>
auto stage(const std::string& name, const std::string& input, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const DataError& e) {
    throw PipelineError(name, input, e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation("stage " + name + " (" + input + "): " + e.what());
  }
}

std::string scene_name(int s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04d", s);
  return buf;
}

}  // namespace

void PipelineConfig::validate() const {
  if (scenes < 1) throw DataError("config needs at least one scene");
  if (objects_per_scene < 0) throw DataError("objects_per_scene must be >= 0");
  if (cluster_k < 1) throw DataError("cluster k must be >= 1");
  if (grid_cells < 1) throw DataError("grid cells must be >= 1");
  if (orientation_weight && !(*orientation_weight >= 0.0)) throw DataError("orientation weight must be >= 0");
  for (int r : augment_rotations) {
    if (r < 1 || r > 3) throw DataError("augmentation rotations are quarter turns 1..3");
  }
  bin.validate();
  loss.validate();
}

PipelineConfig config_from_json(const Json& j) {
  check_header(j, "binpick.config");
  PipelineConfig c;
  Section root(j, "config");
  std::string format;
  int version = 0;
  root.read("format", format);
  root.read("version", version);
  root.read("scenes", c.scenes);
  root.read("objects_per_scene", c.objects_per_scene);
  root.read("object_samples", c.object_samples);
  root.section("grasps", [&](Section& s) {
    auto& g = c.grasps;
    s.read("sample_count", g.sample_count);
    s.read("min_pair_fraction", g.min_pair_fraction);
    s.read("antipodal_angle_deg", g.antipodal_angle_deg);
    s.read("rotation_step_deg", g.rotation_step_deg);
    s.read("max_pairs", g.max_pairs);
    s.read("self_clearance", g.self_clearance);
    s.read("flatness_angle_deg", g.flatness_angle_deg);
    s.read("suction_clearance", g.suction_clearance);
    s.read("suction_rotations", g.suction_rotations);
  });
  root.section("cluster", [&](Section& s) {
    s.read("k", c.cluster_k);
    s.read("orientation_weight", c.orientation_weight);
  });
  root.section("bin", [&](Section& s) {
    s.read("size_x", c.bin.size_x);
    s.read("size_y", c.bin.size_y);
    s.read("wall_height", c.bin.wall_height);
    s.read("wall_thickness", c.bin.wall_thickness);
  });
  root.section("camera", [&](Section& s) {
    s.read("width", c.camera.width);
    s.read("height", c.camera.height);
    s.read("distance", c.camera.distance);
    s.read("fx", c.camera.fx);
    s.read("fy", c.camera.fy);
    s.read("near", c.camera.near_plane);
    s.read("far", c.camera.far_plane);
  });
  root.section("scene", [&](Section& s) { s.read("max_attempts", c.scene.max_attempts); });
  root.section("grid", [&](Section& s) { s.read("cells", c.grid_cells); });
  root.section("reachability", [&](Section& s) {
    s.read("clearance", c.reachability.clearance);
    s.read("bin_spacing", c.reachability.bin_spacing);
  });
  root.section("trials", [&](Section& s) {
    s.read("min_perturbation", c.trials.min_perturbation);
    s.read("max_perturbation", c.trials.max_perturbation);
    s.read("placement_visibility", c.trials.placement_visibility);
  });
  root.section("loss", [&](Section& s) {
    s.read("lambda1", c.loss.lambda1);
    s.read("lambda2", c.loss.lambda2);
    s.read("lambda4", c.loss.lambda4);
    s.read("lambda5", c.loss.lambda5);
    s.read("lambda6", c.loss.lambda6);
  });
  root.section("thresholds", [&](Section& s) {
    s.read("detection", c.thresholds.detection);
    s.read("pose_success", c.thresholds.pose_success);
    s.read("min_visibility", c.thresholds.min_visibility);
    s.read("grasp_success", c.thresholds.grasp_success);
  });
  root.read("grasp_label_scenes", c.grasp_label_scenes);
  root.section("augment", [&](Section& s) {
    s.read("rotations", c.augment_rotations);
    s.read("mirror", c.augment_mirror);
  });
  root.finish();
  c.validate();
  return c;
}

PipelineConfig load_config(const fs::path& path) { return config_from_json(read_json(path)); }

Json to_json(const PipelineConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j = make_header("binpick.config");
  j["scenes"] = c.scenes;
  j["objects_per_scene"] = c.objects_per_scene;
  j["object_samples"] = c.object_samples;
  const auto& g = c.grasps;
  j["grasps"] = {{"sample_count", g.sample_count},
                 {"min_pair_fraction", g.min_pair_fraction},
                 {"antipodal_angle_deg", g.antipodal_angle_deg},
                 {"rotation_step_deg", g.rotation_step_deg},
                 {"max_pairs", g.max_pairs},
                 {"self_clearance", g.self_clearance},
                 {"flatness_angle_deg", g.flatness_angle_deg},
                 {"suction_clearance", g.suction_clearance},
                 {"suction_rotations", g.suction_rotations}};
  j["cluster"] = {{"k", c.cluster_k}, {"orientation_weight", opt(c.orientation_weight)}};
  j["bin"] = to_json(c.bin);
  j["camera"] = {{"width", c.camera.width},   {"height", c.camera.height}, {"distance", c.camera.distance},
                 {"fx", opt(c.camera.fx)},    {"fy", opt(c.camera.fy)},    {"near", opt(c.camera.near_plane)},
                 {"far", opt(c.camera.far_plane)}};
  j["scene"] = {{"max_attempts", c.scene.max_attempts}};
  j["grid"] = {{"cells", c.grid_cells}};
  j["reachability"] = {{"clearance", c.reachability.clearance}, {"bin_spacing", c.reachability.bin_spacing}};
  j["trials"] = {{"min_perturbation", c.trials.min_perturbation},
                 {"max_perturbation", c.trials.max_perturbation},
                 {"placement_visibility", c.trials.placement_visibility}};
  j["loss"] = {{"lambda1", c.loss.lambda1}, {"lambda2", c.loss.lambda2}, {"lambda4", c.loss.lambda4},
               {"lambda5", c.loss.lambda5}, {"lambda6", opt(c.loss.lambda6)}};
  j["thresholds"] = {{"detection", c.thresholds.detection},
                     {"pose_success", c.thresholds.pose_success},
                     {"min_visibility", c.thresholds.min_visibility},
                     {"grasp_success", c.thresholds.grasp_success}};
  j["grasp_label_scenes"] = c.grasp_label_scenes;
  j["augment"] = {{"rotations", c.augment_rotations}, {"mirror", c.augment_mirror}};
  return j;
}

CameraModel make_camera(const PipelineConfig& c) {
  CameraModel cam = CameraModel::top_down(c.bin, c.camera.width, c.camera.height, c.camera.distance);
  if (c.camera.fx) cam.fx = *c.camera.fx;
  if (c.camera.fy) cam.fy = *c.camera.fy;
  if (c.camera.near_plane) cam.near_plane = *c.camera.near_plane;
  if (c.camera.far_plane) cam.far_plane = *c.camera.far_plane;
  cam.validate();
  return cam;
}

GridSpec make_grid(const PipelineConfig& c, const SymmetryClass& symmetry, int grasp_count) {
  GridSpec g;
  g.cells = c.grid_cells;
  g.grasp_count = grasp_count;
  g.symmetry = symmetry;
  g.camera = make_camera(c);
  g.validate();
  return g;
}

LabelMap compute_labels(const SceneSample& scene, std::span<const TrialRecord> log, int grasp_count) {
  LabelMap out;
  for (const SceneInstance& inst : scene.instances) {
    InstanceLabels lab;
    lab.graspability = compute_graspabilities(log, inst.id, grasp_count);
    lab.success.assign(static_cast<std::size_t>(grasp_count), 0);
    for (const TrialRecord& r : log) {
      if (r.instance == inst.id && r.grasp >= 0 && r.grasp < grasp_count) {
        lab.success[static_cast<std::size_t>(r.grasp)] = r.placed.value_or(false) ? 1 : 0;
      }
    }
    out[inst.id] = std::move(lab);
  }
  return out;
}

void SampleManifest::validate() const {
  auto check = [&](const std::string& rel) {
    if (!rel.empty() && !fs::exists(root / rel)) throw DataError("manifest references a missing file: " + rel);
  };
  check(object);
  check(grasps);
  for (const ManifestEntry& e : samples) {
    for (const std::string* p : {&e.depth, &e.mask, &e.annotations, &e.trials, &e.labels, &e.tensor}) check(*p);
    if (e.depth.empty() || e.tensor.empty()) throw DataError("sample " + e.id + " lacks depth or tensor");
    if (e.augmented && e.grasp_labels) throw DataError("augmented sample " + e.id + " claims grasp labels");
  }
}

Json to_json(const SampleManifest& m) {
  Json j = make_header("binpick.manifest");
  j["object"] = m.object;
  j["grasps"] = m.grasps;
  Json arr = Json::array();
  for (const ManifestEntry& e : m.samples) {
    arr.push_back({{"id", e.id},
                   {"scene", e.scene},
                   {"depth", e.depth},
                   {"mask", e.mask},
                   {"annotations", e.annotations},
                   {"trials", e.trials},
                   {"labels", e.labels},
                   {"tensor", e.tensor},
                   {"augmented", e.augmented},
                   {"augmentation", e.augmentation},
                   {"grasp_labels", e.grasp_labels}});
  }
  j["samples"] = std::move(arr);
  return j;
}

SampleManifest manifest_from_json(const Json& j, const fs::path& root) {
  check_header(j, "binpick.manifest");
  SampleManifest m;
  m.root = root;
  try {
    m.object = j.at("object").get<std::string>();
    m.grasps = j.at("grasps").get<std::string>();
    for (const Json& e : j.at("samples")) {
      ManifestEntry s;
      s.id = e.at("id").get<std::string>();
      s.scene = e.at("scene").get<int>();
      s.depth = e.at("depth").get<std::string>();
      s.mask = e.value("mask", "");
      s.annotations = e.value("annotations", "");
      s.trials = e.value("trials", "");
      s.labels = e.value("labels", "");
      s.tensor = e.at("tensor").get<std::string>();
      s.augmented = e.value("augmented", false);
      s.augmentation = e.value("augmentation", "none");
      s.grasp_labels = e.value("grasp_labels", !s.augmented);
      m.samples.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

SampleManifest load_manifest(const fs::path& path) {
  SampleManifest m = manifest_from_json(read_json(path), path.parent_path());
  m.validate();
  return m;
}

SampleManifest run_pipeline(const ObjectDescriptor& descriptor, const PipelineConfig& config, std::uint64_t seed,
                            const fs::path& out_dir) {
  config.validate();
  const std::string object_input = descriptor.id + " (" + descriptor.mesh.string() + ")";

  SampleManifest manifest;
  manifest.root = out_dir;
  manifest.object = "object.json";
  manifest.grasps = "grasps.json";

  const ObjectModel obj = stage("gen-grasps", object_input, [&] {
    return load_object(descriptor, seed, config.object_samples);
  });
  const GraspSet candidates = stage("gen-grasps", object_input, [&] {
    return generate_grasps(obj, descriptor.gripper, config.grasps, stream_seed(seed, "grasps"));
  });
  const GraspSet grasps = stage("cluster", object_input, [&] {
    const GraspDistanceParams w = config.orientation_weight ? GraspDistanceParams{*config.orientation_weight}
                                                            : GraspDistanceParams::for_object(obj);
    return cluster_grasps(candidates, config.cluster_k, w);
  });
  const int grasp_count = static_cast<int>(grasps.size());
  stage("cluster", object_input, [&] {
    write_json(to_json(descriptor), out_dir / manifest.object);
    write_json(to_json(config), out_dir / "config.json");
    write_json(to_json(candidates), out_dir / "grasp_candidates.json");
    write_json(to_json(grasps), out_dir / manifest.grasps);
    return 0;
  });

  ObjectCatalog catalog;
  catalog.add(obj);
  const CameraModel camera = make_camera(config);
  const GridSpec grid = make_grid(config, obj.symmetry, grasp_count);

  for (int s = 0; s < config.scenes; ++s) {
    const std::string name = scene_name(s);
    const std::string dir = "scenes/" + name + "/";
    const std::string input = name + " of " + descriptor.id;

    SceneSample scene = stage("gen-scenes", input, [&] {
      SceneSample sc = generate_scene(obj, config.bin, config.objects_per_scene, stream_seed(seed, "scenes", s), camera,
                                      config.scene);
      sc.id = s;
      return sc;
    });
    stage("render", input, [&] {
      render_scene(scene, catalog);
      write_pfm(scene.depth, out_dir / (dir + "depth.pfm"));
      write_pgm(scene.mask, out_dir / (dir + "mask.pgm"));
      write_json(to_json(scene), out_dir / (dir + "scene.json"));
      return 0;
    });
    const std::vector<TrialRecord> log = stage("trials", input, [&] {
      const auto reach = evaluate_reachability(scene, catalog, grasps, config.reachability);
      auto records = synthesize_trial_log(scene, catalog, reach, config.trials, stream_seed(seed, "trials", s));
      write_file_atomic(out_dir / (dir + "trials.jsonl"), encode_trial_log(s, records));
      return records;
    });
    const LabelMap labels = stage("metrics", input, [&] {
      LabelMap l = compute_labels(scene, log, grasp_count);
      write_json(labels_to_json(s, grasp_count, l), out_dir / (dir + "labels.json"));
      return l;
    });

    ManifestEntry entry;
    entry.id = name;
    entry.scene = s;
    entry.depth = dir + "depth.pfm";
    entry.mask = dir + "mask.pgm";
    entry.annotations = dir + "scene.json";
    entry.trials = dir + "trials.jsonl";
    entry.labels = dir + "labels.json";
    entry.tensor = dir + "tensor.pqt";
    entry.grasp_labels = config.grasp_label_scenes < 0 || s < config.grasp_label_scenes;

    stage("encode", input, [&] {
      const GroundTruthTensor t = encode_ground_truth(scene, labels, grid);
      t.check_invariants();
      write_tensor_file(t, out_dir / entry.tensor);
      manifest.samples.push_back(entry);

      std::vector<std::pair<std::string, Augmentation>> modes;
      for (int r : config.augment_rotations) modes.emplace_back("rot" + std::to_string(r), Augmentation::rotate(r));
      if (config.augment_mirror) modes.emplace_back("mirror", Augmentation::mirror());
      for (const auto& [tag, mode] : modes) {
        const AugmentedSample a = augment_sample(scene.depth, t, mode);
        ManifestEntry aug = entry;
        aug.id = name + "_" + tag;
        aug.depth = dir + tag + "/depth.pfm";
        aug.tensor = dir + tag + "/tensor.pqt";
        aug.mask.clear();
        aug.augmented = true;
        aug.augmentation = tag;
        aug.grasp_labels = false;
        write_pfm(a.depth, out_dir / aug.depth);
        write_tensor_file(a.tensor, out_dir / aug.tensor);
        manifest.samples.push_back(aug);
      }
      return 0;
    });
  }

  write_json(to_json(manifest), out_dir / "manifest.json");
  manifest.validate();
  return manifest;
}

}  // namespace binpick
