// Command-line driver for the bin-picking dataset toolkit.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal invariant violation.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "binpick/pipeline.hpp"
#include "binpick/render.hpp"

using namespace binpick;

namespace {

struct Common {
  std::string object;
  std::string config;
  std::uint64_t seed = 0;

  PipelineConfig cfg() const { return config.empty() ? PipelineConfig{} : load_config(config); }
  ObjectDescriptor descriptor() const { return load_descriptor(object); }
  ObjectModel model(const PipelineConfig& c) const { return load_object(descriptor(), seed, c.object_samples); }
};

void add_object(CLI::App* cmd, Common& c) {
  cmd->add_option("--object", c.object, "object descriptor (JSON)")->required()->check(CLI::ExistingFile);
}
void add_config(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "pipeline config (JSON); defaults when omitted")->check(CLI::ExistingFile);
}
void add_seed(CLI::App* cmd, Common& c) { cmd->add_option("--seed", c.seed, "root seed")->capture_default_str(); }

void print_report(const EvalReport& r) {
  std::printf("scenes              %zu\n", r.scenes);
  std::printf("detections          %zu\n", r.detections);
  std::printf("ground truth (AP)   %zu\n", r.ground_truth);
  std::printf("pose success rate   %.6f\n", r.pose_success_rate);
  std::printf("average precision   %.6f\n", r.average_precision);
  std::printf("grasp precision     %.6f\n", r.grasp_precision);
  std::printf("grasp recall        %.6f\n", r.grasp_recall);
  std::printf("policy success rate %.6f\n", r.policy_success_rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bin-picking grasp planning and dataset toolkit"};
  app.require_subcommand(1);
  Common c;
  std::string out, in_grasps, in_scene, in_trials, in_labels, in_depth, in_tensor, out_depth, out_tensor, pred, gt,
      manifest, pred_dir;
  std::size_t k = 500;
  std::optional<double> weight;
  std::optional<int> count;
  int grasp_count = 0;
  int rotate = 0;
  bool mirror = false;
  bool no_grasp_labels = false;

  auto* gen_grasps = app.add_subcommand("gen-grasps", "sample grasp candidates on the object mesh");
  add_object(gen_grasps, c);
  add_config(gen_grasps, c);
  add_seed(gen_grasps, c);
  gen_grasps->add_option("--out", out, "grasp set (JSON)")->required();

  auto* cluster = app.add_subcommand("cluster-grasps", "reduce a grasp set to k medoids");
  add_object(cluster, c);
  add_seed(cluster, c);
  cluster->add_option("--grasps", in_grasps, "input grasp set")->required()->check(CLI::ExistingFile);
  cluster->add_option("-k,--k", k, "number of medoids")->capture_default_str();
  cluster->add_option("--weight", weight, "orientation weight in m/rad (default 0.1 x sphere radius)");
  cluster->add_option("--out", out, "output grasp set")->required();

  auto* gen_scenes = app.add_subcommand("gen-scenes", "drop objects into the bin");
  add_object(gen_scenes, c);
  add_config(gen_scenes, c);
  add_seed(gen_scenes, c);
  gen_scenes->add_option("--count", count, "number of scenes (default from config)");
  gen_scenes->add_option("--out-dir", out, "directory for scene records")->required();

  auto* render = app.add_subcommand("render", "render depth and mask, fill visibilities");
  add_object(render, c);
  add_config(render, c);
  add_seed(render, c);
  render->add_option("--scene", in_scene, "scene record")->required()->check(CLI::ExistingFile);
  render->add_option("--out-dir", out, "directory for depth.pfm, mask.pgm, scene.json")->required();

  auto* trials = app.add_subcommand("trials", "check reachability and synthesize a trial log");
  add_object(trials, c);
  add_config(trials, c);
  add_seed(trials, c);
  trials->add_option("--grasps", in_grasps, "grasp set")->required()->check(CLI::ExistingFile);
  trials->add_option("--scene", in_scene, "rendered scene record")->required()->check(CLI::ExistingFile);
  trials->add_option("--out", out, "trial log (JSON lines)")->required();

  auto* metrics = app.add_subcommand("metrics", "graspabilities and success labels from a trial log");
  metrics->add_option("--scene", in_scene, "scene record")->required()->check(CLI::ExistingFile);
  metrics->add_option("--trials", in_trials, "trial log")->required()->check(CLI::ExistingFile);
  metrics->add_option("--grasp-count", grasp_count, "J")->required()->check(CLI::PositiveNumber);
  metrics->add_option("--out", out, "labels (JSON)")->required();

  auto* encode = app.add_subcommand("encode", "encode a scene and its labels into a tensor");
  add_object(encode, c);
  add_config(encode, c);
  encode->add_option("--scene", in_scene, "scene record")->required()->check(CLI::ExistingFile);
  encode->add_option("--labels", in_labels, "labels")->required()->check(CLI::ExistingFile);
  encode->add_option("--out", out, "tensor file (.pqt)")->required();

  auto* augment = app.add_subcommand("augment", "rotate by quarter turns or mirror a sample");
  augment->add_option("--depth", in_depth, "depth image (PFM)")->required()->check(CLI::ExistingFile);
  augment->add_option("--tensor", in_tensor, "tensor file")->required()->check(CLI::ExistingFile);
  auto* rot_opt = augment->add_option("--rotate", rotate, "quarter turns about the camera z axis");
  augment->add_flag("--mirror", mirror, "mirror left-right")->excludes(rot_opt);
  augment->add_option("--out-depth", out_depth, "output depth image")->required();
  augment->add_option("--out-tensor", out_tensor, "output tensor")->required();

  auto* loss = app.add_subcommand("loss-eval", "loss of a predicted tensor against ground truth");
  add_config(loss, c);
  loss->add_option("--pred", pred, "predicted tensor")->required()->check(CLI::ExistingFile);
  loss->add_option("--gt", gt, "ground-truth tensor")->required()->check(CLI::ExistingFile);
  loss->add_flag("--no-grasp-labels", no_grasp_labels, "drop the grasp success term");

  auto* policy = app.add_subcommand("policy", "select the best grasp from a predicted tensor");
  policy->add_option("--pred", pred, "predicted tensor")->required()->check(CLI::ExistingFile);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against a dataset");
  add_object(evaluate_cmd, c);
  add_config(evaluate_cmd, c);
  add_seed(evaluate_cmd, c);
  evaluate_cmd->add_option("--manifest", manifest, "dataset manifest")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--pred-dir", pred_dir, "directory of <sample id>.pqt predictions; ground truth if omitted");

  auto* pipeline = app.add_subcommand("pipeline", "run every stage and write a dataset");
  add_object(pipeline, c);
  add_config(pipeline, c);
  add_seed(pipeline, c);
  pipeline->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_grasps) {
      const PipelineConfig cfg = c.cfg();
      const ObjectDescriptor d = c.descriptor();
      const ObjectModel obj = load_object(d, c.seed, cfg.object_samples);
      const GraspSet set = generate_grasps(obj, d.gripper, cfg.grasps, stream_seed(c.seed, "grasps"));
      write_json(to_json(set), out);
      std::printf("%zu grasps from %zu contact pairs\n", set.size(), set.contact_pairs.size());
    } else if (*cluster) {
      const ObjectModel obj = c.model(PipelineConfig{});
      const GraspSet set = grasps_from_json(read_json(in_grasps));
      const GraspDistanceParams w = weight ? GraspDistanceParams{*weight} : GraspDistanceParams::for_object(obj);
      if (k > set.size()) {
        std::fprintf(stderr, "warning: only %zu candidates for k=%zu, keeping all\n", set.size(), k);
      }
      const GraspSet reduced = cluster_grasps(set, k, w);
      write_json(to_json(reduced), out);
      std::printf("%zu of %zu grasps kept\n", reduced.size(), set.size());
    } else if (*gen_scenes) {
      const PipelineConfig cfg = c.cfg();
      const ObjectModel obj = c.model(cfg);
      const int n = count.value_or(cfg.scenes);
      for (int s = 0; s < n; ++s) {
        SceneSample scene = generate_scene(obj, cfg.bin, cfg.objects_per_scene, stream_seed(c.seed, "scenes", s),
                                           make_camera(cfg), cfg.scene);
        scene.id = s;
        char name[32];
        std::snprintf(name, sizeof name, "scene_%04d.json", s);
        write_json(to_json(scene), fs::path(out) / name);
      }
      std::printf("%d scenes written\n", n);
    } else if (*render) {
      const PipelineConfig cfg = c.cfg();
      ObjectCatalog catalog;
      catalog.add(c.model(cfg));
      SceneSample scene = scene_from_json(read_json(in_scene));
      render_scene(scene, catalog);
      write_pfm(scene.depth, fs::path(out) / "depth.pfm");
      write_pgm(scene.mask, fs::path(out) / "mask.pgm");
      write_json(to_json(scene), fs::path(out) / "scene.json");
    } else if (*trials) {
      const PipelineConfig cfg = c.cfg();
      ObjectCatalog catalog;
      catalog.add(c.model(cfg));
      const GraspSet set = grasps_from_json(read_json(in_grasps));
      const SceneSample scene = scene_from_json(read_json(in_scene));
      const auto reach = evaluate_reachability(scene, catalog, set, cfg.reachability);
      const auto log = synthesize_trial_log(scene, catalog, reach, cfg.trials, stream_seed(c.seed, "trials", scene.id));
      write_file_atomic(out, encode_trial_log(scene.id, log));
      std::printf("%zu trial records\n", log.size());
    } else if (*metrics) {
      const SceneSample scene = scene_from_json(read_json(in_scene));
      const auto log = decode_trial_log(read_file(in_trials));
      write_json(labels_to_json(scene.id, grasp_count, compute_labels(scene, log, grasp_count)), out);
    } else if (*encode) {
      const PipelineConfig cfg = c.cfg();
      const ObjectDescriptor d = c.descriptor();
      int j = 0;
      const LabelMap labels = labels_from_json(read_json(in_labels), &j);
      const SceneSample scene = scene_from_json(read_json(in_scene));
      GridSpec grid = make_grid(cfg, d.symmetry, j);
      grid.camera = scene.camera;
      grid.validate();
      const GroundTruthTensor t = encode_ground_truth(scene, labels, grid);
      t.check_invariants();
      write_tensor_file(t, out);
    } else if (*augment) {
      const GroundTruthTensor t = read_tensor_file(in_tensor);
      const DepthImage depth = read_pfm(in_depth);
      const AugmentedSample a = augment_sample(depth, t, mirror ? Augmentation::mirror() : Augmentation::rotate(rotate));
      write_pfm(a.depth, out_depth);
      write_tensor_file(a.tensor, out_tensor);
      std::printf("grasp labels excluded: %s\n", a.grasp_labels_excluded ? "yes" : "no");
    } else if (*loss) {
      const PipelineConfig cfg = c.cfg();
      LossMask mask;
      mask.grasp_success = !no_grasp_labels;
      const GroundTruthTensor truth = read_tensor_file(gt);
      truth.check_invariants();
      std::printf("loss %.17g\n", compute_loss(read_tensor_file(pred), truth, cfg.loss, mask));
    } else if (*policy) {
      const GroundTruthTensor t = read_tensor_file(pred);
      const PolicyChoice p = policy_select(t);
      const int s = t.grid().cells;
      std::printf("cell %d (row %d, col %d) grasp %d score %.9g\n", p.cell, p.cell / s, p.cell % s, p.grasp, p.score);
    } else if (*evaluate_cmd) {
      const PipelineConfig cfg = c.cfg();
      const ObjectModel obj = c.model(cfg);
      const SampleManifest m = load_manifest(manifest);
      std::vector<GroundTruthTensor> preds;
      std::vector<EvalGroundTruth> gts;
      for (const ManifestEntry& e : m.samples) {
        if (e.augmented) continue;
        const fs::path p = pred_dir.empty() ? m.root / e.tensor : fs::path(pred_dir) / (e.id + ".pqt");
        preds.push_back(read_tensor_file(p));
        gts.push_back({scene_from_json(read_json(m.root / e.annotations)), labels_from_json(read_json(m.root / e.labels))});
      }
      print_report(evaluate(preds, gts, obj.distance_context(), cfg.thresholds));
    } else if (*pipeline) {
      const SampleManifest m = run_pipeline(c.descriptor(), c.cfg(), c.seed, out);
      std::printf("%zu samples written to %s\n", m.samples.size(), out.c_str());
    }
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
